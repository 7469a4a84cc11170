//! Packed global states and the reachability graph.
//!
//! A state stores one ordinal per declared variable (declaration order), so
//! states hash and compare as plain vectors. The graph keeps all reachable
//! states in one arena plus forward adjacency in compressed sparse-row form;
//! the backward adjacency (the exact transpose of `succ`) is built on first
//! use, so pure reachability queries never pay for it.

use crate::expr::Value;
use crate::model::Model;
use std::sync::OnceLock;

pub type StateId = u32;

/// A total assignment of values to every declared variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GlobalState {
    pub(crate) vals: Box<[u16]>,
}

impl GlobalState {
    pub(crate) fn new(vals: Box<[u16]>) -> Self {
        GlobalState { vals }
    }

    pub fn width(&self) -> usize {
        self.vals.len()
    }

    pub(crate) fn as_slice(&self) -> &[u16] {
        &self.vals
    }

    /// Decodes the value of the variable at `slot` (declaration order).
    pub fn value(&self, model: &Model, slot: usize) -> Value {
        model.vars()[slot].domain.value(self.vals[slot])
    }
}

/// The reachable fragment of a model's transition system.
#[derive(Debug)]
pub struct StateGraph {
    width: usize,
    arena: Vec<u16>,
    succ_off: Vec<u64>,
    succ: Vec<StateId>,
    pred: OnceLock<(Vec<u64>, Vec<StateId>)>,
    init: Vec<StateId>,
}

impl StateGraph {
    pub(crate) fn from_parts(
        width: usize,
        arena: Vec<u16>,
        succ_off: Vec<u64>,
        succ: Vec<StateId>,
        init: Vec<StateId>,
    ) -> Self {
        StateGraph { width, arena, succ_off, succ, pred: OnceLock::new(), init }
    }

    fn pred_parts(&self) -> &(Vec<u64>, Vec<StateId>) {
        self.pred
            .get_or_init(|| transpose(self.num_states(), &self.succ_off, &self.succ))
    }

    pub fn num_states(&self) -> usize {
        self.succ_off.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.succ.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Raw ordinal vector of a state.
    pub fn state(&self, id: StateId) -> &[u16] {
        let w = self.width;
        &self.arena[id as usize * w..(id as usize + 1) * w]
    }

    /// Copies a state out of the arena.
    pub fn global_state(&self, id: StateId) -> GlobalState {
        GlobalState::new(self.state(id).into())
    }

    pub fn successors(&self, id: StateId) -> &[StateId] {
        &self.succ[self.succ_off[id as usize] as usize..self.succ_off[id as usize + 1] as usize]
    }

    pub fn predecessors(&self, id: StateId) -> &[StateId] {
        let (pred_off, pred) = self.pred_parts();
        &pred[pred_off[id as usize] as usize..pred_off[id as usize + 1] as usize]
    }

    /// Initial states; always a single element for valid models.
    pub fn initial_states(&self) -> &[StateId] {
        &self.init
    }

    /// Iterates over all edges in source order.
    pub fn edges(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        (0..self.num_states() as StateId)
            .flat_map(move |s| self.successors(s).iter().map(move |&t| (s, t)))
    }
}

fn transpose(
    num_states: usize,
    succ_off: &[u64],
    succ: &[StateId],
) -> (Vec<u64>, Vec<StateId>) {
    // Past a few million edges the counting sort's random accesses to the
    // count/cursor/pred arrays dominate, so the large path stages edges in
    // per-bucket buffers and flushes them bucket by bucket, keeping each
    // flush inside a cache-resident window of the target arrays.
    if succ.len() >= (1 << 22) && num_states > 1 {
        return transpose_bucketed(num_states, succ_off, succ);
    }
    let mut counts = vec![0u64; num_states + 1];
    for &t in succ {
        counts[t as usize + 1] += 1;
    }
    for i in 0..num_states {
        counts[i + 1] += counts[i];
    }
    let pred_off = counts.clone();
    let mut cursor = counts;
    let mut pred = vec![0 as StateId; succ.len()];
    for s in 0..num_states {
        let (a, b) = (succ_off[s] as usize, succ_off[s + 1] as usize);
        for &t in &succ[a..b] {
            pred[cursor[t as usize] as usize] = s as StateId;
            cursor[t as usize] += 1;
        }
    }
    (pred_off, pred)
}

fn transpose_bucketed(
    num_states: usize,
    succ_off: &[u64],
    succ: &[StateId],
) -> (Vec<u64>, Vec<StateId>) {
    const BUCKET_BITS: u32 = 11;
    const BUF: usize = 128;
    let id_bits = usize::BITS - (num_states - 1).leading_zeros();
    let shift = id_bits.saturating_sub(BUCKET_BITS);
    let n_buckets = ((num_states - 1) >> shift) + 1;

    // Count in-degrees, staging target ids per bucket.
    let mut counts = vec![0u64; num_states + 1];
    let mut buf: Vec<u32> = vec![0; n_buckets * BUF];
    let mut fill: Vec<u32> = vec![0; n_buckets];
    for &t in succ {
        let b = (t as usize) >> shift;
        buf[b * BUF + fill[b] as usize] = t;
        fill[b] += 1;
        if fill[b] as usize == BUF {
            for &x in &buf[b * BUF..(b + 1) * BUF] {
                counts[x as usize + 1] += 1;
            }
            fill[b] = 0;
        }
    }
    for b in 0..n_buckets {
        for &x in &buf[b * BUF..b * BUF + fill[b] as usize] {
            counts[x as usize + 1] += 1;
        }
        fill[b] = 0;
    }
    for i in 0..num_states {
        counts[i + 1] += counts[i];
    }
    let pred_off = counts;

    // Scatter edges, staging (target, source) pairs per bucket.
    let mut cursor: Vec<u64> = pred_off[..num_states].to_vec();
    let mut pred = vec![0 as StateId; succ.len()];
    let mut pairs: Vec<(u32, u32)> = vec![(0, 0); n_buckets * BUF];
    for s in 0..num_states {
        let (a, b) = (succ_off[s] as usize, succ_off[s + 1] as usize);
        for &t in &succ[a..b] {
            let bk = (t as usize) >> shift;
            pairs[bk * BUF + fill[bk] as usize] = (t, s as u32);
            fill[bk] += 1;
            if fill[bk] as usize == BUF {
                for &(t, s) in &pairs[bk * BUF..(bk + 1) * BUF] {
                    pred[cursor[t as usize] as usize] = s;
                    cursor[t as usize] += 1;
                }
                fill[bk] = 0;
            }
        }
    }
    for bk in 0..n_buckets {
        for &(t, s) in &pairs[bk * BUF..bk * BUF + fill[bk] as usize] {
            pred[cursor[t as usize] as usize] = s;
            cursor[t as usize] += 1;
        }
    }
    (pred_off, pred)
}

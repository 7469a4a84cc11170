//! Synchronous composition and reachable-state-graph construction.
//!
//! On every tick each agent takes exactly one enabled move. The moves of an
//! agent in a state are derived from the enabled rules of the lowest priority
//! tier that has a true guard; if no guard is true the agent takes the
//! stutter move. The successors of a state are all combinations of one move
//! per agent, applied simultaneously to the current values.
//!
//! Moves are normalized to full local snapshots: a move is the complete
//! vector of the agent's variable values after the rule fires, with
//! unassigned variables carried through. Two rules with the same net effect
//! therefore collapse into one move, and — since distinct moves of an agent
//! differ in at least one of its slots — distinct move combinations always
//! produce distinct successor states. Successor lists need no deduplication
//! and edge counts are exact.
//!
//! An agent's moves depend only on the slots its rules read plus its own
//! slots (the carried-through values), so move sets are cached per agent,
//! keyed by the mixed-radix encoding of that support. On models with many
//! states per support combination this removes almost all guard evaluation
//! from the exploration loop.

use crate::compile::CAssign;
use crate::expr::Value;
use crate::model::{CompiledAgent, Model};
use crate::state::{GlobalState, StateGraph, StateId};
use std::hash::BuildHasher;
use thiserror::Error;

/// Errors raised while expanding the transition relation.
#[derive(Debug, Error)]
pub enum BuildError {
    #[error("state limit of {limit} states exceeded")]
    StateLimitExceeded { limit: usize },
    #[error("assignment drives {agent}.{var} to {value}, outside its domain")]
    DomainViolation { agent: String, var: String, value: i64 },
}

/// One move of one agent: the agent's local variable values after the move.
/// Variables the firing rule leaves unassigned keep their current value; the
/// stutter move is the identity snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    /// Pairs of variable name (within the agent) and its post-move value.
    pub values: Vec<(String, Value)>,
}

/// Evaluates the enabled move snapshots of `agent` (occupying slots
/// `lo..hi`) against current values `s`, appending them to `out` as
/// consecutive `hi - lo` wide tuples. Moves keep rule declaration order
/// within the winning tier; duplicate snapshots are dropped. Returns the
/// number of moves appended; at least one (the stutter fallback).
fn eval_agent_moves(
    model: &Model,
    agent: &CompiledAgent,
    (lo, hi): (u32, u32),
    s: &[u16],
    out: &mut Vec<u16>,
) -> Result<usize, BuildError> {
    let w = (hi - lo) as usize;
    let region = out.len();
    let mut count = 0usize;
    for (_prio, rules) in &agent.tiers {
        for rule in rules {
            if !rule.guard.eval_bool(s) {
                continue;
            }
            let base = out.len();
            out.extend_from_slice(&s[lo as usize..hi as usize]);
            for assign in &rule.assigns {
                match assign {
                    CAssign::Enum { slot, rhs } => {
                        out[base + (*slot - lo) as usize] = rhs.eval(s) as u16;
                    }
                    CAssign::Int { slot, lo: dlo, hi: dhi, rhs } => {
                        let v = rhs.eval(s);
                        if v < *dlo || v > *dhi {
                            let info = &model.vars()[*slot as usize];
                            out.truncate(base);
                            return Err(BuildError::DomainViolation {
                                agent: info.agent.clone(),
                                var: info.name.clone(),
                                value: v,
                            });
                        }
                        out[base + (*slot - lo) as usize] = (v - dlo) as u16;
                    }
                }
            }
            let dup = (0..count)
                .any(|k| out[region + k * w..region + (k + 1) * w] == out[base..base + w]);
            if dup {
                out.truncate(base);
            } else {
                count += 1;
            }
        }
        if count > 0 {
            break; // lowest tier with a true guard wins
        }
    }
    if count == 0 {
        // Stutter: no guard enabled anywhere.
        out.extend_from_slice(&s[lo as usize..hi as usize]);
        count = 1;
    }
    Ok(count)
}

/// Upper bound on the support-combination count up to which an agent's move
/// sets are cached. Above it the agent is evaluated state by state.
const MEMO_BOUND: u64 = 1 << 20;

/// Move cache for one agent, indexed by the mixed-radix encoding of the
/// values of the agent's support slots.
struct AgentMemo {
    /// `(slot, stride)` per support slot.
    support: Vec<(u32, u32)>,
    /// `(tuple element offset, move count)` per support index;
    /// a count of zero marks an unfilled entry.
    table: Vec<(u32, u32)>,
    /// Move snapshots of all filled entries, back to back.
    tuples: Vec<u16>,
}

fn agent_memos(model: &Model) -> Vec<Option<AgentMemo>> {
    (0..model.agents.len())
        .map(|a| {
            let agent = &model.agents[a];
            let (lo, hi) = model.agent_range(a);
            let mut slots: Vec<u32> = (lo..hi).collect();
            for (_prio, rules) in &agent.tiers {
                for rule in rules {
                    rule.guard.collect_slots(&mut slots);
                    for assign in &rule.assigns {
                        match assign {
                            CAssign::Enum { rhs, .. } => rhs.collect_slots(&mut slots),
                            CAssign::Int { rhs, .. } => rhs.collect_slots(&mut slots),
                        }
                    }
                }
            }
            slots.sort_unstable();
            slots.dedup();
            let mut product: u64 = 1;
            for &slot in &slots {
                product = product.saturating_mul(model.vars()[slot as usize].domain.size());
                if product > MEMO_BOUND {
                    return None;
                }
            }
            let mut support = Vec::with_capacity(slots.len());
            let mut stride: u64 = 1;
            for &slot in &slots {
                support.push((slot, stride as u32));
                stride *= model.vars()[slot as usize].domain.size();
            }
            Some(AgentMemo {
                support,
                table: vec![(0, 0); product as usize],
                tuples: Vec::new(),
            })
        })
        .collect()
}

/// Successor generator for one build: resolves each agent's move set
/// (through its cache where possible) and walks the synchronous product with
/// an incremental odometer that rewrites only the slots of the agent whose
/// chosen move changed.
struct Expander<'m> {
    model: &'m Model,
    memos: Vec<Option<AgentMemo>>,
    /// Tuples of uncached agents, rebuilt per state.
    scratch: Vec<u16>,
    /// Per agent: (move count, start element offset, true if in `scratch`).
    resolved: Vec<(u32, u32, bool)>,
    /// Agents with more than one move in the current state.
    digits: Vec<u32>,
    picks: Vec<u32>,
}

impl<'m> Expander<'m> {
    fn new(model: &'m Model) -> Self {
        let n = model.agents.len();
        Expander {
            model,
            memos: agent_memos(model),
            scratch: Vec::new(),
            resolved: vec![(0, 0, false); n],
            digits: Vec::new(),
            picks: Vec::new(),
        }
    }

    /// Writes move `k` of agent `a` into `child`.
    #[inline]
    fn apply(&self, a: usize, k: usize, child: &mut [u16]) {
        let (lo, hi) = self.model.agent_range(a);
        let w = (hi - lo) as usize;
        let (_, off, scratch) = self.resolved[a];
        let start = off as usize + k * w;
        let src = if scratch {
            &self.scratch[start..start + w]
        } else {
            &self.memos[a].as_ref().unwrap().tuples[start..start + w]
        };
        child[lo as usize..hi as usize].copy_from_slice(src);
    }

    /// Calls `f` with the packed values of every successor of `parent`.
    fn for_each_successor(
        &mut self,
        parent: &[u16],
        child: &mut [u16],
        mut f: impl FnMut(&[u16]) -> Result<(), BuildError>,
    ) -> Result<(), BuildError> {
        let model = self.model;
        let n = model.agents.len();

        self.scratch.clear();
        for a in 0..n {
            let range = model.agent_range(a);
            let agent = &model.agents[a];
            match &mut self.memos[a] {
                Some(memo) => {
                    let mut idx = 0usize;
                    for &(slot, stride) in &memo.support {
                        idx += parent[slot as usize] as usize * stride as usize;
                    }
                    if memo.table[idx].1 == 0 {
                        let start = u32::try_from(memo.tuples.len())
                            .expect("agent move cache exceeded u32 elements");
                        let count =
                            eval_agent_moves(model, agent, range, parent, &mut memo.tuples)?;
                        memo.table[idx] = (start, count as u32);
                    }
                    let (off, count) = memo.table[idx];
                    self.resolved[a] = (count, off, false);
                }
                None => {
                    let start = self.scratch.len() as u32;
                    let count = eval_agent_moves(model, agent, range, parent, &mut self.scratch)?;
                    self.resolved[a] = (count as u32, start, true);
                }
            }
        }

        child.copy_from_slice(parent);
        self.digits.clear();
        for a in 0..n {
            self.apply(a, 0, child);
            if self.resolved[a].0 > 1 {
                self.digits.push(a as u32);
            }
        }
        self.picks.clear();
        self.picks.resize(self.digits.len(), 0);
        loop {
            f(child)?;
            // Odometer over the agents that actually have a choice.
            let mut d = self.digits.len();
            loop {
                if d == 0 {
                    return Ok(());
                }
                d -= 1;
                let a = self.digits[d] as usize;
                self.picks[d] += 1;
                if self.picks[d] < self.resolved[a].0 {
                    self.apply(a, self.picks[d] as usize, child);
                    break;
                }
                self.picks[d] = 0;
                self.apply(a, 0, child);
            }
        }
    }
}

impl Model {
    /// The enabled moves of one agent (by index into `def().agents`) in `state`.
    pub fn enabled_moves(&self, agent: usize, state: &GlobalState) -> Result<Vec<Move>, BuildError> {
        assert!(agent < self.agent_count(), "agent index out of range");
        let (lo, hi) = self.agent_range(agent);
        let w = (hi - lo) as usize;
        let mut tuples = Vec::new();
        let count =
            eval_agent_moves(self, &self.agents[agent], (lo, hi), state.as_slice(), &mut tuples)?;
        let moves = (0..count)
            .map(|k| Move {
                values: (0..w)
                    .map(|j| {
                        let info = &self.vars()[lo as usize + j];
                        (info.name.clone(), info.domain.value(tuples[k * w + j]))
                    })
                    .collect(),
            })
            .collect();
        Ok(moves)
    }

    /// All successors of `state` under synchronous composition, in
    /// move-combination expansion order. Distinct combinations give distinct
    /// states, so the list is duplicate-free by construction.
    pub fn successors(&self, state: &GlobalState) -> Result<Vec<GlobalState>, BuildError> {
        let mut expander = Expander::new(self);
        let mut out: Vec<GlobalState> = Vec::new();
        let mut child = vec![0u16; state.width()];
        expander.for_each_successor(state.as_slice(), &mut child, |vals| {
            out.push(GlobalState::new(vals.to_vec().into_boxed_slice()));
            Ok(())
        })?;
        Ok(out)
    }
}

const EMPTY_ID: u32 = u32::MAX;

#[derive(Clone, Copy)]
struct Slot {
    hash: u64,
    id: u32,
}

enum Probe {
    Found(u32),
    Empty(usize),
}

/// Open-addressing map from packed states (rows of the state arena) to ids,
/// tuned for the build loop: the full hash sits next to the id so a probe
/// usually touches one cache line, and the caller prefetches the bucket as
/// soon as a child's hash is known, well before the probe runs.
struct Interner {
    slots: Vec<Slot>,
    mask: usize,
    len: usize,
}

impl Interner {
    fn new() -> Self {
        let cap = 1 << 16;
        Interner { slots: vec![Slot { hash: 0, id: EMPTY_ID }; cap], mask: cap - 1, len: 0 }
    }

    #[inline]
    fn prefetch(&self, hash: u64) {
        #[cfg(target_arch = "x86_64")]
        unsafe {
            use core::arch::x86_64::{_mm_prefetch, _MM_HINT_T0};
            let i = (hash as usize) & self.mask;
            _mm_prefetch::<_MM_HINT_T0>(self.slots.as_ptr().add(i) as *const i8);
        }
        #[cfg(not(target_arch = "x86_64"))]
        let _ = hash;
    }

    /// Walks the probe chain of `hash` until it finds the id whose arena row
    /// equals `key`, or the empty slot where that key would be inserted.
    #[inline]
    fn probe(&self, hash: u64, key: &[u16], arena: &[u16], width: usize) -> Probe {
        let mut i = (hash as usize) & self.mask;
        loop {
            let s = self.slots[i];
            if s.id == EMPTY_ID {
                return Probe::Empty(i);
            }
            if s.hash == hash {
                let row = s.id as usize * width;
                if &arena[row..row + width] == key {
                    return Probe::Found(s.id);
                }
            }
            i = (i + 1) & self.mask;
        }
    }

    /// Walks the probe chain of `hash` comparing hashes only; returns the
    /// first hash match as `(slot, id)` or the terminating empty slot as
    /// `(slot, EMPTY_ID)`. Lets the caller prefetch the candidate's arena
    /// row before the (usually cache-missing) key comparison.
    #[inline]
    fn probe_candidate(&self, hash: u64) -> (usize, u32) {
        let mut i = (hash as usize) & self.mask;
        loop {
            let s = self.slots[i];
            if s.id == EMPTY_ID || s.hash == hash {
                return (i, s.id);
            }
            i = (i + 1) & self.mask;
        }
    }

    #[inline]
    fn insert_at(&mut self, slot: usize, hash: u64, id: u32) {
        debug_assert_eq!(self.slots[slot].id, EMPTY_ID);
        self.slots[slot] = Slot { hash, id };
        self.len += 1;
    }

    /// Doubles the table when load exceeds 3/4; rehashes by stored hash only.
    fn maybe_grow(&mut self) {
        if self.len * 4 < self.slots.len() * 3 {
            return;
        }
        let new_cap = self.slots.len() * 2;
        let mut slots = vec![Slot { hash: 0, id: EMPTY_ID }; new_cap];
        let mask = new_cap - 1;
        for s in &self.slots {
            if s.id == EMPTY_ID {
                continue;
            }
            let mut i = (s.hash as usize) & mask;
            while slots[i].id != EMPTY_ID {
                i = (i + 1) & mask;
            }
            slots[i] = *s;
        }
        self.slots = slots;
        self.mask = mask;
    }
}

#[inline]
fn prefetch_row(arena: &[u16], row: usize, width: usize) {
    #[cfg(target_arch = "x86_64")]
    unsafe {
        use core::arch::x86_64::{_mm_prefetch, _MM_HINT_T0};
        let p = arena.as_ptr().add(row);
        _mm_prefetch::<_MM_HINT_T0>(p as *const i8);
        // Rows are not cache-line aligned; cover a straddle.
        _mm_prefetch::<_MM_HINT_T0>(p.add(width.saturating_sub(1)) as *const i8);
    }
    #[cfg(not(target_arch = "x86_64"))]
    let _ = (arena, row, width);
}

/// Resolves a batch of child states to ids, interning new ones.
///
/// Requires all keys in the batch to be pairwise distinct (the expander
/// guarantees this for the successors of one parent): the first pass records
/// per key either a hash-matching candidate id or the empty slot it would
/// occupy, so a duplicate key would otherwise be inserted twice. Splitting
/// candidate lookup from the key comparison lets the candidate rows be
/// prefetched as a batch, hiding most of the arena's cache misses.
#[allow(clippy::too_many_arguments)]
fn resolve_chunk(
    table: &mut Interner,
    arena: &mut Vec<u16>,
    succ: &mut Vec<u32>,
    keys: &[u16],
    hashes: &[u64],
    count: usize,
    width: usize,
    limit: usize,
    n_states: &mut u32,
) -> Result<(), BuildError> {
    let mut cand = [(0usize, EMPTY_ID); 64];
    debug_assert!(count <= cand.len());
    for k in 0..count {
        let c = table.probe_candidate(hashes[k]);
        if c.1 != EMPTY_ID {
            prefetch_row(arena, c.1 as usize * width, width);
        }
        cand[k] = c;
    }
    let mut stale = false;
    for k in 0..count {
        let key = &keys[k * width..(k + 1) * width];
        let (slot, id) = cand[k];
        let outcome = if id != EMPTY_ID {
            let row = id as usize * width;
            if &arena[row..row + width] == key {
                Probe::Found(id)
            } else {
                // Same 64-bit hash, different state: finish the chain walk.
                table.probe(hashes[k], key, arena, width)
            }
        } else if stale {
            // An insert grew the table; recorded slots no longer apply.
            table.probe(hashes[k], key, arena, width)
        } else if table.slots[slot].id != EMPTY_ID {
            // An insert from this batch took the recorded slot. The keys in
            // a batch are distinct, so ours is still absent; probe again for
            // the chain's new end.
            table.probe(hashes[k], key, arena, width)
        } else {
            Probe::Empty(slot)
        };
        match outcome {
            Probe::Found(id) => succ.push(id),
            Probe::Empty(slot) => {
                if *n_states as usize >= limit {
                    return Err(BuildError::StateLimitExceeded { limit });
                }
                let id = *n_states;
                arena.extend_from_slice(key);
                table.insert_at(slot, hashes[k], id);
                let cap = table.slots.len();
                table.maybe_grow();
                stale |= table.slots.len() != cap;
                *n_states += 1;
                succ.push(id);
            }
        }
    }
    Ok(())
}

/// Explores the reachable state space breadth-first from the initial state
/// and returns the full graph. Fails with `StateLimitExceeded` as soon as
/// more than `limit` distinct states are discovered.
pub fn build_state_graph(model: &Model, limit: usize) -> Result<StateGraph, BuildError> {
    let width = model.vars().len();
    // State ids are u32; a limit beyond that could never be reached anyway.
    let limit = limit.min(EMPTY_ID as usize - 1);
    let bh = hashbrown::DefaultHashBuilder::default();
    let mut arena: Vec<u16> = Vec::new();
    let mut table = Interner::new();

    let init = model.init_state();
    arena.extend_from_slice(init.as_slice());
    let h = bh.hash_one(init.as_slice());
    match table.probe(h, init.as_slice(), &arena, width) {
        Probe::Empty(slot) => table.insert_at(slot, h, 0),
        Probe::Found(_) => unreachable!("fresh table cannot contain the initial state"),
    }
    let mut n_states: u32 = 1;

    const CHUNK: usize = 64;
    let mut succ_off: Vec<u64> = vec![0];
    let mut succ: Vec<u32> = Vec::new();
    let mut expander = Expander::new(model);
    let mut parent = vec![0u16; width];
    let mut child = vec![0u16; width];
    let mut keys: Vec<u16> = vec![0; CHUNK * width];
    let mut hashes = [0u64; CHUNK];

    let mut next: u32 = 0;
    while next < n_states {
        parent.copy_from_slice(&arena[next as usize * width..(next as usize + 1) * width]);
        next += 1;
        let mut filled = 0usize;
        expander.for_each_successor(&parent, &mut child, |vals| {
            keys[filled * width..(filled + 1) * width].copy_from_slice(vals);
            let h = bh.hash_one(vals);
            hashes[filled] = h;
            table.prefetch(h);
            filled += 1;
            if filled == CHUNK {
                filled = 0;
                return resolve_chunk(
                    &mut table,
                    &mut arena,
                    &mut succ,
                    &keys,
                    &hashes,
                    CHUNK,
                    width,
                    limit,
                    &mut n_states,
                );
            }
            Ok(())
        })?;
        resolve_chunk(
            &mut table,
            &mut arena,
            &mut succ,
            &keys,
            &hashes,
            filled,
            width,
            limit,
            &mut n_states,
        )?;
        succ_off.push(succ.len() as u64);
    }

    arena.shrink_to_fit();
    succ.shrink_to_fit();
    Ok(StateGraph::from_parts(width, arena, succ_off, succ, vec![0 as StateId]))
}

//! CTL satisfaction-set engine and counterexample extraction.
//!
//! The engine labels states bottom-up over the base form `true`, atoms,
//! `not`, `and`, `EX`, `E[_ U _]`, `EG`; formulas are normalized into that
//! form first. `EX` is computed as a union of predecessors, `EU` as a
//! backward worklist fixpoint, and `EG` with the successor-counting
//! greatest-fixpoint algorithm, so every operator is linear in the number
//! of edges.

use crate::bitset::BitSet;
use crate::compile::CExpr;
use crate::ctl::Ctl;
use crate::expr::Expr;
use crate::model::{Model, ValidationError};
use crate::state::{StateGraph, StateId};
use std::collections::VecDeque;
use thiserror::Error;

/// The verdict for one named formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    /// True when every initial state satisfies the formula.
    pub holds: bool,
    /// Number of reachable states satisfying the formula.
    pub sat_count: usize,
    /// Counterexample for failed formulas in the supported `AG` fragment.
    pub trace: Option<Trace>,
}

/// A finite counterexample path starting in an initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    /// Path through the state graph; consecutive entries are transitions.
    pub states: Vec<StateId>,
    /// Index into `states` of the state where the invariant breaks.
    pub violating_step: usize,
}

/// Why no counterexample trace was produced.
#[derive(Debug, Error)]
pub enum TraceError {
    #[error("formula holds in all initial states; no counterexample exists")]
    Holds,
    #[error(
        "counterexample extraction supports AG p, AG (p implies q), and \
         AG (p implies AX q) with propositional operands only"
    )]
    Unsupported,
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

/// States with at least one successor in `z`.
fn pre_exists(g: &StateGraph, z: &BitSet) -> BitSet {
    let mut out = BitSet::new(g.num_states());
    for t in z.iter() {
        for &r in g.predecessors(t as StateId) {
            out.insert(r as usize);
        }
    }
    out
}

/// Least fixpoint for `E[p U q]`: grow `q` backwards through `p`-states.
fn eu(g: &StateGraph, p: &BitSet, q: &BitSet) -> BitSet {
    let mut result = q.clone();
    let mut stack: Vec<StateId> = q.iter().map(|s| s as StateId).collect();
    while let Some(t) = stack.pop() {
        for &r in g.predecessors(t) {
            if p.contains(r as usize) && result.insert(r as usize) {
                stack.push(r);
            }
        }
    }
    result
}

/// Greatest fixpoint for `EG p` by successor counting: repeatedly drop
/// `p`-states whose successors have all been dropped.
fn eg(g: &StateGraph, p: &BitSet) -> BitSet {
    let mut alive = p.clone();
    let mut count: Vec<u32> = vec![0; g.num_states()];
    let mut dead: Vec<StateId> = Vec::new();
    for s in p.iter() {
        let c = g
            .successors(s as StateId)
            .iter()
            .filter(|&&t| p.contains(t as usize))
            .count() as u32;
        count[s] = c;
        if c == 0 {
            alive.remove(s);
            dead.push(s as StateId);
        }
    }
    while let Some(s) = dead.pop() {
        for &r in g.predecessors(s) {
            if alive.contains(r as usize) {
                count[r as usize] -= 1;
                if count[r as usize] == 0 {
                    alive.remove(r as usize);
                    dead.push(r);
                }
            }
        }
    }
    alive
}

/// Labels the graph with a base-form formula. Panics on non-base operators;
/// callers normalize first.
fn sat_base(g: &StateGraph, f: &Ctl<BitSet>) -> BitSet {
    match f {
        Ctl::True => BitSet::full(g.num_states()),
        Ctl::Atom(s) => s.clone(),
        Ctl::Not(p) => sat_base(g, p).complement(),
        Ctl::And(p, q) => {
            let mut a = sat_base(g, p);
            a.intersect_with(&sat_base(g, q));
            a
        }
        Ctl::Ex(p) => pre_exists(g, &sat_base(g, p)),
        Ctl::Eu(p, q) => eu(g, &sat_base(g, p), &sat_base(g, q)),
        Ctl::Eg(p) => eg(g, &sat_base(g, p)),
        _ => panic!("sat_base requires a base-form formula"),
    }
}

/// Satisfaction set of a formula whose atoms are already state sets.
pub fn sat_sets(g: &StateGraph, f: &Ctl<BitSet>) -> BitSet {
    sat_base(g, &f.normalize())
}

/// States of `g` satisfying a compiled boolean expression.
fn atom_set(g: &StateGraph, e: &CExpr) -> BitSet {
    let mut out = BitSet::new(g.num_states());
    for id in 0..g.num_states() {
        if e.eval_bool(g.state(id as StateId)) {
            out.insert(id);
        }
    }
    out
}

/// Satisfaction set of `f` over the reachable graph of `model`.
pub fn sat(model: &Model, g: &StateGraph, f: &Ctl<Expr>) -> Result<BitSet, ValidationError> {
    let compiled = f.try_map_atoms(&mut |e| model.compile_bool_expr(e))?;
    let sets = compiled.map_atoms(&mut |ce| atom_set(g, ce));
    Ok(sat_sets(g, &sets))
}

fn check_sets(g: &StateGraph, name: &str, sets: &Ctl<BitSet>) -> CheckOutcome {
    let satset = sat_sets(g, sets);
    let holds = g.initial_states().iter().all(|&s| satset.contains(s as usize));
    let trace = if holds { None } else { extract_trace(g, sets).ok() };
    CheckOutcome { name: name.to_string(), holds, sat_count: satset.count(), trace }
}

/// Checks one formula (not necessarily declared in the model).
pub fn check(
    model: &Model,
    g: &StateGraph,
    name: &str,
    body: &Ctl<Expr>,
) -> Result<CheckOutcome, ValidationError> {
    let compiled = body.try_map_atoms(&mut |e| model.compile_bool_expr(e))?;
    let sets = compiled.map_atoms(&mut |ce| atom_set(g, ce));
    Ok(check_sets(g, name, &sets))
}

/// Checks every formula declared in the model, in declaration order.
pub fn check_all(model: &Model, g: &StateGraph) -> Vec<CheckOutcome> {
    model
        .compiled_formulas
        .iter()
        .map(|cf| {
            let sets = cf.ctl.map_atoms(&mut |ce| atom_set(g, ce));
            check_sets(g, &cf.name, &sets)
        })
        .collect()
}

/// Extracts a counterexample for a failed formula in the `AG` fragment.
pub fn counterexample(
    model: &Model,
    g: &StateGraph,
    body: &Ctl<Expr>,
) -> Result<Trace, TraceError> {
    let compiled = body.try_map_atoms(&mut |e| model.compile_bool_expr(e))?;
    let sets = compiled.map_atoms(&mut |ce| atom_set(g, ce));
    let satset = sat_sets(g, &sets);
    if g.initial_states().iter().all(|&s| satset.contains(s as usize)) {
        return Err(TraceError::Holds);
    }
    extract_trace(g, &sets)
}

/// Satisfaction set of a propositional (state-only) formula, or None if the
/// formula contains a temporal operator.
fn prop_set(g: &StateGraph, f: &Ctl<BitSet>) -> Option<BitSet> {
    Some(match f {
        Ctl::True => BitSet::full(g.num_states()),
        Ctl::Atom(s) => s.clone(),
        Ctl::Not(p) => prop_set(g, p)?.complement(),
        Ctl::And(p, q) => {
            let mut a = prop_set(g, p)?;
            a.intersect_with(&prop_set(g, q)?);
            a
        }
        Ctl::Or(p, q) => {
            let mut a = prop_set(g, p)?;
            a.union_with(&prop_set(g, q)?);
            a
        }
        Ctl::Implies(p, q) => {
            let mut a = prop_set(g, p)?.complement();
            a.union_with(&prop_set(g, q)?);
            a
        }
        _ => return None,
    })
}

/// Supported shapes: `AG p`, `AG (p implies q)`, `AG (p implies AX q)`,
/// with `p`, `q` propositional. The trace is a shortest path from the
/// initial state to a state violating the invariant; for the `AX` shape it
/// is extended by one successor violating `q`.
fn extract_trace(g: &StateGraph, f: &Ctl<BitSet>) -> Result<Trace, TraceError> {
    let Ctl::Ag(inner) = f else {
        return Err(TraceError::Unsupported);
    };

    if let Ctl::Implies(p, rest) = &**inner {
        if let Ctl::Ax(q) = &**rest {
            let (Some(ps), Some(qs)) = (prop_set(g, p), prop_set(g, q)) else {
                return Err(TraceError::Unsupported);
            };
            let mut viol = pre_exists(g, &qs.complement());
            viol.intersect_with(&ps);
            let mut states = bfs_path(g, &viol).ok_or(TraceError::Holds)?;
            let violating_step = states.len() - 1;
            let last = *states.last().unwrap();
            let bad = g
                .successors(last)
                .iter()
                .copied()
                .find(|&t| !qs.contains(t as usize))
                .expect("violating state has a successor outside q");
            states.push(bad);
            return Ok(Trace { states, violating_step });
        }
    }

    let Some(ok) = prop_set(g, inner) else {
        return Err(TraceError::Unsupported);
    };
    let states = bfs_path(g, &ok.complement()).ok_or(TraceError::Holds)?;
    let violating_step = states.len() - 1;
    Ok(Trace { states, violating_step })
}

/// Shortest path from an initial state to any state in `target`,
/// deterministic under the graph's sorted successor lists.
fn bfs_path(g: &StateGraph, target: &BitSet) -> Option<Vec<StateId>> {
    let n = g.num_states();
    let mut parent: Vec<StateId> = vec![StateId::MAX; n];
    let mut visited = BitSet::new(n);
    let mut queue: VecDeque<StateId> = VecDeque::new();
    for &s in g.initial_states() {
        if visited.insert(s as usize) {
            parent[s as usize] = s;
            if target.contains(s as usize) {
                return Some(vec![s]);
            }
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &t in g.successors(u) {
            if visited.insert(t as usize) {
                parent[t as usize] = u;
                if target.contains(t as usize) {
                    let mut path = vec![t];
                    let mut cur = t;
                    while parent[cur as usize] != cur {
                        cur = parent[cur as usize];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(t);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(StateId, StateId)], init: &[StateId]) -> StateGraph {
        let mut succ_off = vec![0u64];
        let mut succ: Vec<StateId> = Vec::new();
        for s in 0..n as StateId {
            let mut row: Vec<StateId> =
                edges.iter().filter(|e| e.0 == s).map(|e| e.1).collect();
            row.sort_unstable();
            row.dedup();
            succ.extend(row);
            succ_off.push(succ.len() as u64);
        }
        StateGraph::from_parts(1, vec![0u16; n], succ_off, succ, init.to_vec())
    }

    fn set(n: usize, members: &[usize]) -> BitSet {
        let mut s = BitSet::new(n);
        for &m in members {
            s.insert(m);
        }
        s
    }

    #[test]
    fn ex_is_union_of_predecessors() {
        let g = graph(3, &[(0, 1), (1, 2), (2, 2)], &[0]);
        let f = Ctl::ex(Ctl::atom(set(3, &[2])));
        assert_eq!(sat_sets(&g, &f), set(3, &[1, 2]));
    }

    #[test]
    fn eu_grows_backwards_through_p() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 3)], &[0]);
        let f = Ctl::eu(Ctl::atom(set(4, &[1, 2])), Ctl::atom(set(4, &[3])));
        assert_eq!(sat_sets(&g, &f), set(4, &[1, 2, 3]));
    }

    #[test]
    fn eg_needs_an_infinite_p_path() {
        let g = graph(3, &[(0, 1), (1, 2), (2, 2)], &[0]);
        assert_eq!(sat_sets(&g, &Ctl::eg(Ctl::atom(set(3, &[0, 1, 2])))), set(3, &[0, 1, 2]));
        assert_eq!(sat_sets(&g, &Ctl::eg(Ctl::atom(set(3, &[0, 1])))), set(3, &[]));
        assert_eq!(sat_sets(&g, &Ctl::eg(Ctl::atom(set(3, &[2])))), set(3, &[2]));
    }

    #[test]
    fn af_dualizes_eg() {
        // 0 -> {1, 2}; 1 -> 1; 2 -> 2. AF {1} fails at 0 via the path to 2.
        let g = graph(3, &[(0, 1), (0, 2), (1, 1), (2, 2)], &[0]);
        assert_eq!(sat_sets(&g, &Ctl::af(Ctl::atom(set(3, &[1])))), set(3, &[1]));
        assert_eq!(sat_sets(&g, &Ctl::ef(Ctl::atom(set(3, &[1])))), set(3, &[0, 1]));
    }

    #[test]
    fn ag_trace_is_shortest_and_marks_last_step() {
        // 0 -> 1 -> 3, 0 -> 2 -> 3 -> 3; bad = {3}.
        let g = graph(4, &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 3)], &[0]);
        let f = Ctl::ag(Ctl::atom(set(4, &[0, 1, 2])));
        let tr = extract_trace(&g, &f).unwrap();
        assert_eq!(tr.states, vec![0, 1, 3]);
        assert_eq!(tr.violating_step, 2);
    }

    #[test]
    fn ag_implies_ax_trace_appends_witness_successor() {
        // 0 -> 1, 1 -> {2, 3}, 2 -> 2, 3 -> 3. p = {1}, q = {2}.
        let g = graph(4, &[(0, 1), (1, 2), (1, 3), (2, 2), (3, 3)], &[0]);
        let f = Ctl::ag(Ctl::implies(
            Ctl::atom(set(4, &[1])),
            Ctl::ax(Ctl::atom(set(4, &[2]))),
        ));
        let tr = extract_trace(&g, &f).unwrap();
        assert_eq!(tr.states, vec![0, 1, 3]);
        assert_eq!(tr.violating_step, 1);
    }

    #[test]
    fn nested_temporal_shapes_are_unsupported() {
        let g = graph(2, &[(0, 1), (1, 1)], &[0]);
        let f = Ctl::ag(Ctl::ef(Ctl::atom(set(2, &[1]))));
        assert!(matches!(extract_trace(&g, &f), Err(TraceError::Unsupported)));
        let g2 = Ctl::ef(Ctl::atom(set(2, &[1])));
        assert!(matches!(extract_trace(&g, &g2), Err(TraceError::Unsupported)));
    }
}

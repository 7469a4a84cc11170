//! Reference CTL evaluator used to cross-check the engine.
//!
//! Deliberately shares nothing with the crate's labeling code: state sets
//! are plain `Vec<bool>`, fixpoints iterate full sweeps until stable, and
//! the universal operators are computed directly from their one-step
//! semantics (`pre_forall`) instead of through the dualities the engine
//! normalizes with.

use kmc::{Ctl, Expr};

/// Formula shape shared by the oracle and the engine-side conversion.
/// Atoms index into a per-corpus list of state sets.
#[derive(Debug, Clone)]
pub enum Formula {
    True,
    False,
    Atom(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Ex(Box<Formula>),
    Ax(Box<Formula>),
    Ef(Box<Formula>),
    Af(Box<Formula>),
    Eg(Box<Formula>),
    Ag(Box<Formula>),
    Eu(Box<Formula>, Box<Formula>),
    Au(Box<Formula>, Box<Formula>),
}

/// States with at least one successor inside `z`.
fn pre_exists(succ: &[Vec<usize>], z: &[bool]) -> Vec<bool> {
    succ.iter().map(|row| row.iter().any(|&t| z[t])).collect()
}

/// States all of whose successors lie inside `z`.
fn pre_forall(succ: &[Vec<usize>], z: &[bool]) -> Vec<bool> {
    succ.iter().map(|row| row.iter().all(|&t| z[t])).collect()
}

fn or(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| *x || *y).collect()
}

fn and(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| *x && *y).collect()
}

fn fixpoint(mut z: Vec<bool>, step: impl Fn(&[bool]) -> Vec<bool>) -> Vec<bool> {
    loop {
        let next = step(&z);
        if next == z {
            return z;
        }
        z = next;
    }
}

/// Satisfaction vector of `f` over a graph given as adjacency lists, with
/// atom `k` denoting the state set `atoms[k]`.
pub fn eval(succ: &[Vec<usize>], atoms: &[Vec<bool>], f: &Formula) -> Vec<bool> {
    let n = succ.len();
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(k) => atoms[*k].clone(),
        Formula::Not(p) => eval(succ, atoms, p).iter().map(|b| !b).collect(),
        Formula::And(p, q) => and(&eval(succ, atoms, p), &eval(succ, atoms, q)),
        Formula::Or(p, q) => or(&eval(succ, atoms, p), &eval(succ, atoms, q)),
        Formula::Implies(p, q) => {
            let np: Vec<bool> = eval(succ, atoms, p).iter().map(|b| !b).collect();
            or(&np, &eval(succ, atoms, q))
        }
        Formula::Ex(p) => pre_exists(succ, &eval(succ, atoms, p)),
        Formula::Ax(p) => pre_forall(succ, &eval(succ, atoms, p)),
        Formula::Ef(p) => {
            let ps = eval(succ, atoms, p);
            fixpoint(vec![false; n], |z| or(&ps, &pre_exists(succ, z)))
        }
        Formula::Af(p) => {
            let ps = eval(succ, atoms, p);
            fixpoint(vec![false; n], |z| or(&ps, &pre_forall(succ, z)))
        }
        Formula::Eg(p) => {
            let ps = eval(succ, atoms, p);
            fixpoint(vec![true; n], |z| and(&ps, &pre_exists(succ, z)))
        }
        Formula::Ag(p) => {
            let ps = eval(succ, atoms, p);
            fixpoint(vec![true; n], |z| and(&ps, &pre_forall(succ, z)))
        }
        Formula::Eu(p, q) => {
            let ps = eval(succ, atoms, p);
            let qs = eval(succ, atoms, q);
            fixpoint(vec![false; n], |z| or(&qs, &and(&ps, &pre_exists(succ, z))))
        }
        Formula::Au(p, q) => {
            let ps = eval(succ, atoms, p);
            let qs = eval(succ, atoms, q);
            fixpoint(vec![false; n], |z| or(&qs, &and(&ps, &pre_forall(succ, z))))
        }
    }
}

/// Translates a shared-shape formula into the engine's CTL type, using
/// `atom_exprs[k]` as the boolean state predicate for atom `k`.
pub fn to_ctl(f: &Formula, atom_exprs: &[Expr]) -> Ctl<Expr> {
    match f {
        Formula::True => Ctl::True,
        Formula::False => Ctl::atom(Expr::bool(false)),
        Formula::Atom(k) => Ctl::atom(atom_exprs[*k].clone()),
        Formula::Not(p) => to_ctl(p, atom_exprs).not(),
        Formula::And(p, q) => to_ctl(p, atom_exprs).and(to_ctl(q, atom_exprs)),
        Formula::Or(p, q) => to_ctl(p, atom_exprs).or(to_ctl(q, atom_exprs)),
        Formula::Implies(p, q) => to_ctl(p, atom_exprs).implies(to_ctl(q, atom_exprs)),
        Formula::Ex(p) => to_ctl(p, atom_exprs).ex(),
        Formula::Ax(p) => to_ctl(p, atom_exprs).ax(),
        Formula::Ef(p) => to_ctl(p, atom_exprs).ef(),
        Formula::Af(p) => to_ctl(p, atom_exprs).af(),
        Formula::Eg(p) => to_ctl(p, atom_exprs).eg(),
        Formula::Ag(p) => to_ctl(p, atom_exprs).ag(),
        Formula::Eu(p, q) => to_ctl(p, atom_exprs).eu(to_ctl(q, atom_exprs)),
        Formula::Au(p, q) => to_ctl(p, atom_exprs).au(to_ctl(q, atom_exprs)),
    }
}

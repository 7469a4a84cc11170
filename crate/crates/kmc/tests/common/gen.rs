//! Deterministic random corpora for the cross-checking suites: small
//! arbitrary graphs encoded as one-agent models, random CTL formulas over
//! indexed atoms, and random multi-agent model sources for format tests.

use super::oracle::Formula;
use kmc::{build_state_graph, load_model, Expr, Model, StateGraph};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random graph driven through the real pipeline: model text, compiled
/// model, built graph, plus atom sets in both engine form (`Expr`
/// predicates) and oracle form (bool vectors indexed by graph state id).
pub struct Corpus {
    pub model: Model,
    pub graph: StateGraph,
    /// Adjacency lists keyed by graph state id, for the oracle.
    pub succ: Vec<Vec<usize>>,
    /// Oracle-side atom sets, one bool per graph state.
    pub atoms: Vec<Vec<bool>>,
    /// Engine-side atom predicates over the encoded `id` variable.
    pub atom_exprs: Vec<Expr>,
}

/// Generates a graph with at most 8 states and 3 atoms, encodes it as a
/// one-agent model (`id` variable, one rule per edge), and builds it.
/// Comparison happens on the fragment reachable from state 0; that fragment
/// is successor-closed, so CTL semantics on it coincide with the full graph.
pub fn random_graph_corpus(rng: &mut impl Rng) -> Corpus {
    let n: usize = rng.gen_range(1..=8);
    let mut text = String::new();
    text.push_str("agent M {\n");
    text.push_str(&format!("  var id : 0..{} init 0;\n", n - 1));
    for s in 0..n {
        let degree = rng.gen_range(1..=3);
        let mut targets: Vec<usize> = (0..degree).map(|_| rng.gen_range(0..n)).collect();
        targets.sort_unstable();
        targets.dedup();
        for t in targets {
            text.push_str(&format!("  rule M.id = {s} -> id := {t};\n"));
        }
    }
    text.push_str("}\n");
    let model = load_model(&text).expect("generated graph model must load");
    let graph = build_state_graph(&model, 100).expect("tiny graph under limit");

    let m = graph.num_states();
    // Graph state ids are discovery-order; recover the encoded original id.
    let original: Vec<usize> = (0..m).map(|s| graph.state(s as u32)[0] as usize).collect();
    let succ: Vec<Vec<usize>> = (0..m)
        .map(|s| graph.successors(s as u32).iter().map(|&t| t as usize).collect())
        .collect();

    let num_atoms = rng.gen_range(1..=3);
    let mut atoms = Vec::new();
    let mut atom_exprs = Vec::new();
    for _ in 0..num_atoms {
        let members: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        atoms.push((0..m).map(|s| members.contains(&original[s])).collect());
        let parts: Vec<Expr> = members
            .iter()
            .map(|&v| Expr::var("M", "id").eq(Expr::int(v as i64)))
            .collect();
        atom_exprs.push(if parts.is_empty() { Expr::bool(false) } else { Expr::any(parts) });
    }
    Corpus { model, graph, succ, atoms, atom_exprs }
}

/// Random CTL formula of the given maximum depth over `num_atoms` atoms.
pub fn random_formula(rng: &mut impl Rng, depth: usize, num_atoms: usize) -> Formula {
    if depth == 0 {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::Atom(rng.gen_range(0..num_atoms)),
        };
    }
    fn sub(rng: &mut impl Rng, depth: usize, num_atoms: usize) -> Box<Formula> {
        Box::new(random_formula(rng, depth - 1, num_atoms))
    }
    match rng.gen_range(0..14) {
        0 => random_formula(rng, 0, num_atoms),
        1 => Formula::Not(sub(rng, depth, num_atoms)),
        2 => Formula::And(sub(rng, depth, num_atoms), sub(rng, depth, num_atoms)),
        3 => Formula::Or(sub(rng, depth, num_atoms), sub(rng, depth, num_atoms)),
        4 => Formula::Implies(sub(rng, depth, num_atoms), sub(rng, depth, num_atoms)),
        5 => Formula::Ex(sub(rng, depth, num_atoms)),
        6 => Formula::Ax(sub(rng, depth, num_atoms)),
        7 => Formula::Ef(sub(rng, depth, num_atoms)),
        8 => Formula::Af(sub(rng, depth, num_atoms)),
        9 => Formula::Eg(sub(rng, depth, num_atoms)),
        10 => Formula::Ag(sub(rng, depth, num_atoms)),
        11 => Formula::Eu(sub(rng, depth, num_atoms), sub(rng, depth, num_atoms)),
        _ => Formula::Au(sub(rng, depth, num_atoms), sub(rng, depth, num_atoms)),
    }
}

#[derive(Clone)]
enum Dom {
    Int { lo: i64, hi: i64 },
    Enum { members: Vec<String> },
}

/// A randomly shaped but well-scoped model source, exercising enum and
/// integer domains, defines, priorities, multi-assignment rules, operator
/// nesting, and formulas. The text is intentionally not in canonical layout
/// (extra parentheses and uneven spacing), so formatting it is a real test.
pub fn random_model_text(rng: &mut impl Rng) -> String {
    let agent_names = ["M", "N", "P", "Q"];
    let var_names = ["x", "y", "z"];
    let num_agents = rng.gen_range(1..=3);
    let mut enum_counter = 0;

    // One declared variable: (name, domain, initial value).
    type VarShape = (String, Dom, String);

    // (agent, var, domain) for every declared variable, for scoped references.
    let mut decls: Vec<(String, String, Dom)> = Vec::new();
    let mut shapes: Vec<(String, Vec<VarShape>)> = Vec::new();
    for agent_name in agent_names.iter().take(num_agents) {
        let agent = agent_name.to_string();
        let num_vars = rng.gen_range(1..=3);
        let mut vars = Vec::new();
        for var_name in var_names.iter().take(num_vars) {
            let name = var_name.to_string();
            let (dom, init) = if rng.gen_bool(0.5) {
                let lo = rng.gen_range(-3..=0);
                let hi = lo + rng.gen_range(1..=5);
                (Dom::Int { lo, hi }, rng.gen_range(lo..=hi).to_string())
            } else {
                let k = rng.gen_range(2..=4);
                let members: Vec<String> =
                    (0..k).map(|i| format!("m{}", enum_counter + i)).collect();
                enum_counter += k;
                let init = members[rng.gen_range(0..members.len())].clone();
                (Dom::Enum { members }, init)
            };
            decls.push((agent.clone(), name.clone(), dom.clone()));
            vars.push((name, dom, init));
        }
        shapes.push((agent, vars));
    }

    let mut text = String::new();
    for (agent, vars) in &shapes {
        text.push_str(&format!("agent {agent} {{\n"));
        for (name, dom, init) in vars {
            match dom {
                Dom::Int { lo, hi } => {
                    text.push_str(&format!("  var {name} : {lo}..{hi} init {init};\n"))
                }
                Dom::Enum { members } => text.push_str(&format!(
                    "  var {name} : {{{}}} init {init};\n",
                    members.join(", ")
                )),
            }
        }
        for _ in 0..rng.gen_range(0..=3) {
            let prio = if rng.gen_bool(0.2) {
                format!("[prio {}] ", rng.gen_range(0..=2))
            } else {
                String::new()
            };
            let guard = bool_expr(rng, &decls, 2);
            let n_assign = rng.gen_range(1..=vars.len());
            let mut idx: Vec<usize> = (0..vars.len()).collect();
            idx.shuffle(rng);
            let assigns: Vec<String> = idx[..n_assign]
                .iter()
                .map(|&i| {
                    let (name, dom, _) = &vars[i];
                    format!("{name} := {}", rhs_expr(rng, &decls, dom))
                })
                .collect();
            text.push_str(&format!("  rule {prio}{guard} -> {};\n", assigns.join(", ")));
        }
        text.push_str("}\n\n");
    }
    for d in 0..rng.gen_range(0..=2) {
        text.push_str(&format!("define d{d} := {};\n", bool_expr(rng, &decls, 2)));
    }
    for f in 0..rng.gen_range(0..=2) {
        text.push_str(&format!("formula f{f} := {};\n", ctl_text(rng, &decls, 2)));
    }
    text
}

fn atom_text(rng: &mut impl Rng, decls: &[(String, String, Dom)]) -> String {
    let (agent, var, dom) = &decls[rng.gen_range(0..decls.len())];
    match dom {
        Dom::Int { lo, hi } => {
            let op = ["=", "!=", "<", "<=", ">", ">="][rng.gen_range(0..6)];
            format!("{agent}.{var} {op} {}", rng.gen_range(*lo..=*hi))
        }
        Dom::Enum { members } => {
            let op = ["=", "!="][rng.gen_range(0..2)];
            format!("{agent}.{var} {op} {}", members[rng.gen_range(0..members.len())])
        }
    }
}

fn bool_expr(rng: &mut impl Rng, decls: &[(String, String, Dom)], depth: usize) -> String {
    if depth == 0 || rng.gen_bool(0.4) {
        return match rng.gen_range(0..8) {
            0 => "true".to_string(),
            1 => "false".to_string(),
            _ => atom_text(rng, decls),
        };
    }
    let a = bool_expr(rng, decls, depth - 1);
    let b = bool_expr(rng, decls, depth - 1);
    match rng.gen_range(0..4) {
        0 => format!("not ({a})"),
        1 => format!("({a} and {b})"),
        2 => format!("({a} or {b})"),
        _ => format!("({a} -> {b})"),
    }
}

fn int_term(rng: &mut impl Rng, decls: &[(String, String, Dom)], depth: usize) -> String {
    let int_vars: Vec<&(String, String, Dom)> =
        decls.iter().filter(|(_, _, d)| matches!(d, Dom::Int { .. })).collect();
    if depth == 0 || rng.gen_bool(0.5) {
        if !int_vars.is_empty() && rng.gen_bool(0.6) {
            let (agent, var, _) = int_vars[rng.gen_range(0..int_vars.len())];
            return format!("{agent}.{var}");
        }
        return rng.gen_range(-3..=3).to_string();
    }
    let a = int_term(rng, decls, depth - 1);
    let b = int_term(rng, decls, depth - 1);
    match rng.gen_range(0..5) {
        0 => format!("({a} + {b})"),
        1 => format!("({a} - {b})"),
        2 => format!("min({a}, {b})"),
        3 => format!("max({a}, {b})"),
        _ => format!("-({a})"),
    }
}

/// Right-hand side matching the target domain; integer updates are clamped
/// into the domain so generated models build cleanly too.
fn rhs_expr(rng: &mut impl Rng, decls: &[(String, String, Dom)], dom: &Dom) -> String {
    match dom {
        Dom::Int { lo, hi } => format!("clamp({}, {lo}, {hi})", int_term(rng, decls, 1)),
        Dom::Enum { members } => members[rng.gen_range(0..members.len())].clone(),
    }
}

fn ctl_text(rng: &mut impl Rng, decls: &[(String, String, Dom)], depth: usize) -> String {
    if depth == 0 {
        return atom_text(rng, decls);
    }
    let a = ctl_text(rng, decls, depth - 1);
    let b = ctl_text(rng, decls, depth - 1);
    match rng.gen_range(0..11) {
        0 => format!("not ({a})"),
        1 => format!("({a} and {b})"),
        2 => format!("({a} or {b})"),
        3 => format!("({a} -> {b})"),
        4 => format!("EX({a})"),
        5 => format!("AX({a})"),
        6 => format!("EF({a})"),
        7 => format!("AF({a})"),
        8 => format!("EG({a})"),
        9 => format!("AG({a})"),
        _ => {
            if rng.gen_bool(0.5) {
                format!("E[({a}) U ({b})]")
            } else {
                format!("A[({a}) U ({b})]")
            }
        }
    }
}

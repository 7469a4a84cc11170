//! Randomized properties of the parser, printer, engine, and trace
//! extraction. Every case is derived from a seed, so any failure proptest
//! reports reproduces exactly.

mod common;

use common::{gen, oracle};
use kmc::{counterexample, parse_model, sat, Ctl, TraceError};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    /// Formatting a model and parsing the result is a structural fixpoint,
    /// and formatting is idempotent on its own output.
    #[test]
    fn formatted_models_reparse_identically(seed: u64) {
        let mut rng = gen::rng(seed);
        let text = gen::random_model_text(&mut rng);
        let def = parse_model(&text).expect("generated models are valid");
        let canon = kmc::format_model(&def);
        let reparsed = parse_model(&canon).expect("canonical text parses");
        prop_assert!(reparsed == def, "round trip changed the tree for:\n{text}");
        prop_assert_eq!(kmc::format_model(&reparsed), canon);
    }

    /// The labeling engine agrees with the naive reference evaluator on
    /// every reachable state, for arbitrary seeds (a rolling complement to
    /// the fixed-corpus acceptance check).
    #[test]
    fn engine_matches_reference_evaluator(seed: u64) {
        let mut rng = gen::rng(seed);
        let corpus = gen::random_graph_corpus(&mut rng);
        for _ in 0..4 {
            let depth = rng.gen_range(0..=3);
            let f = gen::random_formula(&mut rng, depth, corpus.atoms.len());
            let want = oracle::eval(&corpus.succ, &corpus.atoms, &f);
            let got = sat(
                &corpus.model,
                &corpus.graph,
                &oracle::to_ctl(&f, &corpus.atom_exprs),
            )
            .unwrap();
            for (s, &w) in want.iter().enumerate() {
                prop_assert_eq!(got.contains(s), w, "formula {:?}, state {}", f, s);
            }
        }
    }

    /// `EX p` holds exactly in the states with at least one successor in
    /// `p`, checked directly against the adjacency lists.
    #[test]
    fn exists_next_matches_adjacency(seed: u64) {
        let mut rng = gen::rng(seed);
        let corpus = gen::random_graph_corpus(&mut rng);
        for (i, atom) in corpus.atoms.iter().enumerate() {
            let set = sat(
                &corpus.model,
                &corpus.graph,
                &Ctl::ex(Ctl::atom(corpus.atom_exprs[i].clone())),
            )
            .unwrap();
            for s in 0..corpus.graph.num_states() {
                let expect = corpus.succ[s].iter().any(|&t| atom[t]);
                prop_assert_eq!(set.contains(s), expect, "atom {}, state {}", i, s);
            }
        }
    }

    /// A counterexample to `AG p` is a real path: it starts in an initial
    /// state, follows edges, satisfies `p` strictly before the violation,
    /// violates `p` at the end, and is as short as any violating path.
    #[test]
    fn invariant_counterexamples_are_shortest_violating_paths(seed: u64) {
        let mut rng = gen::rng(seed);
        let corpus = gen::random_graph_corpus(&mut rng);
        for (i, atom) in corpus.atoms.iter().enumerate() {
            let body = Ctl::ag(Ctl::atom(corpus.atom_exprs[i].clone()));
            match counterexample(&corpus.model, &corpus.graph, &body) {
                Err(TraceError::Holds) => {
                    // The invariant holds; every reachable state must
                    // satisfy the atom (initial states reach all of them).
                    prop_assert!(atom.iter().all(|&b| b), "atom {} falsified somewhere", i);
                }
                Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {e}"))),
                Ok(trace) => {
                    let path = &trace.states;
                    prop_assert_eq!(trace.violating_step, path.len() - 1);
                    prop_assert!(corpus
                        .graph
                        .initial_states()
                        .contains(&path[0]));
                    for w in path.windows(2) {
                        prop_assert!(
                            corpus.succ[w[0] as usize].contains(&(w[1] as usize)),
                            "trace step {} -> {} is not an edge",
                            w[0],
                            w[1]
                        );
                    }
                    for &s in &path[..path.len() - 1] {
                        prop_assert!(atom[s as usize], "pre-violation state {} fails the atom", s);
                    }
                    prop_assert!(!atom[*path.last().unwrap() as usize]);
                    let dist = bfs_distance_to(&corpus.succ, corpus.graph.initial_states(), atom);
                    prop_assert_eq!(path.len() - 1, dist.expect("a violating state exists"));
                }
            }
        }
    }

    /// Arbitrary input never panics the parser; it is either accepted or
    /// rejected with an error.
    #[test]
    fn parser_rejects_or_accepts_arbitrary_text(text in "\\PC{0,200}") {
        let _ = parse_model(&text);
        let _ = kmc::parse_formula(&text);
    }

    /// Mangling valid model text (truncation, byte substitution) never
    /// panics the parser either.
    #[test]
    fn parser_survives_mangled_models(seed: u64, cut in 0usize..4000, flip in 0usize..4000) {
        let mut rng = gen::rng(seed);
        let text = gen::random_model_text(&mut rng);
        let cut = text
            .char_indices()
            .map(|(i, _)| i)
            .chain([text.len()])
            .nth(cut.min(text.chars().count()))
            .unwrap_or(text.len());
        let _ = parse_model(&text[..cut]);
        let mut bytes = text.into_bytes();
        if !bytes.is_empty() {
            let at = flip % bytes.len();
            bytes[at] = bytes[at].wrapping_add(13);
        }
        if let Ok(mangled) = String::from_utf8(bytes) {
            let _ = parse_model(&mangled);
        }
    }
}

/// Shortest distance from any of `inits` to a state where `atom` is false,
/// over the plain adjacency lists; `None` when every state satisfies it.
fn bfs_distance_to(succ: &[Vec<usize>], inits: &[u32], atom: &[bool]) -> Option<usize> {
    let mut dist = vec![usize::MAX; succ.len()];
    let mut queue = std::collections::VecDeque::new();
    for &s in inits {
        if dist[s as usize] == usize::MAX {
            dist[s as usize] = 0;
            queue.push_back(s as usize);
        }
    }
    while let Some(s) = queue.pop_front() {
        if !atom[s] {
            return Some(dist[s]);
        }
        for &t in &succ[s] {
            if dist[t] == usize::MAX {
                dist[t] = dist[s] + 1;
                queue.push_back(t);
            }
        }
    }
    None
}

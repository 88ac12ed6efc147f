//! Triad census against an oracle built only from the class definitions:
//! each class is given by one representative on vertices {A, B, C}, and a
//! triad's class is found by comparing canonical forms under all six
//! relabelings.

use std::collections::HashMap;

use cfpr::graph::{triad_census, triad_census_brute, TRIAD_NAMES};
use cfpr::rng::rng_from_seed;
use cfpr::DiGraph;
use proptest::prelude::*;
use rand::Rng;

const A: usize = 0;
const B: usize = 1;
const C: usize = 2;

fn representatives() -> Vec<(&'static str, Vec<(usize, usize)>)> {
    vec![
        ("003", vec![]),
        ("012", vec![(A, B)]),
        ("102", vec![(A, B), (B, A)]),
        ("021D", vec![(B, A), (B, C)]),
        ("021U", vec![(A, B), (C, B)]),
        ("021C", vec![(A, B), (B, C)]),
        ("111D", vec![(A, B), (B, A), (C, B)]),
        ("111U", vec![(A, B), (B, A), (B, C)]),
        ("030T", vec![(A, B), (C, B), (A, C)]),
        ("030C", vec![(B, A), (C, B), (A, C)]),
        ("201", vec![(A, B), (B, A), (B, C), (C, B)]),
        ("120D", vec![(B, A), (B, C), (A, C), (C, A)]),
        ("120U", vec![(A, B), (C, B), (A, C), (C, A)]),
        ("120C", vec![(A, B), (B, C), (A, C), (C, A)]),
        ("210", vec![(A, B), (B, C), (C, B), (A, C), (C, A)]),
        ("300", vec![(A, B), (B, A), (B, C), (C, B), (A, C), (C, A)]),
    ]
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Smallest 6-bit adjacency code over relabelings.
fn canonical(arcs: &[(usize, usize)]) -> u32 {
    let bit = |a: usize, b: usize| -> u32 {
        // fixed enumeration of the 6 ordered pairs
        [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]
            .iter()
            .position(|&p| p == (a, b))
            .unwrap() as u32
    };
    PERMS
        .iter()
        .map(|p| arcs.iter().map(|&(a, b)| 1 << bit(p[a], p[b])).sum())
        .min()
        .unwrap()
}

fn oracle_table() -> HashMap<u32, &'static str> {
    let table: HashMap<u32, &'static str> = representatives()
        .into_iter()
        .map(|(name, arcs)| (canonical(&arcs), name))
        .collect();
    assert_eq!(table.len(), 16, "class representatives must be pairwise non-isomorphic");
    table
}

fn oracle_census(g: &DiGraph) -> [u64; 16] {
    let table = oracle_table();
    let mut counts = [0u64; 16];
    let n = g.n_vertices();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let vs = [i, j, k];
                let mut arcs = Vec::new();
                for a in 0..3 {
                    for b in 0..3 {
                        if a != b && g.has_edge(vs[a], vs[b]) {
                            arcs.push((a, b));
                        }
                    }
                }
                let name = table[&canonical(&arcs)];
                counts[TRIAD_NAMES.iter().position(|&t| t == name).unwrap()] += 1;
            }
        }
    }
    counts
}

#[test]
fn every_labeled_triad_is_classified() {
    // all 64 labeled digraphs on three vertices fall into the 16 classes
    let table = oracle_table();
    let mut sizes: HashMap<&str, usize> = HashMap::new();
    for mask in 0u32..64 {
        let pairs = [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)];
        let arcs: Vec<_> = (0..6).filter(|b| mask >> b & 1 == 1).map(|b| pairs[b]).collect();
        *sizes.entry(table[&canonical(&arcs)]).or_default() += 1;
    }
    let expect = [
        ("003", 1),
        ("012", 6),
        ("102", 3),
        ("021D", 3),
        ("021U", 3),
        ("021C", 6),
        ("111D", 6),
        ("111U", 6),
        ("030T", 6),
        ("030C", 2),
        ("201", 3),
        ("120D", 3),
        ("120U", 3),
        ("120C", 6),
        ("210", 6),
        ("300", 1),
    ];
    for (name, size) in expect {
        assert_eq!(sizes[name], size, "{name}");
    }
}

#[test]
fn representatives_match_the_census() {
    for (name, arcs) in representatives() {
        let g = DiGraph::from_edges(3, arcs).unwrap();
        let c = triad_census(&g).unwrap();
        assert_eq!(c.get(name), Some(1), "{name}: {:?}", c.counts);
        assert_eq!(c.total(), 1);
    }
}

fn random_graph(n: usize, p: f64, seed: u64) -> DiGraph {
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    DiGraph::from_edges(n, edges).unwrap()
}

#[test]
fn scan_matches_oracle_on_random_graphs() {
    for (k, &p) in [0.02, 0.1, 0.3, 0.6, 0.9].iter().enumerate() {
        let g = random_graph(25, p, k as u64);
        let want = oracle_census(&g);
        assert_eq!(triad_census(&g).unwrap().counts, want, "p = {p}");
        assert_eq!(triad_census_brute(&g).unwrap().counts, want, "p = {p}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scan_matches_oracle(n in 3usize..12, p in 0.0f64..1.0, seed in any::<u64>()) {
        let g = random_graph(n, p, seed);
        prop_assert_eq!(triad_census(&g).unwrap().counts, oracle_census(&g));
    }

    #[test]
    fn census_is_relabeling_invariant(n in 3usize..15, p in 0.0f64..0.6, seed in any::<u64>()) {
        let g = random_graph(n, p, seed);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left(seed as usize % n);
        perm.swap(0, n - 1);
        let h = g.relabel(&perm).unwrap();
        prop_assert_eq!(triad_census(&g).unwrap(), triad_census(&h).unwrap());
    }
}

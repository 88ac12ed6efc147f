use serde::{Deserialize, Serialize};

use super::DiGraph;
use crate::{Error, Result};

/// Davis–Leinhardt (MAN) triad class labels, in census order.
pub const TRIAD_NAMES: [&str; 16] = [
    "003", "012", "102", "021D", "021U", "021C", "111D", "111U", "030T", "030C", "201", "120D",
    "120U", "120C", "210", "300",
];

// Class index (1-based into TRIAD_NAMES) for each 6-bit triad code; see `tricode`.
const TRICODES: [u8; 64] = [
    1, 2, 2, 3, 2, 4, 6, 8, 2, 6, 5, 7, 3, 8, 7, 11, 2, 6, 4, 8, 5, 9, 9, 13, 6, 10, 9, 14, 7,
    14, 12, 15, 2, 5, 6, 7, 6, 9, 10, 14, 4, 9, 9, 12, 8, 13, 14, 15, 3, 7, 8, 11, 7, 12, 14, 15,
    8, 14, 13, 15, 11, 15, 15, 16,
];

/// Counts of the 16 directed triad isomorphism classes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriadCensus {
    pub counts: [u64; 16],
}

impl TriadCensus {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn get(&self, name: &str) -> Option<u64> {
        TRIAD_NAMES
            .iter()
            .position(|&n| n == name)
            .map(|k| self.counts[k])
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }
}

/// Six-bit code of the triad on `(v, u, w)`: bit 1 `v→u`, 2 `u→v`, 4 `v→w`,
/// 8 `w→v`, 16 `u→w`, 32 `w→u`.
pub fn tricode(g: &DiGraph, v: usize, u: usize, w: usize) -> usize {
    let arcs = [
        (v, u, 1),
        (u, v, 2),
        (v, w, 4),
        (w, v, 8),
        (u, w, 16),
        (w, u, 32),
    ];
    arcs.iter()
        .filter(|&&(a, b, _)| g.has_edge(a, b))
        .map(|&(_, _, bit)| bit)
        .sum()
}

fn class_of(code: usize) -> usize {
    TRICODES[code] as usize - 1
}

fn choose3(n: u64) -> u64 {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Triad census by the Batagelj–Mrvar neighbourhood scan: only triads with
/// at least one edge are visited; the empty class is filled in by subtraction.
/// Runs in O(m Δ) for m edges and maximum total degree Δ.
pub fn triad_census(g: &DiGraph) -> Result<TriadCensus> {
    let n = g.n_vertices();
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    let nbrs: Vec<Vec<u32>> = (0..n)
        .map(|v| {
            let mut s: Vec<u32> = g
                .out_neighbors(v)
                .iter()
                .chain(g.in_neighbors(v))
                .copied()
                .collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    let adjacent = |a: usize, b: usize| g.has_edge(a, b) || g.has_edge(b, a);

    let mut counts = [0u64; 16];
    let mut joint: Vec<u32> = Vec::new();
    for v in 0..n {
        for &u in &nbrs[v] {
            let u = u as usize;
            if u <= v {
                continue;
            }
            joint.clear();
            joint.extend(
                nbrs[v]
                    .iter()
                    .chain(&nbrs[u])
                    .copied()
                    .filter(|&w| w as usize != u && w as usize != v),
            );
            joint.sort_unstable();
            joint.dedup();
            for &w in &joint {
                let w = w as usize;
                if u < w || (v < w && w < u && !adjacent(v, w)) {
                    counts[class_of(tricode(g, v, u, w))] += 1;
                }
            }
            let isolated = (n - joint.len() - 2) as u64;
            if g.has_edge(u, v) && g.has_edge(v, u) {
                counts[2] += isolated;
            } else {
                counts[1] += isolated;
            }
        }
    }
    let connected: u64 = counts.iter().sum();
    counts[0] = choose3(n as u64) - connected;
    Ok(TriadCensus { counts })
}

/// Triad census by enumerating every vertex triple. O(N³); kept as a
/// reference path for testing the scan above.
pub fn triad_census_brute(g: &DiGraph) -> Result<TriadCensus> {
    let n = g.n_vertices();
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    let mut counts = [0u64; 16];
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                counts[class_of(tricode(g, a, b, c))] += 1;
            }
        }
    }
    Ok(TriadCensus { counts })
}

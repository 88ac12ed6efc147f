//! Directed graphs and the census statistics the rest of the crate consumes.

mod io;
mod triad;

use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use io::{parse_edge_list, read_edge_list, write_edge_list, EdgeListFile};
pub use triad::{triad_census, triad_census_brute, tricode, TriadCensus, TRIAD_NAMES};

/// Simple directed graph on vertices `0..n`: no self-loops, no multi-edges.
///
/// Edges live in an insertion-ordered set so that membership, insertion,
/// removal and uniform edge selection are all O(1); per-vertex in- and
/// out-neighbour lists are kept alongside for neighbourhood scans.
#[derive(Clone, Debug)]
pub struct DiGraph {
    n: usize,
    edges: IndexSet<(u32, u32), FxBuildHasher>,
    out: Vec<Vec<u32>>,
    inc: Vec<Vec<u32>>,
}

impl DiGraph {
    pub fn new(n: usize) -> Self {
        assert!(n <= u32::MAX as usize, "vertex ids are 32-bit");
        DiGraph {
            n,
            edges: IndexSet::default(),
            out: vec![Vec::new(); n],
            inc: vec![Vec::new(); n],
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = DiGraph::new(n);
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    /// Every ordered pair present.
    pub fn complete(n: usize) -> Self {
        let mut g = DiGraph::new(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    g.insert(i as u32, j as u32);
                }
            }
        }
        g
    }

    #[inline]
    pub fn n_vertices(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of unordered vertex pairs, N(N-1)/2.
    pub fn n_dyads(&self) -> u64 {
        dyad_count(self.n)
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.edges.contains(&(i as u32, j as u32))
    }

    /// Adds `(i, j)`; returns `false` if it was already present.
    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<bool> {
        self.check_pair(i, j)?;
        Ok(self.insert(i as u32, j as u32))
    }

    /// Removes `(i, j)`; returns `false` if it was absent.
    pub fn remove_edge(&mut self, i: usize, j: usize) -> bool {
        if i >= self.n || j >= self.n {
            return false;
        }
        self.delete(i as u32, j as u32)
    }

    /// Edges in storage order. The order is deterministic for a given
    /// sequence of insertions and removals.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|&(i, j)| (i as usize, j as usize))
    }

    /// The `k`-th stored edge, for uniform edge selection.
    #[inline]
    pub fn edge_at(&self, k: usize) -> Option<(usize, usize)> {
        self.edges.get_index(k).map(|&(i, j)| (i as usize, j as usize))
    }

    pub fn out_neighbors(&self, i: usize) -> &[u32] {
        &self.out[i]
    }

    pub fn in_neighbors(&self, i: usize) -> &[u32] {
        &self.inc[i]
    }

    /// Edges sorted lexicographically; convenient for comparisons.
    pub fn sorted_edges(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.edges().collect();
        v.sort_unstable();
        v
    }

    /// Graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::param("permutation length must equal vertex count"));
        }
        DiGraph::from_edges(self.n, self.edges().map(|(i, j)| (perm[i], perm[j])))
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        for v in [i, j] {
            if v >= self.n {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn insert(&mut self, i: u32, j: u32) -> bool {
        debug_assert!(i != j);
        if !self.edges.insert((i, j)) {
            return false;
        }
        self.out[i as usize].push(j);
        self.inc[j as usize].push(i);
        true
    }

    #[inline]
    pub(crate) fn delete(&mut self, i: u32, j: u32) -> bool {
        if !self.edges.swap_remove(&(i, j)) {
            return false;
        }
        swap_remove_value(&mut self.out[i as usize], j);
        swap_remove_value(&mut self.inc[j as usize], i);
        true
    }
}

impl PartialEq for DiGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.edges.len() == other.edges.len()
            && self.edges.iter().all(|e| other.edges.contains(e))
    }
}

impl Eq for DiGraph {}

fn swap_remove_value(v: &mut Vec<u32>, x: u32) {
    if let Some(p) = v.iter().position(|&y| y == x) {
        v.swap_remove(p);
    }
}

pub(crate) fn dyad_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Counts of mutual, asymmetric and null unordered pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadCensus {
    pub mutual: u64,
    pub asym: u64,
    pub null: u64,
}

impl DyadCensus {
    pub fn total(&self) -> u64 {
        self.mutual + self.asym + self.null
    }

    /// Checks the census against a vertex count.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.total() != dyad_count(n) {
            return Err(Error::InconsistentCensus {
                mutual: self.mutual,
                asym: self.asym,
                null: self.null,
                n,
            });
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.mutual as f64, self.asym as f64, self.null as f64]
    }
}

pub fn dyad_census(g: &DiGraph) -> DyadCensus {
    let mut reciprocated = 0u64;
    for (i, j) in g.edges() {
        if g.has_edge(j, i) {
            reciprocated += 1;
        }
    }
    let mutual = reciprocated / 2;
    let asym = g.n_edges() as u64 - reciprocated;
    DyadCensus {
        mutual,
        asym,
        null: g.n_dyads() - mutual - asym,
    }
}

/// Edge count and mutual-dyad count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuffStats {
    pub t_e: u64,
    pub t_m: u64,
}

pub fn suff_stats(g: &DiGraph) -> SuffStats {
    SuffStats {
        t_e: g.n_edges() as u64,
        t_m: dyad_census(g).mutual,
    }
}

/// Fraction of edges that are reciprocated, `2 t_m / t_e`.
///
/// `None` for a graph without edges, where the quantity is undefined.
pub fn edgewise_reciprocity(g: &DiGraph) -> Option<f64> {
    let s = suff_stats(g);
    reciprocity_from_stats(s.t_e, s.t_m)
}

pub fn reciprocity_from_stats(t_e: u64, t_m: u64) -> Option<f64> {
    (t_e > 0).then(|| 2.0 * t_m as f64 / t_e as f64)
}

/// Mean out-degree (equal to mean in-degree), `t_e / N`.
pub fn mean_degree(g: &DiGraph) -> f64 {
    if g.n_vertices() == 0 {
        return 0.0;
    }
    g.n_edges() as f64 / g.n_vertices() as f64
}

/// Edge density `t_e / (N (N - 1))`.
pub fn density(g: &DiGraph) -> f64 {
    let n = g.n_vertices() as f64;
    if n < 2.0 {
        return 0.0;
    }
    g.n_edges() as f64 / (n * (n - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example() -> DiGraph {
        // (1,2),(2,1),(1,3) on vertices 1..3, shifted to 0-based.
        DiGraph::from_edges(3, [(0, 1), (1, 0), (0, 2)]).unwrap()
    }

    #[test]
    fn rejects_self_loops_and_bad_ids() {
        let mut g = DiGraph::new(3);
        assert!(matches!(g.add_edge(1, 1), Err(Error::SelfLoop(1))));
        assert!(matches!(
            g.add_edge(0, 3),
            Err(Error::VertexOutOfRange { vertex: 3, n: 3 })
        ));
        assert!(g.add_edge(0, 1).unwrap());
        assert!(!g.add_edge(0, 1).unwrap());
        assert_eq!(g.n_edges(), 1);
    }

    #[test]
    fn insert_and_delete_keep_neighbor_lists() {
        let mut g = DiGraph::new(4);
        g.add_edge(0, 1).unwrap();
        g.add_edge(0, 2).unwrap();
        g.add_edge(3, 2).unwrap();
        assert!(g.remove_edge(0, 2));
        assert!(!g.remove_edge(0, 2));
        assert_eq!(g.out_neighbors(0), &[1]);
        assert_eq!(g.in_neighbors(2), &[3]);
        assert_eq!(g.sorted_edges(), vec![(0, 1), (3, 2)]);
    }

    #[test]
    fn dyad_census_examples() {
        let empty = DiGraph::new(5);
        assert_eq!(
            dyad_census(&empty),
            DyadCensus { mutual: 0, asym: 0, null: 10 }
        );
        assert_eq!(
            dyad_census(&DiGraph::complete(3)),
            DyadCensus { mutual: 3, asym: 0, null: 0 }
        );
        assert_eq!(
            dyad_census(&example()),
            DyadCensus { mutual: 1, asym: 1, null: 1 }
        );
        assert_eq!(dyad_census(&DiGraph::new(1)), DyadCensus::default());
    }

    #[test]
    fn suff_stats_examples() {
        assert_eq!(suff_stats(&DiGraph::new(4)), SuffStats { t_e: 0, t_m: 0 });
        assert_eq!(suff_stats(&DiGraph::complete(3)), SuffStats { t_e: 6, t_m: 3 });
        assert_eq!(suff_stats(&example()), SuffStats { t_e: 3, t_m: 1 });
    }

    #[test]
    fn reciprocity_examples() {
        assert_eq!(edgewise_reciprocity(&DiGraph::complete(4)), Some(1.0));
        let star = DiGraph::from_edges(4, [(0, 1), (0, 2), (3, 0)]).unwrap();
        assert_eq!(edgewise_reciprocity(&star), Some(0.0));
        let r = edgewise_reciprocity(&example()).unwrap();
        assert!((r - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(edgewise_reciprocity(&DiGraph::new(5)), None);
    }

    #[test]
    fn mean_degree_examples() {
        assert_eq!(mean_degree(&DiGraph::new(10)), 0.0);
        assert_eq!(mean_degree(&DiGraph::complete(4)), 3.0);
        assert_eq!(mean_degree(&example()), 1.0);
    }

    fn arb_graph() -> impl Strategy<Value = DiGraph> {
        (2usize..12).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..(n * n)).prop_map(move |pairs| {
                DiGraph::from_edges(n, pairs.into_iter().filter(|(i, j)| i != j)).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn census_identities(g in arb_graph()) {
            let c = dyad_census(&g);
            let s = suff_stats(&g);
            prop_assert_eq!(c.total(), g.n_dyads());
            prop_assert_eq!(2 * s.t_m + c.asym, s.t_e);
            prop_assert!(g.edges().all(|(i, j)| i != j));
        }

        #[test]
        fn dyad_census_invariant_under_relabeling(g in arb_graph(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let mut perm: Vec<usize> = (0..g.n_vertices()).collect();
            perm.shuffle(&mut crate::rng::rng_from_seed(seed));
            let h = g.relabel(&perm).unwrap();
            prop_assert_eq!(dyad_census(&g), dyad_census(&h));
        }
    }
}

//! Bin graphs: the undirected simple graphs whose edges are the bin pairs a
//! ball is allowed to choose between, with the generator families used in
//! experiments and exact uniform edge sampling.
//!
//! Complete graphs are kept implicit (degree and edge enumeration are
//! computed, sampling is rejection-free-in-expectation over bin pairs) so
//! that experiments at n = 2^20 do not materialize ~n²/2 edges. Every other
//! family stores an explicit normalized edge list plus a CSR adjacency for
//! degree/neighbor queries.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Resample budget for the pairing-model regular-graph generator.
const PAIRING_RESAMPLE_CAP: u32 = 10_000;

/// Undirected simple graph over bins `0..n`.
///
/// Immutable after construction; safe to share across concurrent trials.
#[derive(Debug, Clone)]
pub struct BinGraph {
    n: usize,
    store: EdgeStore,
}

#[derive(Debug, Clone)]
enum EdgeStore {
    /// Every unordered pair is an edge.
    Complete,
    /// Normalized (u < v) edge list plus CSR adjacency.
    Explicit {
        edges: Vec<(u32, u32)>,
        offsets: Vec<usize>,
        targets: Vec<u32>,
    },
}

impl BinGraph {
    /// Complete graph on `n` bins (all n(n-1)/2 pairs; zero edges for n = 1).
    pub fn complete(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("complete graph needs n >= 1"));
        }
        check_bin_count(n)?;
        Ok(Self {
            n,
            store: EdgeStore::Complete,
        })
    }

    /// Bins on a ring with an edge between every pair at ring distance at
    /// most `delta / 2`; the graph is exactly `delta`-regular.
    ///
    /// `delta` must be even and `2 <= delta <= n - 1`.
    pub fn ring_distance(n: usize, delta: usize) -> Result<Self> {
        check_bin_count(n)?;
        if delta % 2 != 0 {
            return Err(Error::InvalidParameter("ring distance delta must be even"));
        }
        if delta < 2 {
            return Err(Error::InvalidParameter("ring distance delta must be at least 2"));
        }
        if delta >= n {
            return Err(Error::InvalidParameter("ring distance delta must be at most n - 1"));
        }
        let mut edges = Vec::with_capacity(n * delta / 2);
        // k < n/2 because delta <= n-1, so each pair appears exactly once.
        for k in 1..=(delta / 2) {
            for i in 0..n {
                let j = (i + k) % n;
                edges.push(normalize(i as u32, j as u32));
            }
        }
        Ok(Self::explicit_unchecked(n, edges))
    }

    /// Random simple `delta`-regular graph via the pairing model: `delta`
    /// half-edges per bin, paired uniformly; the whole pairing is resampled
    /// on any self-loop or duplicate edge until the graph is simple.
    pub fn random_regular(n: usize, delta: usize, seed: u64) -> Result<Self> {
        check_bin_count(n)?;
        if delta == 0 {
            return Err(Error::InvalidParameter("regular degree must be at least 1"));
        }
        if delta >= n {
            return Err(Error::InvalidParameter("regular degree must be below n"));
        }
        if n.checked_mul(delta).map_or(true, |p| p % 2 != 0) {
            return Err(Error::InvalidParameter("n * delta must be even"));
        }
        let mut rng = SplitMix64::new(seed);
        let mut stubs: Vec<u32> = Vec::with_capacity(n * delta);
        for node in 0..n as u32 {
            for _ in 0..delta {
                stubs.push(node);
            }
        }
        let mut edges: Vec<(u32, u32)> = Vec::with_capacity(n * delta / 2);
        for attempt in 1..=PAIRING_RESAMPLE_CAP {
            rng.shuffle(&mut stubs);
            edges.clear();
            let mut simple = true;
            for pair in stubs.chunks_exact(2) {
                if pair[0] == pair[1] {
                    simple = false;
                    break;
                }
                edges.push(normalize(pair[0], pair[1]));
            }
            if simple {
                edges.sort_unstable();
                simple = !has_adjacent_duplicate(&edges);
            }
            if simple {
                let _ = attempt;
                return Ok(Self::explicit_unchecked(n, core::mem::take(&mut edges)));
            }
        }
        Err(Error::GenerationFailure {
            attempts: PAIRING_RESAMPLE_CAP,
        })
    }

    /// Complete bipartite graph: left bins `0..n-delta`, right bins
    /// `n-delta..n`, every left-right pair an edge.
    pub fn complete_bipartite(n: usize, delta: usize) -> Result<Self> {
        check_bin_count(n)?;
        if delta == 0 || delta >= n {
            return Err(Error::InvalidParameter(
                "bipartite right side must satisfy 1 <= delta <= n - 1",
            ));
        }
        let left = n - delta;
        let mut edges = Vec::with_capacity(left * delta);
        for l in 0..left as u32 {
            for r in left as u32..n as u32 {
                edges.push((l, r));
            }
        }
        Ok(Self::explicit_unchecked(n, edges))
    }

    /// Disjoint union of `num_cliques` complete graphs of `clique_size` bins
    /// each; bin `i` belongs to clique `i / clique_size`. The result is
    /// `(clique_size - 1)`-regular.
    pub fn clique_union(num_cliques: usize, clique_size: usize) -> Result<Self> {
        if num_cliques == 0 {
            return Err(Error::InvalidParameter("need at least one clique"));
        }
        if clique_size < 2 {
            return Err(Error::InvalidParameter("clique size must be at least 2"));
        }
        let n = num_cliques
            .checked_mul(clique_size)
            .ok_or(Error::InvalidParameter("clique union size overflows"))?;
        check_bin_count(n)?;
        let per_clique = clique_size * (clique_size - 1) / 2;
        let mut edges = Vec::with_capacity(num_cliques * per_clique);
        for c in 0..num_cliques {
            let base = (c * clique_size) as u32;
            for a in 0..clique_size as u32 {
                for b in (a + 1)..clique_size as u32 {
                    edges.push((base + a, base + b));
                }
            }
        }
        Ok(Self::explicit_unchecked(n, edges))
    }

    /// Build from an explicit edge list, validating all invariants: endpoint
    /// bounds, no self-loops, no duplicate edges.
    pub fn from_edges(n: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        check_bin_count(n)?;
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs n >= 1"));
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidParameter("edge endpoint out of range"));
            }
            if u == v {
                return Err(Error::InvalidParameter("self-loops are not allowed"));
            }
            normalized.push(normalize(u, v));
        }
        let mut sorted = normalized.clone();
        sorted.sort_unstable();
        if has_adjacent_duplicate(&sorted) {
            return Err(Error::InvalidParameter("duplicate edges are not allowed"));
        }
        Ok(Self::explicit_unchecked(n, normalized))
    }

    /// Edges must already be normalized and simple.
    fn explicit_unchecked(n: usize, edges: Vec<(u32, u32)>) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(u, v) in &edges {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0u32; edges.len() * 2];
        for &(u, v) in &edges {
            targets[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            targets[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        Self {
            n,
            store: EdgeStore::Explicit {
                edges,
                offsets,
                targets,
            },
        }
    }

    pub fn num_bins(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> u64 {
        match &self.store {
            EdgeStore::Complete => {
                let n = self.n as u64;
                n * (n - 1) / 2
            }
            EdgeStore::Explicit { edges, .. } => edges.len() as u64,
        }
    }

    pub fn degree(&self, bin: usize) -> usize {
        debug_assert!(bin < self.n);
        match &self.store {
            EdgeStore::Complete => self.n - 1,
            EdgeStore::Explicit { offsets, .. } => offsets[bin + 1] - offsets[bin],
        }
    }

    /// Neighbors of `bin`, in storage order.
    pub fn neighbors(&self, bin: usize) -> impl Iterator<Item = u32> + '_ {
        debug_assert!(bin < self.n);
        match &self.store {
            EdgeStore::Complete => Neighbors::Complete {
                n: self.n as u32,
                skip: bin as u32,
                next: 0,
            },
            EdgeStore::Explicit {
                offsets, targets, ..
            } => Neighbors::Explicit {
                slice: &targets[offsets[bin]..offsets[bin + 1]],
                pos: 0,
            },
        }
    }

    /// All edges as normalized `(u, v)` pairs, `u < v`. Complete graphs
    /// enumerate lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let (complete, explicit) = match &self.store {
            EdgeStore::Complete => (Some(self.n as u32), None),
            EdgeStore::Explicit { edges, .. } => (None, Some(edges.as_slice())),
        };
        CompletePairs {
            n: complete.unwrap_or(0),
            u: 0,
            v: 1,
        }
        .chain(explicit.unwrap_or(&[]).iter().copied())
    }

    /// One edge uniformly at random over the edge list; advances `rng`
    /// deterministically. Errors on an edgeless graph.
    #[inline]
    pub fn sample_edge(&self, rng: &mut SplitMix64) -> Result<(u32, u32)> {
        match &self.store {
            EdgeStore::Complete => {
                if self.n < 2 {
                    return Err(Error::InvalidState("graph has no edges"));
                }
                let n = self.n as u64;
                loop {
                    let u = rng.below(n);
                    let v = rng.below(n);
                    if u != v {
                        return Ok(normalize(u as u32, v as u32));
                    }
                }
            }
            EdgeStore::Explicit { edges, .. } => {
                if edges.is_empty() {
                    return Err(Error::InvalidState("graph has no edges"));
                }
                Ok(edges[rng.index(edges.len())])
            }
        }
    }
}

fn check_bin_count(n: usize) -> Result<()> {
    if n > u32::MAX as usize {
        return Err(Error::InvalidParameter("bin count exceeds u32 range"));
    }
    Ok(())
}

#[inline]
fn normalize(u: u32, v: u32) -> (u32, u32) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn has_adjacent_duplicate(sorted: &[(u32, u32)]) -> bool {
    sorted.windows(2).any(|w| w[0] == w[1])
}

enum Neighbors<'a> {
    Complete { n: u32, skip: u32, next: u32 },
    Explicit { slice: &'a [u32], pos: usize },
}

impl Iterator for Neighbors<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        match self {
            Neighbors::Complete { n, skip, next } => {
                if *next == *skip {
                    *next += 1;
                }
                if *next >= *n {
                    return None;
                }
                let out = *next;
                *next += 1;
                Some(out)
            }
            Neighbors::Explicit { slice, pos } => {
                let out = slice.get(*pos).copied();
                *pos += 1;
                out
            }
        }
    }
}

struct CompletePairs {
    n: u32,
    u: u32,
    v: u32,
}

impl Iterator for CompletePairs {
    type Item = (u32, u32);

    fn next(&mut self) -> Option<(u32, u32)> {
        if self.n < 2 || self.u >= self.n - 1 {
            return None;
        }
        let out = (self.u, self.v);
        self.v += 1;
        if self.v >= self.n {
            self.u += 1;
            self.v = self.u + 1;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn edge_set(g: &BinGraph) -> HashSet<(u32, u32)> {
        g.edges().collect()
    }

    fn assert_valid(g: &BinGraph) {
        let n = g.num_bins() as u32;
        let mut seen = HashSet::new();
        let mut degrees = vec![0usize; n as usize];
        for (u, v) in g.edges() {
            assert!(u < v, "edges must be normalized");
            assert!(v < n, "endpoint out of range");
            assert!(seen.insert((u, v)), "duplicate edge ({u},{v})");
            degrees[u as usize] += 1;
            degrees[v as usize] += 1;
        }
        assert_eq!(seen.len() as u64, g.edge_count());
        for (bin, &d) in degrees.iter().enumerate() {
            assert_eq!(d, g.degree(bin), "degree mismatch at bin {bin}");
            let mut nbrs: Vec<u32> = g.neighbors(bin).collect();
            nbrs.sort_unstable();
            assert_eq!(nbrs.len(), d);
            for w in nbrs.windows(2) {
                assert_ne!(w[0], w[1], "duplicate neighbor");
            }
        }
    }

    #[test]
    fn complete_one_bin_has_no_edges() {
        let g = BinGraph::complete(1).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_valid(&g);
    }

    #[test]
    fn complete_three_bins() {
        let g = BinGraph::complete(3).unwrap();
        assert_eq!(edge_set(&g), HashSet::from([(0, 1), (0, 2), (1, 2)]));
        assert_valid(&g);
    }

    #[test]
    fn complete_four_bins() {
        let g = BinGraph::complete(4).unwrap();
        assert_eq!(g.edge_count(), 6);
        for bin in 0..4 {
            assert_eq!(g.degree(bin), 3);
        }
        assert_valid(&g);
    }

    #[test]
    fn complete_zero_is_rejected() {
        assert!(matches!(
            BinGraph::complete(0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn ring_distance_two_is_a_cycle() {
        let g = BinGraph::ring_distance(8, 2).unwrap();
        assert_eq!(g.edge_count(), 8);
        for bin in 0..8 {
            assert_eq!(g.degree(bin), 2);
        }
        assert_valid(&g);
    }

    #[test]
    fn ring_distance_four_on_six_bins() {
        let g = BinGraph::ring_distance(6, 4).unwrap();
        let edges = edge_set(&g);
        for i in 0u32..6 {
            for k in 1u32..=2 {
                let j = (i + k) % 6;
                let e = if i < j { (i, j) } else { (j, i) };
                assert!(edges.contains(&e), "missing {e:?}");
            }
        }
        for bin in 0..6 {
            assert_eq!(g.degree(bin), 4);
        }
        assert_valid(&g);
    }

    #[test]
    fn ring_distance_saturates_to_complete() {
        // n=5, delta=4: every pair is at ring distance <= 2.
        let ring = BinGraph::ring_distance(5, 4).unwrap();
        let complete = BinGraph::complete(5).unwrap();
        assert_eq!(edge_set(&ring), edge_set(&complete));
        assert_valid(&ring);
    }

    #[test]
    fn ring_distance_rejects_bad_delta() {
        assert!(BinGraph::ring_distance(8, 3).is_err());
        assert!(BinGraph::ring_distance(8, 8).is_err());
        assert!(BinGraph::ring_distance(8, 0).is_err());
    }

    #[test]
    fn random_regular_four_three_is_k4() {
        // The only simple 3-regular graph on 4 nodes.
        let k4 = edge_set(&BinGraph::complete(4).unwrap());
        for seed in 0..5 {
            let g = BinGraph::random_regular(4, 3, seed).unwrap();
            assert_eq!(edge_set(&g), k4);
            assert_valid(&g);
        }
    }

    #[test]
    fn random_regular_rejects_odd_parity() {
        assert!(matches!(
            BinGraph::random_regular(3, 1, 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn random_regular_five_two_is_the_five_cycle() {
        // Any simple 2-regular graph on 5 nodes is a single 5-cycle: a
        // shorter cycle component would need a duplicate edge or self-loop.
        for seed in 0..5 {
            let g = BinGraph::random_regular(5, 2, seed).unwrap();
            for bin in 0..5 {
                assert_eq!(g.degree(bin), 2);
            }
            // Connectivity check: walk from 0.
            let mut seen = HashSet::from([0u32]);
            let mut frontier = vec![0u32];
            while let Some(b) = frontier.pop() {
                for nb in g.neighbors(b as usize) {
                    if seen.insert(nb) {
                        frontier.push(nb);
                    }
                }
            }
            assert_eq!(seen.len(), 5, "2-regular graph on 5 nodes must be connected");
            assert_valid(&g);
        }
    }

    #[test]
    fn random_regular_is_deterministic_per_seed() {
        let a = BinGraph::random_regular(16, 3, 99).unwrap();
        let b = BinGraph::random_regular(16, 3, 99).unwrap();
        assert_eq!(
            a.edges().collect::<Vec<_>>(),
            b.edges().collect::<Vec<_>>()
        );
        let c = BinGraph::random_regular(16, 3, 100).unwrap();
        assert_valid(&c);
    }

    #[test]
    fn bipartite_degrees() {
        let g = BinGraph::complete_bipartite(6, 2).unwrap();
        assert_eq!(g.edge_count(), 8);
        for bin in 0..4 {
            assert_eq!(g.degree(bin), 2, "left degree");
        }
        for bin in 4..6 {
            assert_eq!(g.degree(bin), 4, "right degree");
        }
        assert_valid(&g);
    }

    #[test]
    fn bipartite_k22() {
        let g = BinGraph::complete_bipartite(4, 2).unwrap();
        assert_eq!(g.edge_count(), 4);
        for bin in 0..4 {
            assert_eq!(g.degree(bin), 2);
        }
        assert_valid(&g);
    }

    #[test]
    fn bipartite_rejects_empty_side() {
        assert!(BinGraph::complete_bipartite(3, 3).is_err());
        assert!(BinGraph::complete_bipartite(3, 0).is_err());
    }

    #[test]
    fn clique_union_four_by_four() {
        let g = BinGraph::clique_union(4, 4).unwrap();
        assert_eq!(g.num_bins(), 16);
        assert_eq!(g.edge_count(), 24);
        for bin in 0..16 {
            assert_eq!(g.degree(bin), 3);
        }
        assert_valid(&g);
    }

    #[test]
    fn single_clique_is_complete() {
        let g = BinGraph::clique_union(1, 5).unwrap();
        assert_eq!(edge_set(&g), edge_set(&BinGraph::complete(5).unwrap()));
    }

    #[test]
    fn clique_union_two_by_two() {
        let g = BinGraph::clique_union(2, 2).unwrap();
        assert_eq!(edge_set(&g), HashSet::from([(0, 1), (2, 3)]));
    }

    #[test]
    fn clique_union_rejects_tiny_cliques() {
        assert!(BinGraph::clique_union(3, 1).is_err());
        assert!(BinGraph::clique_union(0, 4).is_err());
    }

    #[test]
    fn from_edges_validates() {
        assert!(BinGraph::from_edges(3, vec![(0, 1), (1, 2)]).is_ok());
        assert!(BinGraph::from_edges(3, vec![(0, 3)]).is_err());
        assert!(BinGraph::from_edges(3, vec![(1, 1)]).is_err());
        assert!(BinGraph::from_edges(3, vec![(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn sample_edge_single_edge_graph() {
        let g = BinGraph::from_edges(2, vec![(0, 1)]).unwrap();
        let mut rng = SplitMix64::new(5);
        for _ in 0..20 {
            assert_eq!(g.sample_edge(&mut rng).unwrap(), (0, 1));
        }
    }

    #[test]
    fn sample_edge_rejects_edgeless() {
        let g = BinGraph::complete(1).unwrap();
        let mut rng = SplitMix64::new(5);
        assert!(matches!(
            g.sample_edge(&mut rng),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn sample_edge_is_deterministic() {
        let g = BinGraph::complete(64).unwrap();
        let mut a = SplitMix64::new(123);
        let mut b = SplitMix64::new(123);
        for _ in 0..100 {
            assert_eq!(g.sample_edge(&mut a), g.sample_edge(&mut b));
        }
    }

    /// Chi-square uniformity of edge sampling on K4: 6000 draws over 6
    /// edges, statistic below the 99% quantile for 5 degrees of freedom.
    #[test]
    fn sample_edge_uniform_on_k4() {
        let g = BinGraph::complete(4).unwrap();
        let mut rng = SplitMix64::new(0x5EED_CAFE);
        let edges: Vec<(u32, u32)> = g.edges().collect();
        let mut counts = vec![0u64; edges.len()];
        for _ in 0..6000 {
            let e = g.sample_edge(&mut rng).unwrap();
            let idx = edges.iter().position(|&x| x == e).unwrap();
            counts[idx] += 1;
        }
        let expected = 1000.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 15.086, "chi-square {chi2} exceeds 99% quantile");
        for &c in &counts {
            assert!((850..=1150).contains(&c), "count {c} outside 1000 +/- 150");
        }
    }

    /// Same check on an explicit store (ring), exercising list indexing.
    #[test]
    fn sample_edge_uniform_on_ring() {
        let g = BinGraph::ring_distance(6, 2).unwrap();
        let mut rng = SplitMix64::new(0xB10C_0DE5);
        let edges: Vec<(u32, u32)> = g.edges().collect();
        let mut counts = vec![0u64; edges.len()];
        for _ in 0..6000 {
            let e = g.sample_edge(&mut rng).unwrap();
            let idx = edges.iter().position(|&x| x == e).unwrap();
            counts[idx] += 1;
        }
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - 1000.0;
                d * d / 1000.0
            })
            .sum();
        assert!(chi2 < 15.086, "chi-square {chi2} exceeds 99% quantile");
    }

    #[test]
    fn complete_edges_enumerate_lexicographically() {
        let g = BinGraph::complete(4).unwrap();
        let edges: Vec<(u32, u32)> = g.edges().collect();
        assert_eq!(edges, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    }
}

//! Insertion with rebalancing moves.
//!
//! Balls are viewed as directed edges between their two candidate bins, each
//! edge pointing at the bin the ball currently occupies, so a bin's load is
//! its in-degree. When a new ball arrives we search backward along edge
//! directions from both endpoints of its sampled edge, up to `h` hops, for
//! the least-loaded bin reachable by a directed path; flipping every edge on
//! that path shifts the new ball's unit of load onto that bin while leaving
//! all intermediate bins unchanged.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::graph::BinGraph;
use crate::rng::SplitMix64;

/// Directed multigraph of ball edges; in-degree equals load.
#[derive(Debug, Clone)]
pub struct Orientation {
    n: usize,
    /// Per ball: candidate bin pair, normalized u < v.
    edges: Vec<(u32, u32)>,
    /// Per ball: the endpoint currently holding it.
    resident: Vec<u32>,
    /// Per ball: position inside `residents[resident]`, for O(1) removal.
    slot: Vec<u32>,
    /// Per bin: balls residing there (equivalently, incoming ball edges).
    residents: Vec<Vec<u32>>,
    in_degree: Vec<u64>,
    // Search scratch, reused across inserts.
    stamp: Vec<u64>,
    meta: Vec<SearchMeta>,
    stamp_counter: u64,
    queue: VecDeque<u32>,
}

#[derive(Debug, Clone, Copy, Default)]
struct SearchMeta {
    parent_ball: u32,
    parent_bin: u32,
    depth: u32,
}

/// Outcome of a bounded backward search from an edge's endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachResult {
    /// Least-loaded reachable bin (the bin whose load the insert will raise).
    pub bin: u32,
    /// The sampled-edge endpoint the witnessing path leads to; the new ball
    /// is assigned here before the path is flipped.
    pub endpoint: u32,
    /// Balls along the witnessing path, ordered from `bin` towards
    /// `endpoint`; empty when `bin == endpoint`.
    pub path: Vec<u32>,
}

/// Result of one insert-with-moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    /// Bin whose load increased by one.
    pub bin: u32,
    /// Endpoint of the sampled edge where the new ball was assigned.
    pub endpoint: u32,
    /// Id of the newly inserted ball.
    pub ball: u32,
    /// Balls whose residence flipped, ordered from `bin` towards `endpoint`.
    pub flipped: Vec<u32>,
}

impl Orientation {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            resident: Vec::new(),
            slot: Vec::new(),
            residents: vec![Vec::new(); n],
            in_degree: vec![0; n],
            stamp: vec![0; n],
            meta: vec![SearchMeta::default(); n],
            stamp_counter: 0,
            queue: VecDeque::new(),
        }
    }

    pub fn num_bins(&self) -> usize {
        self.n
    }

    pub fn ball_count(&self) -> usize {
        self.edges.len()
    }

    /// Load of a bin, i.e. its in-degree.
    pub fn load(&self, bin: u32) -> u64 {
        self.in_degree[bin as usize]
    }

    pub fn loads(&self) -> &[u64] {
        &self.in_degree
    }

    /// A ball's candidate pair and current resident bin.
    pub fn ball(&self, ball: u32) -> ((u32, u32), u32) {
        (self.edges[ball as usize], self.resident[ball as usize])
    }

    /// Sample a uniform edge, search both endpoints up to `h` moves, assign
    /// the new ball, and flip the chosen path. Exactly `path length <= h`
    /// balls change residence; only the returned bin's load grows.
    pub fn insert_with_moves(
        &mut self,
        graph: &BinGraph,
        h: usize,
        rng: &mut SplitMix64,
    ) -> Result<Placement> {
        let (u, v) = graph.sample_edge(rng)?;
        let reach = self.reachable_min((u, v), h);
        let ball = self.add_ball(u, v, reach.endpoint);
        for &b in &reach.path {
            self.flip(b);
        }
        Ok(Placement {
            bin: reach.bin,
            endpoint: reach.endpoint,
            ball,
            flipped: reach.path,
        })
    }

    /// Breadth-first search backward along edge directions from each
    /// endpoint up to depth `h`; returns the minimum-load reachable bin and
    /// one shortest witnessing path. Ties break by (lower load, shorter
    /// path, lower bin index), then by the lower-indexed endpoint.
    ///
    /// Takes `&mut self` only to reuse internal scratch; the orientation
    /// itself is not modified.
    pub fn reachable_min(&mut self, endpoints: (u32, u32), h: usize) -> ReachResult {
        let (a, b) = if endpoints.0 <= endpoints.1 {
            (endpoints.0, endpoints.1)
        } else {
            (endpoints.1, endpoints.0)
        };
        let first = self.search_endpoint(a, h);
        if a == b {
            return first;
        }
        let second = self.search_endpoint(b, h);
        let key = |r: &ReachResult| (self.in_degree[r.bin as usize], r.path.len(), r.bin);
        if key(&second) < key(&first) {
            second
        } else {
            first
        }
    }

    fn search_endpoint(&mut self, endpoint: u32, h: usize) -> ReachResult {
        self.stamp_counter += 1;
        let stamp = self.stamp_counter;
        self.stamp[endpoint as usize] = stamp;
        self.meta[endpoint as usize] = SearchMeta {
            parent_ball: 0,
            parent_bin: endpoint,
            depth: 0,
        };
        self.queue.clear();
        self.queue.push_back(endpoint);
        let mut best = (self.in_degree[endpoint as usize], 0usize, endpoint);
        while let Some(cur) = self.queue.pop_front() {
            let depth = self.meta[cur as usize].depth as usize;
            if depth == h {
                continue;
            }
            for idx in 0..self.residents[cur as usize].len() {
                let ball = self.residents[cur as usize][idx];
                let (eu, ev) = self.edges[ball as usize];
                let pred = if eu == cur { ev } else { eu };
                if self.stamp[pred as usize] == stamp {
                    continue;
                }
                self.stamp[pred as usize] = stamp;
                self.meta[pred as usize] = SearchMeta {
                    parent_ball: ball,
                    parent_bin: cur,
                    depth: depth as u32 + 1,
                };
                let cand = (self.in_degree[pred as usize], depth + 1, pred);
                if cand < best {
                    best = cand;
                }
                self.queue.push_back(pred);
            }
        }
        // Reconstruct the path from the winning bin back to the endpoint.
        let (_, _, bin) = best;
        let mut path = Vec::new();
        let mut cur = bin;
        while cur != endpoint {
            let m = self.meta[cur as usize];
            path.push(m.parent_ball);
            cur = m.parent_bin;
        }
        ReachResult {
            bin,
            endpoint,
            path,
        }
    }

    fn add_ball(&mut self, u: u32, v: u32, resident: u32) -> u32 {
        debug_assert!(resident == u || resident == v);
        let ball = self.edges.len() as u32;
        self.edges.push(if u < v { (u, v) } else { (v, u) });
        self.resident.push(resident);
        self.slot.push(self.residents[resident as usize].len() as u32);
        self.residents[resident as usize].push(ball);
        self.in_degree[resident as usize] += 1;
        ball
    }

    /// Move a ball to its alternate endpoint, updating in-degrees.
    fn flip(&mut self, ball: u32) {
        let (u, v) = self.edges[ball as usize];
        let from = self.resident[ball as usize];
        let to = if from == u { v } else { u };
        // Swap-remove from the old bin, fixing the displaced ball's slot.
        let pos = self.slot[ball as usize] as usize;
        let list = &mut self.residents[from as usize];
        list.swap_remove(pos);
        if let Some(&moved) = list.get(pos) {
            self.slot[moved as usize] = pos as u32;
        }
        self.slot[ball as usize] = self.residents[to as usize].len() as u32;
        self.residents[to as usize].push(ball);
        self.resident[ball as usize] = to;
        self.in_degree[from as usize] -= 1;
        self.in_degree[to as usize] += 1;
    }

    /// Exact invariant check: in-degree equals the resident count for every
    /// bin and every ball resides at an endpoint of its own edge.
    pub fn check_invariants(&self) -> bool {
        let mut counted = vec![0u64; self.n];
        for (ball, &r) in self.resident.iter().enumerate() {
            let (u, v) = self.edges[ball];
            if r != u && r != v {
                return false;
            }
            counted[r as usize] += 1;
        }
        if counted != self.in_degree {
            return false;
        }
        self.residents
            .iter()
            .enumerate()
            .all(|(bin, list)| list.len() as u64 == self.in_degree[bin])
    }
}

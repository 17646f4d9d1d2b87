//! Load state and the baseline insertion processes: single uniform choice
//! and two-choice over a sampled graph edge with configurable tie-breaking.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::BinGraph;
use crate::rng::SplitMix64;

/// Rule for choosing an endpoint when both bins of an edge hold equal load.
/// `Left` means the lower bin index wins, `Right` the higher.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    Random,
    Left,
    Right,
}

/// The bins a ball was offered: a single uniform bin or an edge's endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallChoice {
    Single(u32),
    Pair(u32, u32),
}

/// Per-ball history entry.
///
/// `height` is the load of the placed bin immediately after placement;
/// `alt_load_at_insert` is the load the non-placed endpoint held at insert
/// time (absent for single-choice balls).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallRecord {
    pub ball_id: u64,
    pub choice: BallChoice,
    pub placed: u32,
    pub height: u64,
    pub alt_load_at_insert: Option<u64>,
}

/// Per-bin load counts plus optional per-ball history.
///
/// Invariant: the loads always sum to `balls_inserted`, and when history is
/// enabled it holds exactly one record per inserted ball.
#[derive(Debug, Clone)]
pub struct AllocationState {
    loads: Vec<u64>,
    balls_inserted: u64,
    history: Option<Vec<BallRecord>>,
}

impl AllocationState {
    pub fn new(n: usize) -> Self {
        Self {
            loads: vec![0; n],
            balls_inserted: 0,
            history: None,
        }
    }

    /// Like [`AllocationState::new`] but records a `BallRecord` per insert.
    pub fn with_history(n: usize) -> Self {
        Self {
            loads: vec![0; n],
            balls_inserted: 0,
            history: Some(Vec::new()),
        }
    }

    /// Synthetic state with the given loads and no history; the ball count
    /// is the load sum. Used to plant configurations in diagnostics.
    pub fn from_loads(loads: Vec<u64>) -> Self {
        let balls_inserted = loads.iter().sum();
        Self {
            loads,
            balls_inserted,
            history: None,
        }
    }

    pub fn num_bins(&self) -> usize {
        self.loads.len()
    }

    pub fn loads(&self) -> &[u64] {
        &self.loads
    }

    pub fn load(&self, bin: u32) -> u64 {
        self.loads[bin as usize]
    }

    pub fn balls_inserted(&self) -> u64 {
        self.balls_inserted
    }

    pub fn history_enabled(&self) -> bool {
        self.history.is_some()
    }

    pub fn history(&self) -> Option<&[BallRecord]> {
        self.history.as_deref()
    }

    /// Largest load over all bins.
    pub fn max_load(&self) -> u64 {
        self.loads.iter().copied().max().unwrap_or(0)
    }

    /// Map from load value to the number of bins holding it; the counts sum
    /// to the number of bins.
    pub fn load_histogram(&self) -> BTreeMap<u64, usize> {
        let mut hist = BTreeMap::new();
        for &l in &self.loads {
            *hist.entry(l).or_insert(0) += 1;
        }
        hist
    }

    /// Maximum load minus the average `m / n` (signed).
    pub fn gap(&self) -> f64 {
        self.max_load() as f64 - self.balls_inserted as f64 / self.loads.len() as f64
    }

    /// Record a placement: bump the bin, bump the ball count, append the
    /// history record if enabled. Returns the new height.
    pub(crate) fn place(
        &mut self,
        choice: BallChoice,
        placed: u32,
        alt_load_at_insert: Option<u64>,
    ) -> u64 {
        let slot = &mut self.loads[placed as usize];
        *slot += 1;
        let height = *slot;
        let ball_id = self.balls_inserted;
        self.balls_inserted += 1;
        if let Some(history) = &mut self.history {
            history.push(BallRecord {
                ball_id,
                choice,
                placed,
                height,
                alt_load_at_insert,
            });
        }
        height
    }

    /// Placement for processes that do not support history recording.
    pub(crate) fn place_untracked(&mut self, placed: u32) -> u64 {
        debug_assert!(self.history.is_none());
        self.loads[placed as usize] += 1;
        self.balls_inserted += 1;
        self.loads[placed as usize]
    }
}

/// Throw one ball into a uniformly random bin. Returns the bin index.
pub fn insert_single_choice(state: &mut AllocationState, rng: &mut SplitMix64) -> u32 {
    let bin = rng.index(state.num_bins()) as u32;
    state.place(BallChoice::Single(bin), bin, None);
    bin
}

/// Sample a uniform edge and place the ball at the endpoint with strictly
/// smaller load, applying `tiebreak` on equal loads (`Random` draws a fair
/// coin from `rng` only when a tie actually occurs).
pub fn insert_two_choice_edge(
    state: &mut AllocationState,
    graph: &BinGraph,
    tiebreak: TieBreak,
    rng: &mut SplitMix64,
) -> Result<u32> {
    if state.num_bins() != graph.num_bins() {
        return Err(Error::InvalidParameter("state not sized for graph"));
    }
    let (u, v) = graph.sample_edge(rng)?;
    let (lu, lv) = (state.load(u), state.load(v));
    let placed = if lu < lv {
        u
    } else if lv < lu {
        v
    } else {
        match tiebreak {
            TieBreak::Left => u,
            TieBreak::Right => v,
            // coin() == true picks the lower-indexed endpoint.
            TieBreak::Random => {
                if rng.coin() {
                    u
                } else {
                    v
                }
            }
        }
    };
    let alt = if placed == u { lv } else { lu };
    state.place(BallChoice::Pair(u, v), placed, Some(alt));
    Ok(placed)
}

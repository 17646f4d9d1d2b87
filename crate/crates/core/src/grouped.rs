//! Super-bin placement schemes: aligned groups, unaligned disjoint windows,
//! and the global-min variant, plus the k-step detector and q_r estimator.
//!
//! A layout carves `n` bins into groups of `g` consecutive bins. Aligned
//! modes partition the bins into `n/g` super-bins; the unaligned mode slides
//! two disjoint windows of `g` consecutive bins anywhere on the ring. Step
//! detection always reads the aligned partition geometry, whichever process
//! produced the state.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::allocation::AllocationState;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupMode {
    /// Disjoint super-bins of `g` consecutive bins; probe `c`, insert into
    /// the least-loaded bin of the lesser-total group.
    Aligned,
    /// Two disjoint windows of `g` consecutive bins anywhere on the ring.
    UnalignedWindow,
    /// Aligned super-bins, but insert into the globally least-loaded probed
    /// bin, ignoring group totals.
    GlobalMin,
}

/// Partition/window geometry for the super-bin schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupLayout {
    n: usize,
    group_size: usize,
    groups_probed: usize,
    mode: GroupMode,
    block_super_bins: usize,
}

impl GroupLayout {
    /// Aligned layout; `g` must divide `n` and `c >= 2`.
    pub fn aligned(n: usize, g: usize, c: usize) -> Result<Self> {
        Self::partitioned(n, g, c, GroupMode::Aligned)
    }

    /// Global-min layout over aligned super-bins; same requirements.
    pub fn global_min(n: usize, g: usize, c: usize) -> Result<Self> {
        Self::partitioned(n, g, c, GroupMode::GlobalMin)
    }

    fn partitioned(n: usize, g: usize, c: usize, mode: GroupMode) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidParameter("group size must be at least 1"));
        }
        if c < 2 {
            return Err(Error::InvalidParameter("must probe at least 2 groups"));
        }
        if n == 0 || n % g != 0 {
            return Err(Error::InvalidParameter("group size must divide n"));
        }
        Ok(Self {
            n,
            group_size: g,
            groups_probed: c,
            mode,
            block_super_bins: default_block_super_bins(n, c * g),
        })
    }

    /// Unaligned-window layout; always two probes, `2g <= n`.
    pub fn unaligned(n: usize, g: usize) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidParameter("window size must be at least 1"));
        }
        if 2 * g > n {
            return Err(Error::InvalidParameter(
                "two disjoint windows must fit: 2g <= n",
            ));
        }
        Ok(Self {
            n,
            group_size: g,
            groups_probed: 2,
            mode: GroupMode::UnalignedWindow,
            block_super_bins: default_block_super_bins(n, 2 * g),
        })
    }

    /// Override the block size (in super-bins) used by step detection.
    pub fn with_block_super_bins(mut self, t: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidParameter("block size must be at least 1"));
        }
        self.block_super_bins = t;
        Ok(self)
    }

    pub fn num_bins(&self) -> usize {
        self.n
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    pub fn groups_probed(&self) -> usize {
        self.groups_probed
    }

    pub fn mode(&self) -> GroupMode {
        self.mode
    }

    /// Total probed bins per insert (`d = c * g`).
    pub fn probes(&self) -> usize {
        self.groups_probed * self.group_size
    }

    /// Block size in super-bins used by step detection.
    pub fn block_super_bins(&self) -> usize {
        self.block_super_bins
    }

    /// Super-bins in the aligned partition (`floor(n / g)`).
    pub fn super_bin_count(&self) -> usize {
        self.n / self.group_size
    }
}

/// Default block size: `ceil(4 * d * log2 n)` super-bins.
fn default_block_super_bins(n: usize, d: usize) -> usize {
    let t = libm::ceil(4.0 * d as f64 * libm::log2(n as f64)) as usize;
    t.max(1)
}

fn check_state(state: &AllocationState, layout: &GroupLayout) -> Result<()> {
    if state.num_bins() != layout.n {
        return Err(Error::InvalidParameter("state not sized for layout"));
    }
    if state.history_enabled() {
        return Err(Error::InvalidParameter(
            "history recording is not supported for grouped placements",
        ));
    }
    Ok(())
}

/// Probe `c` super-bins uniformly with replacement, keep the one with the
/// least total load (ties to the lowest sampled super-bin index), and place
/// into its least-loaded bin (ties to the lowest bin index).
pub fn insert_aligned(
    state: &mut AllocationState,
    layout: &GroupLayout,
    rng: &mut SplitMix64,
) -> Result<u32> {
    if layout.mode != GroupMode::Aligned {
        return Err(Error::InvalidParameter("layout mode must be aligned"));
    }
    check_state(state, layout)?;
    let g = layout.group_size;
    let sb_count = layout.super_bin_count();
    let loads = state.loads();
    let mut best: Option<(u64, usize)> = None;
    for _ in 0..layout.groups_probed {
        let sb = rng.index(sb_count);
        let total: u64 = loads[sb * g..(sb + 1) * g].iter().sum();
        if best.map_or(true, |b| (total, sb) < b) {
            best = Some((total, sb));
        }
    }
    let (_, sb) = best.expect("probed at least two groups");
    let placed = min_load_bin(loads, sb * g, g);
    state.place_untracked(placed);
    Ok(placed)
}

/// Sample two disjoint windows of `g` consecutive bins on the ring, keep the
/// one with the smaller total (ties by a fair coin), and place into its
/// least-loaded bin (ties to the first bin in window order).
pub fn insert_unaligned(
    state: &mut AllocationState,
    layout: &GroupLayout,
    rng: &mut SplitMix64,
) -> Result<u32> {
    if layout.mode != GroupMode::UnalignedWindow {
        return Err(Error::InvalidParameter(
            "layout mode must be unaligned-window",
        ));
    }
    check_state(state, layout)?;
    let n = layout.n;
    let g = layout.group_size;
    let (s1, s2) = sample_disjoint_windows(layout, rng);
    let loads = state.loads();
    let window_total = |s: usize| -> u64 { (0..g).map(|j| loads[(s + j) % n]).sum() };
    let (t1, t2) = (window_total(s1), window_total(s2));
    let winner = if t1 < t2 {
        s1
    } else if t2 < t1 {
        s2
    } else if rng.coin() {
        s1
    } else {
        s2
    };
    let mut best_bin = winner % n;
    let mut best_load = loads[best_bin];
    for j in 1..g {
        let bin = (winner + j) % n;
        if loads[bin] < best_load {
            best_load = loads[bin];
            best_bin = bin;
        }
    }
    state.place_untracked(best_bin as u32);
    Ok(best_bin as u32)
}

/// Probe `c` super-bins as in [`insert_aligned`] but place into the globally
/// least-loaded probed bin (ties to the lowest bin index), ignoring totals.
pub fn insert_global_min(
    state: &mut AllocationState,
    layout: &GroupLayout,
    rng: &mut SplitMix64,
) -> Result<u32> {
    if layout.mode != GroupMode::GlobalMin {
        return Err(Error::InvalidParameter("layout mode must be global-min"));
    }
    check_state(state, layout)?;
    let g = layout.group_size;
    let sb_count = layout.super_bin_count();
    let loads = state.loads();
    let mut best: Option<(u64, usize)> = None;
    for _ in 0..layout.groups_probed {
        let sb = rng.index(sb_count);
        for bin in sb * g..(sb + 1) * g {
            if best.map_or(true, |b| (loads[bin], bin) < b) {
                best = Some((loads[bin], bin));
            }
        }
    }
    let (_, bin) = best.expect("probed at least two groups");
    state.place_untracked(bin as u32);
    Ok(bin as u32)
}

/// Two disjoint window starts on the ring: the first is uniform, the second
/// is resampled until disjoint from the first.
pub fn sample_disjoint_windows(layout: &GroupLayout, rng: &mut SplitMix64) -> (usize, usize) {
    let n = layout.n;
    let g = layout.group_size;
    let s1 = rng.index(n);
    loop {
        let s2 = rng.index(n);
        // Disjoint iff each start is at least g past the other on the ring.
        let forward = (s2 + n - s1) % n;
        let backward = (s1 + n - s2) % n;
        if forward >= g && backward >= g {
            return (s1, s2);
        }
    }
}

fn min_load_bin(loads: &[u64], start: usize, g: usize) -> u32 {
    let mut best = start;
    for bin in start + 1..start + g {
        if loads[bin] < loads[best] {
            best = bin;
        }
    }
    best as u32
}

/// Per-`k` counts of blocks matching the step pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepCounts {
    /// k -> number of blocks that are k-steps (k = 0 means all-zero block).
    pub counts: BTreeMap<u64, usize>,
    /// Number of complete blocks examined.
    pub blocks: usize,
    /// Trailing super-bins that did not fill a block and were ignored.
    pub ignored_super_bins: usize,
}

/// Exact pattern matcher over the aligned partition: a block of `t`
/// consecutive super-bins is a k-step when every bin of its l-th super-bin
/// (0-based) holds exactly `max(0, k - l)` load. Only `k` in `[0, t]` is
/// tested; each block matches at most one k.
pub fn detect_k_steps(state: &AllocationState, layout: &GroupLayout) -> StepCounts {
    let g = layout.group_size;
    let t = layout.block_super_bins;
    let sb_count = state.num_bins() / g;
    let blocks = sb_count / t;
    let ignored_super_bins = sb_count % t;
    let loads = state.loads();
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    'block: for b in 0..blocks {
        let base = b * t * g;
        // The first super-bin's uniform load determines the only viable k.
        let k = loads[base];
        if k > t as u64 {
            continue;
        }
        for l in 0..t {
            let expected = k.saturating_sub(l as u64);
            let sb_base = base + l * g;
            if loads[sb_base..sb_base + g].iter().any(|&x| x != expected) {
                continue 'block;
            }
        }
        *counts.entry(k).or_insert(0) += 1;
    }
    StepCounts {
        counts,
        blocks,
        ignored_super_bins,
    }
}

/// Run the unaligned-window process in rounds of `floor(n / t)` inserts
/// (at least one), returning the state at every round boundary; the first
/// element is the empty initial state.
pub fn run_unaligned_rounds(
    layout: &GroupLayout,
    rounds: usize,
    seed: u64,
) -> Result<Vec<AllocationState>> {
    if layout.mode != GroupMode::UnalignedWindow {
        return Err(Error::InvalidParameter(
            "layout mode must be unaligned-window",
        ));
    }
    let round_size = (layout.n / layout.block_super_bins).max(1);
    let mut state = AllocationState::new(layout.n);
    let mut rng = SplitMix64::new(seed);
    let mut trace = Vec::with_capacity(rounds + 1);
    trace.push(state.clone());
    for _ in 0..rounds {
        for _ in 0..round_size {
            insert_unaligned(&mut state, layout, &mut rng)?;
        }
        trace.push(state.clone());
    }
    Ok(trace)
}

/// Fraction of blocks that are r-steps after round `r`: a pure measurement
/// over a trace recorded at round boundaries (`trace[0]` = before inserts).
pub fn estimate_q_r(trace: &[AllocationState], layout: &GroupLayout, r: usize) -> Result<f64> {
    let Some(state) = trace.get(r) else {
        return Err(Error::InvalidParameter("r exceeds rounds recorded"));
    };
    let steps = detect_k_steps(state, layout);
    if steps.blocks == 0 {
        return Err(Error::InvalidParameter("layout yields no complete blocks"));
    }
    let hits = steps.counts.get(&(r as u64)).copied().unwrap_or(0);
    Ok(hits as f64 / steps.blocks as f64)
}

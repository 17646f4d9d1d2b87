//! Declarative process descriptor and the seeded driver that runs one whole
//! trial: `m` insertions of the chosen process over a bin graph.

use crate::allocation::{
    insert_single_choice, insert_two_choice_edge, AllocationState, TieBreak,
};
use crate::error::{Error, Result};
use crate::graph::BinGraph;
use crate::grouped::{insert_aligned, insert_global_min, insert_unaligned, GroupLayout};
use crate::moves::Orientation;
use crate::rng::SplitMix64;

/// Which insertion process a trial runs. Grouped processes use only the
/// graph's bin count; the edge structure drives the other processes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Process {
    SingleChoice,
    EdgeTwoChoice { tiebreak: TieBreak },
    /// Edge two-choice with up to `h` rebalancing moves per insert.
    Moves { h: usize },
    /// Aligned super-bins of `g` consecutive bins, `c` probes per insert.
    Aligned { g: usize, c: usize },
    /// Two disjoint unaligned windows of `g` consecutive bins.
    Unaligned { g: usize },
    /// Aligned super-bins, global least-loaded probed bin.
    GlobalMin { g: usize, c: usize },
}

impl Process {
    /// Whether the process can record per-ball history (only the processes
    /// whose records carry a meaningful single choice or choice pair).
    pub fn supports_history(&self) -> bool {
        matches!(self, Process::SingleChoice | Process::EdgeTwoChoice { .. })
    }
}

/// Run exactly `m` insertions; deterministic given (graph, m, process,
/// seed). History recording is only available for the single-choice and
/// edge-two-choice processes.
pub fn run_process(
    graph: &BinGraph,
    m: u64,
    process: &Process,
    seed: u64,
    record_history: bool,
) -> Result<AllocationState> {
    if record_history && !process.supports_history() {
        return Err(Error::InvalidParameter(
            "history recording is not supported for this process",
        ));
    }
    let n = graph.num_bins();
    let mut rng = SplitMix64::new(seed);
    let mut state = if record_history {
        AllocationState::with_history(n)
    } else {
        AllocationState::new(n)
    };
    match *process {
        Process::SingleChoice => {
            for _ in 0..m {
                insert_single_choice(&mut state, &mut rng);
            }
        }
        Process::EdgeTwoChoice { tiebreak } => {
            for _ in 0..m {
                insert_two_choice_edge(&mut state, graph, tiebreak, &mut rng)?;
            }
        }
        Process::Moves { h } => {
            let mut orientation = Orientation::new(n);
            for _ in 0..m {
                orientation.insert_with_moves(graph, h, &mut rng)?;
            }
            state = AllocationState::from_loads(orientation.loads().to_vec());
        }
        Process::Aligned { g, c } => {
            let layout = GroupLayout::aligned(n, g, c)?;
            for _ in 0..m {
                insert_aligned(&mut state, &layout, &mut rng)?;
            }
        }
        Process::Unaligned { g } => {
            let layout = GroupLayout::unaligned(n, g)?;
            for _ in 0..m {
                insert_unaligned(&mut state, &layout, &mut rng)?;
            }
        }
        Process::GlobalMin { g, c } => {
            let layout = GroupLayout::global_min(n, g, c)?;
            for _ in 0..m {
                insert_global_min(&mut state, &layout, &mut rng)?;
            }
        }
    }
    Ok(state)
}

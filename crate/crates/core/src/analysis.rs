//! Diagnostics and reporting: witness-graph construction from recorded
//! histories, growth rates of d-ary Fibonacci recurrences, evaluation of the
//! asymptotic bound terms for reports, and cross-trial order statistics.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::allocation::{AllocationState, BallChoice, BallRecord};
use crate::error::{Error, Result};

/// An edge of a witness graph; `ball_id` is the ball whose recorded choice
/// pair is exactly `{parent, child}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessEdge {
    pub parent: u32,
    pub child: u32,
    pub ball_id: u64,
}

/// A bin in the witness graph with the load the expansion schedule
/// guarantees for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessNode {
    pub bin: u32,
    pub guaranteed_load: u64,
}

/// Diagnostic graph grown from a high-load bin: every edge is a distinct
/// ball, children are the balls' alternate bin choices, and edges that lead
/// to an already-present bin are kept separately as cycle edges.
#[derive(Debug, Clone)]
pub struct WitnessGraph {
    pub root: u32,
    pub leaf_threshold: u64,
    pub nodes: Vec<WitnessNode>,
    pub tree_edges: Vec<WitnessEdge>,
    pub cycle_edges: Vec<WitnessEdge>,
    /// True when expansion stopped at `node_cap`.
    pub truncated: bool,
}

impl WitnessGraph {
    /// Number of cycle-producing edges.
    pub fn cycle_edge_count(&self) -> usize {
        self.cycle_edges.len()
    }
}

/// Grow a witness graph from `root` over the state's recorded history.
///
/// Breadth-first: a bin entered with guaranteed load `x` expands its top
/// `x - leaf_threshold` resident balls by height descending; the i-th ball's
/// alternate endpoint becomes a child guaranteed `min(alt load at insert,
/// x - i)`. A child already present contributes a cycle edge and is not
/// expanded. Construction stops (flagging truncation) once `node_cap` bins
/// are present.
pub fn build_witness_graph(
    state: &AllocationState,
    root: u32,
    leaf_threshold: u64,
    node_cap: usize,
) -> Result<WitnessGraph> {
    let Some(history) = state.history() else {
        return Err(Error::InvalidState("state has no recorded history"));
    };
    let n = state.num_bins();
    let root_load = state.load(root);
    if root_load < leaf_threshold {
        return Err(Error::InvalidParameter("root load below leaf threshold"));
    }
    if node_cap == 0 {
        return Err(Error::InvalidParameter("node cap must be at least 1"));
    }

    // Per-bin ball stacks in height order (history is already chronological,
    // and each placement raises its bin by one).
    let mut stacks: Vec<Vec<&BallRecord>> = vec![Vec::new(); n];
    for record in history {
        let BallChoice::Pair(..) = record.choice else {
            return Err(Error::InvalidState(
                "history does not record alternate choices",
            ));
        };
        stacks[record.placed as usize].push(record);
    }

    let mut present = vec![false; n];
    let mut graph = WitnessGraph {
        root,
        leaf_threshold,
        nodes: Vec::new(),
        tree_edges: Vec::new(),
        cycle_edges: Vec::new(),
        truncated: false,
    };
    present[root as usize] = true;
    graph.nodes.push(WitnessNode {
        bin: root,
        guaranteed_load: root_load,
    });
    let mut queue: VecDeque<(u32, u64)> = VecDeque::new();
    queue.push_back((root, root_load));

    'expand: while let Some((bin, x)) = queue.pop_front() {
        let balls_to_expand = x.saturating_sub(leaf_threshold);
        let stack = &stacks[bin as usize];
        for i in 1..=balls_to_expand {
            // i-th ball from the top of the stack.
            let Some(record) = stack.len().checked_sub(i as usize).map(|k| stack[k]) else {
                break;
            };
            let BallChoice::Pair(u, v) = record.choice else {
                unreachable!("validated above")
            };
            let child = if record.placed == u { v } else { u };
            let alt_load = record
                .alt_load_at_insert
                .expect("pair records carry alternate loads");
            let guaranteed = alt_load.min(x - i);
            if present[child as usize] {
                graph.cycle_edges.push(WitnessEdge {
                    parent: bin,
                    child,
                    ball_id: record.ball_id,
                });
            } else {
                if graph.nodes.len() >= node_cap {
                    graph.truncated = true;
                    break 'expand;
                }
                present[child as usize] = true;
                graph.nodes.push(WitnessNode {
                    bin: child,
                    guaranteed_load: guaranteed,
                });
                graph.tree_edges.push(WitnessEdge {
                    parent: bin,
                    child,
                    ball_id: record.ball_id,
                });
                queue.push_back((child, guaranteed));
            }
        }
    }
    Ok(graph)
}

/// Largest representable value strictly below 2.
const BELOW_TWO: f64 = 1.9999999999999998;

/// Growth rate of the order-`d` Fibonacci recurrence
/// `F(k) = F(k-1) + ... + F(k-d)` with `F(1) = 1`, `F(k <= 0) = 0`:
/// successive-ratio iteration with renormalization, returning once two
/// consecutive ratios (past the seed transient) differ by less than
/// `tolerance`.
///
/// The true rate lies strictly inside (1, 2) for every finite `d`; once d is
/// large enough that the rate rounds to 2.0 in f64, the closest value below
/// 2 is returned instead so the open bound stays visible to callers.
pub fn compute_phi(d: usize, tolerance: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1"));
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive"));
    }
    // window holds F(k - d + 1 ..= k), newest last, rescaled by an exact
    // power of two whenever the values grow large; scaling by 2^-512 is
    // lossless, so the computed ratios track the true sequence down to f64
    // precision.
    let mut window = vec![0.0f64; d];
    window[d - 1] = 1.0;
    let mut prev: Option<f64> = None;
    for step in 0usize..1_000_000 {
        // Ascending order: oldest (smallest) entries first.
        let next: f64 = window.iter().sum();
        let ratio = next / window[d - 1];
        // The first d+1 ratios only reflect the zero padding around F(1);
        // convergence checks start after that transient.
        if step > d {
            if let Some(p) = prev {
                if (ratio - p).abs() < tolerance {
                    return Ok(if ratio >= 2.0 { BELOW_TWO } else { ratio });
                }
            }
        }
        prev = Some(ratio);
        window.rotate_left(1);
        window[d - 1] = next;
        if next > 1.0e154 {
            for w in window.iter_mut() {
                *w = libm::scalbn(*w, -512);
            }
        }
    }
    Err(Error::InvalidParameter(
        "tolerance finer than achievable convergence",
    ))
}

/// Parameters a bound report was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub n: u64,
    /// Graph degree, for the degree-dependent terms.
    pub delta: Option<u64>,
    /// Total probed bins per insert in grouped schemes.
    pub d: Option<u64>,
    /// Number of probed groups in grouped schemes.
    pub c_groups: Option<u64>,
    /// Move budget per insert.
    pub h: Option<u64>,
    /// Degree exponent (delta = n^epsilon).
    pub epsilon: Option<f64>,
}

/// A bound term: either a finite value or an explicit out-of-regime flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TermValue {
    Value(f64),
    OutOfRegime(&'static str),
}

impl TermValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            TermValue::Value(v) => Some(*v),
            TermValue::OutOfRegime(_) => None,
        }
    }

    fn finite(v: f64, regime: &'static str) -> Self {
        if v.is_finite() {
            TermValue::Value(v)
        } else {
            TermValue::OutOfRegime(regime)
        }
    }
}

/// Leading bound terms, evaluated with base-2 logarithms (each field name
/// states the base where it differs).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub params: BoundParams,
    /// log2 log2 n.
    pub loglog_term: TermValue,
    /// log2 n / log2(delta / log2^4 n); flagged when delta <= log2^4 n.
    pub upper_degree_term: Option<TermValue>,
    /// log2 n / log2(delta * log2 n).
    pub lower_degree_term: Option<TermValue>,
    /// 1 / epsilon.
    pub epsilon_term: Option<TermValue>,
    /// log2 log2 n / (h * log2(log2 log2 n / h)); flagged for h = 0 and for
    /// h >= log2 log2 n.
    pub moves_term: Option<TermValue>,
    /// log2 log2 n / (d * ln phi_c).
    pub grouped_term_ln_phi: Option<TermValue>,
    /// log2 log2 n / (d * log2 phi_c): same term with the base-2 logarithm
    /// of the growth rate, reported alongside the natural-log variant.
    pub grouped_term_log2_phi: Option<TermValue>,
}

/// Evaluate the leading bound terms (no hidden constants) at the given
/// parameters. Out-of-regime combinations are flagged, never silently
/// non-finite.
pub fn predicted_bounds(params: BoundParams) -> BoundReport {
    let n = params.n as f64;
    let log_n = libm::log2(n);
    let loglog = libm::log2(log_n);
    let loglog_term = if params.n >= 2 {
        TermValue::finite(loglog, "n below 2")
    } else {
        TermValue::OutOfRegime("n below 2")
    };

    let upper_degree_term = params.delta.map(|delta| {
        let log4 = log_n * log_n * log_n * log_n;
        if (delta as f64) <= log4 {
            TermValue::OutOfRegime("degree at most log2^4 n")
        } else {
            TermValue::finite(
                log_n / libm::log2(delta as f64 / log4),
                "degree at most log2^4 n",
            )
        }
    });

    let lower_degree_term = params.delta.map(|delta| {
        let arg = delta as f64 * log_n;
        if arg <= 1.0 {
            TermValue::OutOfRegime("delta * log2 n at most 1")
        } else {
            TermValue::finite(log_n / libm::log2(arg), "delta * log2 n at most 1")
        }
    });

    let epsilon_term = params.epsilon.map(|eps| {
        if eps > 0.0 {
            TermValue::finite(1.0 / eps, "epsilon not positive")
        } else {
            TermValue::OutOfRegime("epsilon not positive")
        }
    });

    let moves_term = params.h.map(|h| {
        if h == 0 {
            TermValue::OutOfRegime("h is zero")
        } else if loglog <= h as f64 {
            TermValue::OutOfRegime("h at least log2 log2 n")
        } else {
            TermValue::finite(
                loglog / (h as f64 * libm::log2(loglog / h as f64)),
                "h at least log2 log2 n",
            )
        }
    });

    let grouped = match (params.d, params.c_groups) {
        (Some(d), Some(c)) => {
            if d == 0 {
                Some((
                    TermValue::OutOfRegime("d is zero"),
                    TermValue::OutOfRegime("d is zero"),
                ))
            } else if c < 2 {
                Some((
                    TermValue::OutOfRegime("fewer than 2 groups"),
                    TermValue::OutOfRegime("fewer than 2 groups"),
                ))
            } else {
                let phi = compute_phi(c as usize, 1e-12)
                    .expect("phi converges for c >= 2");
                Some((
                    TermValue::finite(loglog / (d as f64 * libm::log(phi)), "phi at 1"),
                    TermValue::finite(loglog / (d as f64 * libm::log2(phi)), "phi at 1"),
                ))
            }
        }
        _ => None,
    };
    let (grouped_term_ln_phi, grouped_term_log2_phi) = match grouped {
        Some((a, b)) => (Some(a), Some(b)),
        None => (None, None),
    };

    BoundReport {
        params,
        loglog_term,
        upper_degree_term,
        lower_degree_term,
        epsilon_term,
        moves_term,
        grouped_term_ln_phi,
        grouped_term_log2_phi,
    }
}

/// Per-trial metrics consumed by [`aggregate_trials`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialMetrics {
    pub max_load: u64,
    pub gap: f64,
}

/// Exact order statistics of one metric: nearest-rank percentiles (no
/// interpolation), so results are identical across implementations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary<T> {
    pub count: usize,
    pub median: T,
    pub p10: T,
    pub p90: T,
    pub min: T,
    pub max: T,
}

/// Cross-trial summary of max load and gap.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub max_load: MetricSummary<u64>,
    pub gap: MetricSummary<f64>,
}

fn nearest_rank<T: Copy>(sorted: &[T], q: f64) -> T {
    let rank = libm::ceil(q * sorted.len() as f64) as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

fn summarize<T: Copy>(sorted: &[T]) -> MetricSummary<T> {
    MetricSummary {
        count: sorted.len(),
        median: nearest_rank(sorted, 0.50),
        p10: nearest_rank(sorted, 0.10),
        p90: nearest_rank(sorted, 0.90),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
    }
}

/// Sort-based order statistics over per-trial results; permutation-invariant
/// and deterministic. Errors on empty input.
pub fn aggregate_trials(metrics: &[TrialMetrics]) -> Result<TrialSummary> {
    if metrics.is_empty() {
        return Err(Error::InvalidParameter("no trial results to aggregate"));
    }
    let mut max_loads: Vec<u64> = metrics.iter().map(|m| m.max_load).collect();
    max_loads.sort_unstable();
    let mut gaps: Vec<f64> = metrics.iter().map(|m| m.gap).collect();
    gaps.sort_unstable_by(f64::total_cmp);
    Ok(TrialSummary {
        max_load: summarize(&max_loads),
        gap: summarize(&gaps),
    })
}

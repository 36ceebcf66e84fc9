//! Iterative muting heuristics.
//!
//! Starting from the non-cooperative assignment (nothing muted), each
//! iteration tries muting every candidate set of up to `m̃` BSs *on top of*
//! what is already muted, re-running the per-BS greedy assignment under
//! each trial column, and commits the best strictly improving trial. The
//! loop stops when nothing improves; committed mutings are never undone.
//!
//! `m̃ = 1` is the classic one-BS-at-a-time greedy; `m̃ = M − 1` makes the
//! first iteration scan every possible muting column, which is an
//! exhaustive search.

use serde::Serialize;

use crate::csi::CsiTable;
use crate::error::{Error, Result};
use crate::mask::BsMask;
use crate::network::ConnectionMatrix;
use crate::pf::{decision_objective, greedy_column_slice, PfState, PrbDecision};

/// Breadth and scope of the greedy muting search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreedyConfig {
    num_bs: usize,
    m_tilde: usize,
    /// BSs eligible for muting, ascending.
    pool: Vec<usize>,
}

impl GreedyConfig {
    /// All BSs eligible, muting up to `m_tilde` of them per iteration.
    /// Requires `1 ≤ m_tilde ≤ num_bs − 1`.
    pub fn new(num_bs: usize, m_tilde: usize) -> Result<Self> {
        Self::with_pool(num_bs, m_tilde, (0..num_bs).collect())
    }

    /// Maximum breadth: `m_tilde = num_bs − 1`, exhaustive on the first
    /// iteration.
    pub fn all_bs(num_bs: usize) -> Result<Self> {
        if num_bs < 2 {
            return Err(Error::config("muting breadth requires at least 2 BSs"));
        }
        Self::new(num_bs, num_bs - 1)
    }

    /// Restrict the candidate pool to a subset of BSs.
    pub fn with_pool(num_bs: usize, m_tilde: usize, pool: Vec<usize>) -> Result<Self> {
        if m_tilde < 1 || m_tilde + 1 > num_bs {
            return Err(Error::config(format!(
                "muting breadth {m_tilde} out of range 1..={} for {num_bs} BSs",
                num_bs.saturating_sub(1)
            )));
        }
        if pool.is_empty() {
            return Err(Error::config("muting candidate pool is empty"));
        }
        if pool.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("muting candidate pool must be strictly ascending"));
        }
        if *pool.last().unwrap() >= num_bs {
            return Err(Error::config("muting candidate pool contains an unknown BS"));
        }
        Ok(GreedyConfig { num_bs, m_tilde, pool })
    }

    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn m_tilde(&self) -> usize {
        self.m_tilde
    }

    pub fn pool(&self) -> &[usize] {
        &self.pool
    }
}

/// All subsets of the candidate pool of size `1..=m̃`, each exactly once,
/// ordered by cardinality then lexicographically by ascending members —
/// the order trials are evaluated in, which is also the tie-break order.
pub fn candidate_muting_sets(config: &GreedyConfig) -> Vec<BsMask> {
    let pool = config.pool();
    let mut out = Vec::new();
    let mut current = Vec::new();
    for k in 1..=config.m_tilde().min(pool.len()) {
        combinations(pool, k, 0, &mut current, &mut out);
    }
    out
}

fn combinations(
    pool: &[usize],
    k: usize,
    start: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<BsMask>,
) {
    if current.len() == k {
        out.push(BsMask::from_indices(current.iter().copied()));
        return;
    }
    for i in start..pool.len() {
        current.push(pool[i]);
        combinations(pool, k, i + 1, current, out);
        current.pop();
    }
}

/// One committed greedy iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyStep {
    /// The candidate set that won this iteration.
    pub added: BsMask,
    /// Muting column after committing it.
    pub column: BsMask,
    /// Objective under the new column.
    pub objective: f64,
    /// Scheduled UEs under the new column, ascending.
    pub scheduled: Vec<usize>,
}

/// Full decision path of one greedy run, suitable for byte-exact
/// comparison across implementations via its JSON form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyTrace {
    /// Objective of the starting (nothing-muted) assignment.
    pub initial_objective: f64,
    /// Starting assignment, ascending UEs.
    pub initial_scheduled: Vec<usize>,
    pub steps: Vec<GreedyStep>,
}

/// Greedy muting for one PRB; see the module docs for the algorithm.
pub fn cs_greedy(
    table: &CsiTable,
    conn: &ConnectionMatrix,
    state: &PfState,
    prb: usize,
    config: &GreedyConfig,
) -> PrbDecision {
    cs_greedy_traced(table, conn, state, prb, config).0
}

/// [`cs_greedy`] plus the per-iteration decision trace.
pub fn cs_greedy_traced(
    table: &CsiTable,
    conn: &ConnectionMatrix,
    state: &PfState,
    prb: usize,
    config: &GreedyConfig,
) -> (PrbDecision, GreedyTrace) {
    let sets = candidate_muting_sets(config);
    let mut committed = BsMask::EMPTY;
    let mut current = greedy_column_slice(table, conn, state, prb, committed);
    let mut current_obj = decision_objective(table, state, prb, &current);
    let mut trace = GreedyTrace {
        initial_objective: current_obj,
        initial_scheduled: current.scheduled.clone(),
        steps: Vec::new(),
    };
    loop {
        let mut winner: Option<(BsMask, PrbDecision, f64)> = None;
        for &set in &sets {
            if set.is_subset_of(committed) {
                continue;
            }
            let trial = committed.union(set);
            let slice = greedy_column_slice(table, conn, state, prb, trial);
            let objective = decision_objective(table, state, prb, &slice);
            if objective > winner.as_ref().map_or(current_obj, |(_, _, best)| *best) {
                winner = Some((set, slice, objective));
            }
        }
        let Some((set, slice, objective)) = winner else {
            break;
        };
        committed = committed.union(set);
        current = slice;
        current_obj = objective;
        trace.steps.push(GreedyStep {
            added: set,
            column: committed,
            objective,
            scheduled: current.scheduled.clone(),
        });
    }
    (current, trace)
}

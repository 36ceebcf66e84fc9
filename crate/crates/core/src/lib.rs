//! Coordinated multi-cell downlink scheduling with base-station muting.
//!
//! A central controller schedules one user per base station (BS) per
//! resource block (PRB) and may additionally *mute* base stations on
//! individual PRBs to remove their interference. Users report channel
//! quality under a small set of hypothetical muting scenarios; the
//! controller combines those reports into a proportional-fair objective
//! and picks the joint assignment + muting pattern per PRB.
//!
//! The crate provides:
//!
//! - [`network`]: static scenario state (channel power gains, association,
//!   strongest-interferer bookkeeping) plus a synthetic channel generator
//!   in [`chanmodel`],
//! - [`csi`]: muting-scenario enumeration, SINR evaluation and rate
//!   reports,
//! - [`pf`]: proportional-fair state, decision evaluation and the
//!   non-cooperative baseline scheduler,
//! - [`exact`]: the per-PRB optimal scheduler (candidate reduction,
//!   branch-and-bound search, brute-force cross-check oracle),
//! - [`greedy`]: iterative muting heuristics of configurable breadth,
//! - [`sim`]: Monte Carlo experiment harness and summary metrics,
//! - [`io`]: config/scenario files and CSV/JSON outputs.
//!
//! Scheduling across PRBs and Monte Carlo drops is data-parallel. With the
//! default `parallel` feature the crate uses rayon; without it the same
//! code runs sequentially. Outputs are collected in index order in both
//! builds, so a fixed (config, seed) pair produces byte-identical results
//! regardless of worker count.

pub mod chanmodel;
pub mod csi;
pub mod error;
pub mod exact;
pub mod greedy;
pub mod io;
pub mod mask;
pub mod network;
mod par;
pub mod pf;
pub mod sim;
pub mod stats;
#[cfg(test)]
pub(crate) mod testutil;
pub mod units;

pub use error::{Error, Result};
pub use mask::BsMask;
pub use network::{
    associate_ues, strongest_interferers, BsClass, ConnectionMatrix, CreOffsets, InterfererSets,
    NetworkScenario,
};

pub use csi::{enumerate_scenarios, generate_reports, sinr_under_scenario, CsiReport, CsiTable, RateMapper};
pub use exact::{
    build_subproblem, build_subproblem_unreduced, build_unique_sets, decode_decision, inlp_oracle,
    inlp_oracle_decision, reduce_candidates, solve_exact, solve_exhaustive, CandidateReduction,
    LiftedSolution, PrbSubproblem, UniqueIndicatorSets,
};
pub use chanmodel::{generate_scenario, ChannelModelConfig};
pub use greedy::{
    candidate_muting_sets, cs_greedy, cs_greedy_traced, GreedyConfig, GreedyStep, GreedyTrace,
};
pub use pf::{
    decision_objective, evaluate_decision, noncoop_pfs, noncoop_prb_slice, PfState, PrbDecision,
    SchedulingDecision, TtiResult, DEFAULT_AVG_FLOOR,
};
pub use sim::{
    cell_edge_throughput, compare_experiment, generate_drop, geometric_mean, muted_fraction,
    run_experiment, ChannelSource, CompareOutput, CompareRow, DropMetrics, DropState, McsMode,
    MetricsSummary, NoiseMode, OocMode, RunOutput, SchedulerKind, SimConfig,
};
pub use stats::{paired_t_test_greater, TTestOutcome};

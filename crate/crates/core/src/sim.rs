//! Experiment harness: multi-drop, multi-TTI campaigns with pluggable
//! schedulers and summary metrics.
//!
//! A campaign is a set of independent drops. Each drop generates one
//! static channel realization, then runs a TTI loop: schedule every PRB,
//! price the realized rates, update the PF averages. Drops and PRBs are
//! data-parallel; the PF recursion inside a drop is inherently sequential.
//! Everything is keyed off one seed, and parallel maps preserve index
//! order, so outputs are byte-identical regardless of worker count.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chanmodel::{generate_scenario, ChannelModelConfig};
use crate::csi::{generate_reports, CsiTable, RateMapper};
use crate::error::{Error, Result};
use crate::exact::{build_subproblem, decode_decision, solve_exact};
use crate::greedy::{cs_greedy, GreedyConfig};
use crate::network::{
    associate_ues, strongest_interferers, BsClass, ConnectionMatrix, CreOffsets, InterfererSets,
    NetworkScenario,
};
use crate::par::par_map_collect;
use crate::pf::{
    evaluate_decision, noncoop_prb_slice, PfState, PrbDecision, SchedulingDecision,
    DEFAULT_AVG_FLOOR, DEFAULT_BETA,
};
use crate::units::{db_to_linear, thermal_noise_dbm, PRB_BANDWIDTH_HZ};

/// Output schema version stamped into serialized results.
pub const SCHEMA_VERSION: u32 = 1;

/// Receiver noise floor used in "noiseless" runs, mW. A stand-in for an
/// exact zero that keeps SINRs finite: it sits ~30 decades below any
/// realistic received power, so an interference-free link is effectively
/// unbounded, yet even a full-power unity-gain link stays well inside
/// f64 range (no overflow to infinity).
pub const NOISELESS_EPSILON_MW: f64 = 1e-40;

/// Scheduling algorithm run on every PRB of every TTI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchedulerKind {
    /// Per-cell PF scheduling, no coordination, nothing muted.
    NoncoopPfs,
    /// Exact per-PRB coordinated solve (branch and bound on the lifted
    /// selection program).
    CsIlp,
    /// Greedy coordinated scheduling, one BS muted per iteration.
    CsGa,
    /// Generalized greedy: up to `m_tilde` BSs muted per iteration.
    CsGg,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 4] =
        [SchedulerKind::NoncoopPfs, SchedulerKind::CsIlp, SchedulerKind::CsGa, SchedulerKind::CsGg];

    pub fn as_str(self) -> &'static str {
        match self {
            SchedulerKind::NoncoopPfs => "noncoop_pfs",
            SchedulerKind::CsIlp => "cs_ilp",
            SchedulerKind::CsGa => "cs_ga",
            SchedulerKind::CsGg => "cs_gg",
        }
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchedulerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "noncoop_pfs" => Ok(SchedulerKind::NoncoopPfs),
            "cs_ilp" => Ok(SchedulerKind::CsIlp),
            "cs_ga" => Ok(SchedulerKind::CsGa),
            "cs_gg" => Ok(SchedulerKind::CsGg),
            other => Err(Error::parse(format!(
                "unknown scheduler {other:?}; expected one of noncoop_pfs, cs_ilp, cs_ga, cs_gg"
            ))),
        }
    }
}

/// Spectral-efficiency mapping mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McsMode {
    /// Pure Shannon mapping.
    #[default]
    Unbounded,
    /// Shannon clipped at `mcs_cap_bits` bits/symbol, like a finite MCS
    /// table.
    Capped,
}

/// Receiver noise mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// Interference-limited: a vanishing epsilon floor.
    #[default]
    Noiseless,
    /// Thermal noise over one PRB plus `noise_figure_db`.
    Noisy,
}

/// Out-of-cluster interference mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OocMode {
    /// Isolated cluster.
    #[default]
    None,
    /// Fixed ring of distant full-power BSs (see the channel model).
    FixedRing,
}

/// Where the channel gains of a drop come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelSource {
    /// Synthetic geometry, redrawn per drop.
    Synthetic { model: ChannelModelConfig },
    /// Gain tensor imported from a file (identical for every drop).
    External {
        /// Tensor file: header `N M L`, then N·M·L linear gains row-major.
        gain_tensor: PathBuf,
        /// Per-BS total transmit power over the band, dBm.
        tx_power_dbm: Vec<f64>,
        /// Per-BS class, used by CRE association.
        bs_class: Vec<BsClass>,
    },
}

fn default_m_tilde() -> usize {
    1
}
fn default_drops() -> usize {
    20
}
fn default_ttis() -> usize {
    400
}
fn default_beta() -> f64 {
    DEFAULT_BETA
}
fn default_avg_floor() -> f64 {
    DEFAULT_AVG_FLOOR
}
fn default_mcs_cap() -> f64 {
    5.4
}
fn default_noise_figure() -> f64 {
    9.0
}
fn default_csi_refresh() -> usize {
    5
}
fn default_rate_scale() -> f64 {
    1.0
}

/// Full experiment description. Serializable so a run is reproducible
/// from its echoed config alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub scheduler: SchedulerKind,
    /// Muting breadth per greedy iteration (`cs_gg` only; `cs_ga` always
    /// uses 1).
    #[serde(default = "default_m_tilde")]
    pub m_tilde: usize,
    /// Strongest-interferer set size reported by each UE.
    pub m_prime: usize,
    #[serde(default = "default_drops")]
    pub drops: usize,
    #[serde(default = "default_ttis")]
    pub ttis: usize,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_avg_floor")]
    pub avg_floor: f64,
    #[serde(default)]
    pub mcs: McsMode,
    #[serde(default = "default_mcs_cap")]
    pub mcs_cap_bits: f64,
    #[serde(default)]
    pub noise: NoiseMode,
    #[serde(default = "default_noise_figure")]
    pub noise_figure_db: f64,
    #[serde(default)]
    pub ooc: OocMode,
    /// Pico cell range expansion bias, dB.
    #[serde(default)]
    pub cre_pico_db: f64,
    #[serde(default)]
    pub seed: u64,
    /// Reporting period, TTIs. Channels are static within a drop, so a
    /// refresh reproduces the same table; the field is kept so configs
    /// carry the full campaign description.
    #[serde(default = "default_csi_refresh")]
    pub csi_refresh_ttis: usize,
    /// Rate units per bit/symbol of spectral efficiency.
    #[serde(default = "default_rate_scale")]
    pub rate_scale: f64,
    pub channel: ChannelSource,
}

impl SimConfig {
    /// Synthetic macro-only starter config; callers override fields as
    /// needed.
    pub fn synthetic(
        scheduler: SchedulerKind,
        num_macro: usize,
        num_ue: usize,
        num_prb: usize,
        m_prime: usize,
    ) -> Self {
        SimConfig {
            scheduler,
            m_tilde: default_m_tilde(),
            m_prime,
            drops: default_drops(),
            ttis: default_ttis(),
            beta: default_beta(),
            avg_floor: default_avg_floor(),
            mcs: McsMode::default(),
            mcs_cap_bits: default_mcs_cap(),
            noise: NoiseMode::default(),
            noise_figure_db: default_noise_figure(),
            ooc: OocMode::default(),
            cre_pico_db: 0.0,
            seed: 0,
            csi_refresh_ttis: default_csi_refresh(),
            rate_scale: default_rate_scale(),
            channel: ChannelSource::Synthetic {
                model: ChannelModelConfig::macro_only(num_macro, num_ue, num_prb),
            },
        }
    }

    /// Receiver noise per PRB in mW for the configured mode.
    pub fn noise_mw(&self) -> f64 {
        match self.noise {
            NoiseMode::Noiseless => NOISELESS_EPSILON_MW,
            NoiseMode::Noisy => {
                db_to_linear(thermal_noise_dbm(PRB_BANDWIDTH_HZ) + self.noise_figure_db)
            }
        }
    }

    /// SINR-to-rate mapping for the configured MCS mode.
    pub fn rate_mapper(&self) -> Result<RateMapper> {
        match self.mcs {
            McsMode::Unbounded => RateMapper::shannon(self.rate_scale),
            McsMode::Capped => RateMapper::shannon_capped(self.rate_scale, self.mcs_cap_bits),
        }
    }

    /// Greedy breadth actually used: `cs_ga` is the breadth-1 special
    /// case regardless of `m_tilde`.
    pub fn effective_m_tilde(&self) -> usize {
        match self.scheduler {
            SchedulerKind::CsGa => 1,
            _ => self.m_tilde,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.drops == 0 || self.ttis == 0 {
            return Err(Error::config("drops and ttis must be positive"));
        }
        if !(self.beta >= 0.0 && self.beta < 1.0) {
            return Err(Error::config("beta must lie in [0, 1)"));
        }
        if !(self.avg_floor.is_finite() && self.avg_floor > 0.0) {
            return Err(Error::config("avg_floor must be positive"));
        }
        if !(self.mcs_cap_bits.is_finite() && self.mcs_cap_bits > 0.0) {
            return Err(Error::config("mcs_cap_bits must be positive"));
        }
        if !self.noise_figure_db.is_finite() {
            return Err(Error::config("noise_figure_db must be finite"));
        }
        if !(self.rate_scale.is_finite() && self.rate_scale > 0.0) {
            return Err(Error::config("rate_scale must be positive"));
        }
        if !(self.cre_pico_db.is_finite() && self.cre_pico_db >= 0.0) {
            return Err(Error::config("cre_pico_db must be non-negative"));
        }
        if self.csi_refresh_ttis == 0 {
            return Err(Error::config("csi_refresh_ttis must be positive"));
        }
        if let ChannelSource::Synthetic { model } = &self.channel {
            model.validate()?;
            let num_bs = model.num_bs();
            if self.scheduler != SchedulerKind::NoncoopPfs && num_bs < 2 {
                return Err(Error::config("coordinated scheduling needs at least two BSs"));
            }
            if self.m_prime >= num_bs {
                return Err(Error::config(format!(
                    "m_prime = {} must be smaller than the number of BSs ({num_bs})",
                    self.m_prime
                )));
            }
            if self.scheduler == SchedulerKind::CsGg
                && !(1..num_bs).contains(&self.effective_m_tilde())
            {
                return Err(Error::config(format!(
                    "m_tilde = {} must lie in 1..={} for cs_gg",
                    self.m_tilde,
                    num_bs - 1
                )));
            }
        }
        Ok(())
    }
}

/// One drop's generated state, before any scheduling.
#[derive(Debug, Clone, PartialEq)]
pub struct DropState {
    pub scenario: NetworkScenario,
    pub conn: ConnectionMatrix,
    pub interferers: InterfererSets,
    /// Seed the drop's RNG stream was derived from.
    pub seed: u64,
}

/// Generate drop number `drop` of the campaign: channel realization, CRE
/// association, strongest-interferer sets. Independent of the scheduler,
/// so different schedulers see identical drops and can be compared
/// pairwise per drop.
pub fn generate_drop(config: &SimConfig, drop: usize) -> Result<DropState> {
    let seed = config.seed.wrapping_add(drop as u64);
    let scenario = match &config.channel {
        ChannelSource::Synthetic { model } => generate_scenario(
            model,
            config.noise_mw(),
            config.ooc == OocMode::FixedRing,
            seed,
        )?,
        ChannelSource::External { gain_tensor, tx_power_dbm, bs_class } => {
            let tensor = crate::io::read_gain_tensor(gain_tensor)?;
            tensor.into_scenario(tx_power_dbm, bs_class.clone(), config.noise_mw())?
        }
    };
    if config.m_prime >= scenario.num_bs() {
        return Err(Error::config(format!(
            "m_prime = {} must be smaller than the number of BSs ({})",
            config.m_prime,
            scenario.num_bs()
        )));
    }
    let conn = associate_ues(&scenario, CreOffsets::pico(config.cre_pico_db))?;
    let interferers = strongest_interferers(&scenario, &conn, config.m_prime)?;
    Ok(DropState { scenario, conn, interferers, seed })
}

/// Schedule one TTI: every PRB independently (in parallel when enabled),
/// assembled into a full decision.
pub fn schedule_tti(
    scheduler: SchedulerKind,
    m_tilde: usize,
    table: &CsiTable,
    conn: &ConnectionMatrix,
    state: &PfState,
) -> Result<SchedulingDecision> {
    let greedy_config = match scheduler {
        SchedulerKind::CsGa => Some(GreedyConfig::new(conn.num_bs(), 1)?),
        SchedulerKind::CsGg => Some(GreedyConfig::new(conn.num_bs(), m_tilde)?),
        _ => None,
    };
    let slices: Vec<Result<PrbDecision>> = par_map_collect(table.num_prb(), |prb| {
        schedule_prb(scheduler, greedy_config.as_ref(), table, conn, state, prb)
    });
    let slices = slices.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SchedulingDecision::from_prb_slices(&slices, conn.num_ue(), conn.num_bs()))
}

fn schedule_prb(
    scheduler: SchedulerKind,
    greedy_config: Option<&GreedyConfig>,
    table: &CsiTable,
    conn: &ConnectionMatrix,
    state: &PfState,
    prb: usize,
) -> Result<PrbDecision> {
    match scheduler {
        SchedulerKind::NoncoopPfs => Ok(noncoop_prb_slice(table, conn, state, prb)),
        SchedulerKind::CsIlp => {
            let problem = build_subproblem(conn, table, state, prb);
            let solution = solve_exact(&problem);
            decode_decision(&problem, &solution)
        }
        SchedulerKind::CsGa | SchedulerKind::CsGg => {
            let config = greedy_config.expect("greedy schedulers carry a config");
            Ok(cs_greedy(table, conn, state, prb, config))
        }
    }
}

/// Metrics of one finished drop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropMetrics {
    /// Final PF average throughput per UE.
    pub per_ue: Vec<f64>,
    pub cell_edge: f64,
    pub geo_mean: f64,
    /// Mean muted fraction over (BS, PRB, TTI).
    pub muted_fraction: f64,
}

/// Campaign-level summary. Cell-edge and geometric mean are computed on
/// the pooled per-UE population of all drops; the muted fraction is the
/// mean over drops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub cell_edge: f64,
    pub geo_mean: f64,
    pub mean_throughput: f64,
    pub muted_fraction: f64,
}

/// One experiment's full result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub schema_version: u32,
    pub scheduler: SchedulerKind,
    pub config: SimConfig,
    pub drops: Vec<DropMetrics>,
    pub summary: MetricsSummary,
}

fn run_drop(config: &SimConfig, drop: usize) -> Result<DropMetrics> {
    let state = generate_drop(config, drop)?;
    let mapper = config.rate_mapper()?;
    let table = generate_reports(&state.scenario, &state.conn, &state.interferers, &mapper)?;
    let num_ue = state.scenario.num_ue();
    let mut pf = PfState::from_avgs(vec![config.avg_floor; num_ue], config.beta, config.avg_floor)?;
    let mut muted_sum = 0.0;
    for _tti in 0..config.ttis {
        let decision =
            schedule_tti(config.scheduler, config.effective_m_tilde(), &table, &state.conn, &pf)?;
        let result = evaluate_decision(&state.conn, &table, &decision, &pf)?;
        pf.update_avg_throughput(&result.realized_rate)?;
        muted_sum += result.muted_fraction;
    }
    let per_ue = pf.avgs().to_vec();
    Ok(DropMetrics {
        cell_edge: cell_edge_throughput(&per_ue)?,
        geo_mean: geometric_mean(&per_ue, config.avg_floor)?,
        muted_fraction: muted_sum / config.ttis as f64,
        per_ue,
    })
}

fn summarize(drops: &[DropMetrics], avg_floor: f64) -> Result<MetricsSummary> {
    let pooled: Vec<f64> = drops.iter().flat_map(|d| d.per_ue.iter().copied()).collect();
    let muted = drops.iter().map(|d| d.muted_fraction).sum::<f64>() / drops.len() as f64;
    Ok(MetricsSummary {
        cell_edge: cell_edge_throughput(&pooled)?,
        geo_mean: geometric_mean(&pooled, avg_floor)?,
        mean_throughput: pooled.iter().sum::<f64>() / pooled.len() as f64,
        muted_fraction: muted,
    })
}

/// Run the configured campaign: all drops (in parallel when enabled),
/// each scheduled TTI by TTI, then summarized.
pub fn run_experiment(config: &SimConfig) -> Result<RunOutput> {
    config.validate()?;
    let outcomes: Vec<Result<DropMetrics>> =
        par_map_collect(config.drops, |drop| run_drop(config, drop));
    let drops = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let summary = summarize(&drops, config.avg_floor)?;
    Ok(RunOutput {
        schema_version: SCHEMA_VERSION,
        scheduler: config.scheduler,
        config: config.clone(),
        drops,
        summary,
    })
}

/// One scheduler's results inside a comparison, with per-drop series for
/// paired tests against any other row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub scheduler: SchedulerKind,
    pub summary: MetricsSummary,
    /// Pooled geometric mean over the baseline's.
    pub geo_mean_ratio: f64,
    /// Pooled cell-edge throughput over the baseline's.
    pub cell_edge_ratio: f64,
    pub drop_geo_means: Vec<f64>,
    pub drop_cell_edges: Vec<f64>,
    pub drop_muted_fractions: Vec<f64>,
}

/// Results of running several schedulers on identical drops, normalized
/// against the non-cooperative baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareOutput {
    pub schema_version: u32,
    /// Campaign config; `scheduler` here names the baseline.
    pub config: SimConfig,
    pub rows: Vec<CompareRow>,
}

/// Run every scheduler in `schedulers` on the same campaign (same seed,
/// hence identical drops) and normalize against `noncoop_pfs`. The
/// baseline is always run and reported as the first row, whether or not
/// it is listed.
pub fn compare_experiment(
    config: &SimConfig,
    schedulers: &[SchedulerKind],
) -> Result<CompareOutput> {
    let mut base_config = config.clone();
    base_config.scheduler = SchedulerKind::NoncoopPfs;
    base_config.validate()?;
    let baseline = run_experiment(&base_config)?;

    let mut rows = vec![make_row(&baseline, &baseline)];
    for &kind in schedulers {
        if kind == SchedulerKind::NoncoopPfs {
            continue;
        }
        let mut run_config = config.clone();
        run_config.scheduler = kind;
        let run = run_experiment(&run_config)?;
        rows.push(make_row(&run, &baseline));
    }
    Ok(CompareOutput { schema_version: SCHEMA_VERSION, config: base_config, rows })
}

fn make_row(run: &RunOutput, baseline: &RunOutput) -> CompareRow {
    CompareRow {
        scheduler: run.scheduler,
        summary: run.summary.clone(),
        geo_mean_ratio: run.summary.geo_mean / baseline.summary.geo_mean,
        cell_edge_ratio: run.summary.cell_edge / baseline.summary.cell_edge,
        drop_geo_means: run.drops.iter().map(|d| d.geo_mean).collect(),
        drop_cell_edges: run.drops.iter().map(|d| d.cell_edge).collect(),
        drop_muted_fractions: run.drops.iter().map(|d| d.muted_fraction).collect(),
    }
}

/// Mean throughput of the worst ⌈5%⌉ of UEs.
pub fn cell_edge_throughput(per_ue: &[f64]) -> Result<f64> {
    if per_ue.is_empty() {
        return Err(Error::domain("cell-edge throughput of an empty population"));
    }
    let mut sorted = per_ue.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let count = per_ue.len().div_ceil(20);
    Ok(sorted[..count].iter().sum::<f64>() / count as f64)
}

/// Geometric mean with values floored at `floor` so idle UEs cannot
/// collapse it to zero.
pub fn geometric_mean(values: &[f64], floor: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::domain("geometric mean of an empty population"));
    }
    if !(floor.is_finite() && floor > 0.0) {
        return Err(Error::domain("geometric mean floor must be positive"));
    }
    let log_sum: f64 = values.iter().map(|&v| v.max(floor).ln()).sum();
    Ok((log_sum / values.len() as f64).exp())
}

/// Mean muted fraction over a run's per-TTI decisions.
pub fn muted_fraction(decisions: &[SchedulingDecision]) -> f64 {
    if decisions.is_empty() {
        return 0.0;
    }
    decisions.iter().map(SchedulingDecision::muted_fraction).sum::<f64>() / decisions.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pf::decision_objective;
    use approx::assert_relative_eq;

    fn tiny_config(scheduler: SchedulerKind) -> SimConfig {
        let mut config = SimConfig::synthetic(scheduler, 3, 9, 2, 2);
        config.drops = 2;
        config.ttis = 10;
        config.seed = 42;
        config
    }

    #[test]
    fn scheduler_kind_round_trips_through_strings() {
        for kind in SchedulerKind::ALL {
            assert_eq!(kind.as_str().parse::<SchedulerKind>().unwrap(), kind);
        }
        assert!("pf".parse::<SchedulerKind>().is_err());
        let json = serde_json::to_string(&SchedulerKind::CsIlp).unwrap();
        assert_eq!(json, "\"cs_ilp\"");
    }

    #[test]
    fn noise_modes_map_to_expected_floors() {
        let mut config = tiny_config(SchedulerKind::NoncoopPfs);
        assert_eq!(config.noise_mw(), NOISELESS_EPSILON_MW);
        config.noise = NoiseMode::Noisy;
        // -174 dBm/Hz + 10 log10(180 kHz) + 9 dB ≈ -112.45 dBm.
        assert_relative_eq!(config.noise_mw(), db_to_linear(-112.4472), max_relative = 1e-4);
    }

    #[test]
    fn config_validation_catches_inconsistencies() {
        let mut config = tiny_config(SchedulerKind::CsIlp);
        config.m_prime = 3;
        assert!(config.validate().is_err());
        config.m_prime = 2;
        config.beta = 1.0;
        assert!(config.validate().is_err());
        config.beta = 0.97;
        config.scheduler = SchedulerKind::CsGg;
        config.m_tilde = 3;
        assert!(config.validate().is_err());
        config.m_tilde = 2;
        assert!(config.validate().is_ok());
        config.drops = 0;
        assert!(config.validate().is_err());
    }

    #[test]
    fn drops_are_scheduler_independent() {
        let a = generate_drop(&tiny_config(SchedulerKind::NoncoopPfs), 1).unwrap();
        let b = generate_drop(&tiny_config(SchedulerKind::CsIlp), 1).unwrap();
        assert_eq!(a.scenario.gain_tensor(), b.scenario.gain_tensor());
        assert_eq!(a.conn, b.conn);
        assert_eq!(a.interferers, b.interferers);
        let c = generate_drop(&tiny_config(SchedulerKind::NoncoopPfs), 0).unwrap();
        assert_ne!(a.scenario.gain_tensor(), c.scenario.gain_tensor());
    }

    #[test]
    fn one_tti_run_matches_manual_replay() {
        let mut config = tiny_config(SchedulerKind::NoncoopPfs);
        config.drops = 1;
        config.ttis = 1;
        let run = run_experiment(&config).unwrap();

        let state = generate_drop(&config, 0).unwrap();
        let table = generate_reports(
            &state.scenario,
            &state.conn,
            &state.interferers,
            &config.rate_mapper().unwrap(),
        )
        .unwrap();
        let mut pf =
            PfState::from_avgs(vec![config.avg_floor; 9], config.beta, config.avg_floor).unwrap();
        let decision = schedule_tti(config.scheduler, 1, &table, &state.conn, &pf).unwrap();
        let result = evaluate_decision(&state.conn, &table, &decision, &pf).unwrap();
        pf.update_avg_throughput(&result.realized_rate).unwrap();
        assert_eq!(run.drops[0].per_ue, pf.avgs());
        // Someone was scheduled, so averages moved off the floor.
        assert!(run.drops[0].per_ue.iter().any(|&r| r > config.avg_floor));
    }

    #[test]
    fn runs_are_deterministic() {
        let config = tiny_config(SchedulerKind::CsGa);
        let a = serde_json::to_string(&run_experiment(&config).unwrap()).unwrap();
        let b = serde_json::to_string(&run_experiment(&config).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noncoop_mutes_nothing_ever() {
        let run = run_experiment(&tiny_config(SchedulerKind::NoncoopPfs)).unwrap();
        for drop in &run.drops {
            assert_eq!(drop.muted_fraction, 0.0);
        }
        assert_eq!(run.summary.muted_fraction, 0.0);
    }

    #[test]
    fn exact_scheduler_dominates_alternatives_every_tti() {
        // Replay the exact scheduler's trajectory; at every TTI and PRB
        // the exact objective must top every other scheduler's slice
        // priced on the same PF state. Greedy values are exact lower
        // bounds; a relative ulp allowance covers summation-order noise
        // in the cross-route comparison.
        let config = tiny_config(SchedulerKind::CsIlp);
        let state = generate_drop(&config, 0).unwrap();
        let table = generate_reports(
            &state.scenario,
            &state.conn,
            &state.interferers,
            &config.rate_mapper().unwrap(),
        )
        .unwrap();
        let num_ue = state.scenario.num_ue();
        let mut pf =
            PfState::from_avgs(vec![config.avg_floor; num_ue], config.beta, config.avg_floor)
                .unwrap();
        let ga = GreedyConfig::new(3, 1).unwrap();
        let gg = GreedyConfig::new(3, 2).unwrap();
        for _tti in 0..12 {
            for prb in 0..table.num_prb() {
                let problem = build_subproblem(&state.conn, &table, &pf, prb);
                let exact = solve_exact(&problem);
                let tol = 1e-9 * exact.objective.abs().max(1.0);
                for slice in [
                    noncoop_prb_slice(&table, &state.conn, &pf, prb),
                    cs_greedy(&table, &state.conn, &pf, prb, &ga),
                    cs_greedy(&table, &state.conn, &pf, prb, &gg),
                ] {
                    let objective = decision_objective(&table, &pf, prb, &slice);
                    assert!(
                        exact.objective + tol >= objective,
                        "exact {} beaten by {} at prb {prb}",
                        exact.objective,
                        objective
                    );
                }
            }
            let decision = schedule_tti(config.scheduler, 1, &table, &state.conn, &pf).unwrap();
            let result = evaluate_decision(&state.conn, &table, &decision, &pf).unwrap();
            pf.update_avg_throughput(&result.realized_rate).unwrap();
        }
    }

    #[test]
    fn comparison_normalizes_baseline_to_one() {
        let config = tiny_config(SchedulerKind::CsGa);
        let out = compare_experiment(&config, &[SchedulerKind::CsGa]).unwrap();
        assert_eq!(out.rows.len(), 2);
        assert_eq!(out.rows[0].scheduler, SchedulerKind::NoncoopPfs);
        assert_eq!(out.rows[0].geo_mean_ratio, 1.0);
        assert_eq!(out.rows[0].cell_edge_ratio, 1.0);
        assert_eq!(out.rows[1].scheduler, SchedulerKind::CsGa);
        assert_eq!(out.rows[1].drop_geo_means.len(), config.drops);
        // Identical drops: coordinated never falls below the baseline by
        // more than floating-point noise on this workload.
        assert!(out.rows[1].geo_mean_ratio > 0.9);
    }

    #[test]
    fn cell_edge_is_mean_of_worst_five_percent() {
        let v: Vec<f64> = (1..=20).map(f64::from).collect();
        assert_eq!(cell_edge_throughput(&v).unwrap(), 1.0);
        let v: Vec<f64> = (1..=21).map(f64::from).collect();
        assert_eq!(cell_edge_throughput(&v).unwrap(), 1.5);
        let v: Vec<f64> = (1..=40).map(f64::from).collect();
        assert_eq!(cell_edge_throughput(&v).unwrap(), 1.5);
        assert!(cell_edge_throughput(&[]).is_err());
    }

    #[test]
    fn geometric_mean_floors_idle_ues() {
        assert_relative_eq!(
            geometric_mean(&[1.0, 4.0], 1e-6).unwrap(),
            2.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            geometric_mean(&[0.0, 1.0], 0.01).unwrap(),
            0.1,
            max_relative = 1e-12
        );
        assert!(geometric_mean(&[], 1e-6).is_err());
        assert!(geometric_mean(&[1.0], 0.0).is_err());
    }

    #[test]
    fn muted_fraction_averages_decisions() {
        let mut a = SchedulingDecision::empty(2, 2, 2);
        a.set_muted(0, 0, true);
        let b = SchedulingDecision::empty(2, 2, 2);
        assert_eq!(muted_fraction(&[a, b]), 0.125);
        assert_eq!(muted_fraction(&[]), 0.0);
    }

    #[test]
    fn config_serde_round_trip() {
        let mut config = tiny_config(SchedulerKind::CsGg);
        config.m_tilde = 2;
        config.mcs = McsMode::Capped;
        config.noise = NoiseMode::Noisy;
        config.ooc = OocMode::FixedRing;
        config.cre_pico_db = 6.0;
        let json = serde_json::to_string(&config).unwrap();
        let back: SimConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, config);
    }
}

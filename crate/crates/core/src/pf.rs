//! Proportional-fair machinery: averaged throughput state, scheduling
//! decisions, decision evaluation, and the non-cooperative baseline.
//!
//! The controller maximizes the sum over UEs of instantaneous rate divided
//! by exponentially averaged throughput. Averages update once per TTI from
//! the realized rates and are floored at a small positive constant so the
//! metric stays finite before a UE has ever been served.

use crate::csi::CsiTable;
use crate::error::{Error, Result};
use crate::mask::BsMask;
use crate::network::ConnectionMatrix;

/// Smallest average throughput ever used in a PF denominator.
pub const DEFAULT_AVG_FLOOR: f64 = 1e-6;

/// Default forgetting factor of the throughput average.
pub const DEFAULT_BETA: f64 = 0.97;

/// Exponentially averaged per-UE throughput.
#[derive(Debug, Clone, PartialEq)]
pub struct PfState {
    avg: Vec<f64>,
    beta: f64,
    floor: f64,
}

impl PfState {
    /// Fresh state with every average at the floor.
    pub fn new(num_ue: usize, beta: f64) -> Result<Self> {
        Self::from_avgs(vec![DEFAULT_AVG_FLOOR; num_ue], beta, DEFAULT_AVG_FLOOR)
    }

    pub fn from_avgs(avg: Vec<f64>, beta: f64, floor: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::config("beta must lie strictly between 0 and 1"));
        }
        if !(floor.is_finite() && floor > 0.0) {
            return Err(Error::config("average floor must be finite and positive"));
        }
        if avg.iter().any(|a| !a.is_finite() || *a < floor) {
            return Err(Error::config("averages must be finite and at least the floor"));
        }
        Ok(PfState { avg, beta, floor })
    }

    pub fn num_ue(&self) -> usize {
        self.avg.len()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn avg(&self, ue: usize) -> f64 {
        self.avg[ue]
    }

    pub fn avgs(&self) -> &[f64] {
        &self.avg
    }

    /// PF metric of serving `ue` at `rate` right now.
    pub fn pf_metric(&self, ue: usize, rate: f64) -> f64 {
        rate / self.avg[ue]
    }

    /// Fold this TTI's realized rates into the averages:
    /// `avg <- max(beta * avg + (1 - beta) * rate, floor)`.
    pub fn update_avg_throughput(&mut self, realized: &[f64]) -> Result<()> {
        if realized.len() != self.avg.len() {
            return Err(Error::config("realized rate vector length must equal the UE count"));
        }
        for (a, &r) in self.avg.iter_mut().zip(realized) {
            *a = (self.beta * *a + (1.0 - self.beta) * r).max(self.floor);
        }
        Ok(())
    }
}

/// Joint decision for one TTI: which UEs transmit on which PRBs and which
/// BSs are muted per PRB.
#[derive(Debug, Clone, PartialEq)]
pub struct SchedulingDecision {
    num_ue: usize,
    num_bs: usize,
    num_prb: usize,
    /// `assigned[ue * num_prb + prb]`.
    assigned: Vec<bool>,
    /// `muted[bs * num_prb + prb]`.
    muted: Vec<bool>,
}

impl SchedulingDecision {
    pub fn empty(num_ue: usize, num_bs: usize, num_prb: usize) -> Self {
        SchedulingDecision {
            num_ue,
            num_bs,
            num_prb,
            assigned: vec![false; num_ue * num_prb],
            muted: vec![false; num_bs * num_prb],
        }
    }

    /// Build from raw matrices (mainly for tests and fuzzing).
    pub fn from_parts(
        num_ue: usize,
        num_bs: usize,
        num_prb: usize,
        assigned: Vec<bool>,
        muted: Vec<bool>,
    ) -> Result<Self> {
        if assigned.len() != num_ue * num_prb || muted.len() != num_bs * num_prb {
            return Err(Error::config("decision matrix dimensions do not match"));
        }
        Ok(SchedulingDecision { num_ue, num_bs, num_prb, assigned, muted })
    }

    /// Assemble a TTI decision from per-PRB slices, one per PRB in order.
    pub fn from_prb_slices(slices: &[PrbDecision], num_ue: usize, num_bs: usize) -> Self {
        let mut decision = SchedulingDecision::empty(num_ue, num_bs, slices.len());
        for (l, slice) in slices.iter().enumerate() {
            for &n in &slice.scheduled {
                decision.assigned[n * decision.num_prb + l] = true;
            }
            for m in slice.muted.members() {
                decision.muted[m * decision.num_prb + l] = true;
            }
        }
        decision
    }

    pub fn num_ue(&self) -> usize {
        self.num_ue
    }

    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn num_prb(&self) -> usize {
        self.num_prb
    }

    pub fn is_assigned(&self, ue: usize, prb: usize) -> bool {
        self.assigned[ue * self.num_prb + prb]
    }

    pub fn set_assigned(&mut self, ue: usize, prb: usize, value: bool) {
        self.assigned[ue * self.num_prb + prb] = value;
    }

    pub fn is_muted(&self, bs: usize, prb: usize) -> bool {
        self.muted[bs * self.num_prb + prb]
    }

    pub fn set_muted(&mut self, bs: usize, prb: usize, value: bool) {
        self.muted[bs * self.num_prb + prb] = value;
    }

    /// Muting column of one PRB as a mask.
    pub fn muting_column(&self, prb: usize) -> BsMask {
        BsMask::from_indices((0..self.num_bs).filter(|&m| self.is_muted(m, prb)))
    }

    /// Fraction of (BS, PRB) pairs muted in this decision.
    pub fn muted_fraction(&self) -> f64 {
        let muted = self.muted.iter().filter(|&&x| x).count();
        muted as f64 / self.muted.len() as f64
    }
}

/// Decision restricted to one PRB: scheduled UEs (ascending) plus the
/// muting column.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct PrbDecision {
    pub scheduled: Vec<usize>,
    pub muted: BsMask,
}

impl PrbDecision {
    pub fn idle() -> Self {
        PrbDecision { scheduled: Vec::new(), muted: BsMask::EMPTY }
    }
}

/// Outcome of evaluating one TTI decision.
#[derive(Debug, Clone, PartialEq)]
pub struct TtiResult {
    /// Realized rate per UE, summed over its assigned PRBs.
    pub realized_rate: Vec<f64>,
    /// Sum of PF metrics of the realized rates.
    pub objective: f64,
    /// Fraction of (BS, PRB) pairs muted.
    pub muted_fraction: f64,
}

/// Validate and price a TTI decision.
///
/// Feasibility is the per-(BS, PRB) exclusivity rule: a muted BS serves
/// nobody and a transmitting BS serves at most one UE. Realized rates come
/// from the report table priced at each PRB's actual muting column.
pub fn evaluate_decision(
    conn: &ConnectionMatrix,
    table: &CsiTable,
    decision: &SchedulingDecision,
    state: &PfState,
) -> Result<TtiResult> {
    if decision.num_ue() != conn.num_ue()
        || decision.num_bs() != conn.num_bs()
        || decision.num_prb() != table.num_prb()
        || state.num_ue() != conn.num_ue()
    {
        return Err(Error::config("decision dimensions do not match the scenario"));
    }
    for l in 0..decision.num_prb() {
        for m in 0..decision.num_bs() {
            let users: usize = conn
                .served_ues(m)
                .iter()
                .filter(|&&n| decision.is_assigned(n, l))
                .count();
            if decision.is_muted(m, l) as usize + users > 1 {
                return Err(Error::Infeasible { bs: m, prb: l });
            }
        }
    }
    let mut realized = vec![0.0; decision.num_ue()];
    for l in 0..decision.num_prb() {
        let column = decision.muting_column(l);
        for n in 0..decision.num_ue() {
            if decision.is_assigned(n, l) {
                realized[n] += table.rate_for_column(n, l, column);
            }
        }
    }
    let objective = realized
        .iter()
        .enumerate()
        .map(|(n, &r)| state.pf_metric(n, r))
        .sum();
    Ok(TtiResult {
        objective,
        muted_fraction: decision.muted_fraction(),
        realized_rate: realized,
    })
}

/// PF objective of a single-PRB decision, summed over scheduled UEs in
/// ascending order.
///
/// Every solver and test prices decisions through this one function so
/// equal decisions produce bit-identical objectives.
pub fn decision_objective(
    table: &CsiTable,
    state: &PfState,
    prb: usize,
    slice: &PrbDecision,
) -> f64 {
    let mut total = 0.0;
    for &n in &slice.scheduled {
        total += state.pf_metric(n, table.rate_for_column(n, prb, slice.muted));
    }
    total
}

/// Per-BS greedy assignment under a fixed muting column: every
/// transmitting BS serves its best-positive-metric UE priced at that
/// column (ties: lowest UE index), muted BSs serve nobody, and a BS idles
/// when all its UEs have zero metric.
pub(crate) fn greedy_column_slice(
    table: &CsiTable,
    conn: &ConnectionMatrix,
    state: &PfState,
    prb: usize,
    column: BsMask,
) -> PrbDecision {
    let mut scheduled = Vec::new();
    for m in 0..conn.num_bs() {
        if column.contains(m) {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for &n in conn.served_ues(m) {
            let metric = state.pf_metric(n, table.rate_for_column(n, prb, column));
            if metric > best.map_or(0.0, |(_, b)| b) {
                best = Some((n, metric));
            }
        }
        if let Some((n, _)) = best {
            scheduled.push(n);
        }
    }
    scheduled.sort_unstable();
    PrbDecision { scheduled, muted: column }
}

/// Non-cooperative proportional fair baseline for one PRB: nothing is
/// muted and every BS independently serves its best-metric UE under the
/// nothing-muted scenario. A BS idles only when all its UEs have zero
/// metric; metric ties go to the lowest UE index.
pub fn noncoop_prb_slice(
    table: &CsiTable,
    conn: &ConnectionMatrix,
    state: &PfState,
    prb: usize,
) -> PrbDecision {
    greedy_column_slice(table, conn, state, prb, BsMask::EMPTY)
}

/// Non-cooperative baseline over all PRBs.
pub fn noncoop_pfs(table: &CsiTable, conn: &ConnectionMatrix, state: &PfState) -> SchedulingDecision {
    let slices: Vec<PrbDecision> = (0..table.num_prb())
        .map(|l| noncoop_prb_slice(table, conn, state, l))
        .collect();
    SchedulingDecision::from_prb_slices(&slices, conn.num_ue(), conn.num_bs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csi::{generate_reports, RateMapper};
    use crate::network::{associate_ues, strongest_interferers, CreOffsets};
    use crate::testutil::{random_gains, raw_scenario, raw_scenario_with_noise};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn small_setup(
        seed: u64,
        n_ue: usize,
        n_bs: usize,
        n_prb: usize,
        m_prime: usize,
    ) -> (CsiTable, ConnectionMatrix, PfState) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let sc = raw_scenario(n_ue, n_bs, n_prb, random_gains(&mut rng, n_ue * n_bs * n_prb));
        let conn = associate_ues(&sc, CreOffsets::default()).unwrap();
        let ifs = strongest_interferers(&sc, &conn, m_prime).unwrap();
        let table = generate_reports(&sc, &conn, &ifs, &RateMapper::shannon(1.0).unwrap()).unwrap();
        let avgs: Vec<f64> = (0..n_ue).map(|_| 10f64.powf(rng.gen_range(-3.0..1.0))).collect();
        let state = PfState::from_avgs(avgs, 0.97, 1e-6).unwrap();
        (table, conn, state)
    }

    #[test]
    fn pf_metric_is_rate_over_average() {
        let state = PfState::from_avgs(vec![2.0, 0.5], 0.97, 1e-6).unwrap();
        assert_relative_eq!(state.pf_metric(0, 3.0), 1.5);
        assert_relative_eq!(state.pf_metric(1, 3.0), 6.0);
        assert_eq!(state.pf_metric(0, 0.0), 0.0);
    }

    #[test]
    fn average_update_single_step() {
        let mut state = PfState::from_avgs(vec![100.0], 0.97, 1e-6).unwrap();
        state.update_avg_throughput(&[0.0]).unwrap();
        assert_relative_eq!(state.avg(0), 97.0, epsilon = 1e-9);
    }

    #[test]
    fn constant_rate_is_a_fixed_point() {
        let mut state = PfState::from_avgs(vec![100.0], 0.97, 1e-6).unwrap();
        state.update_avg_throughput(&[100.0]).unwrap();
        assert_relative_eq!(state.avg(0), 100.0, epsilon = 1e-9);
    }

    #[test]
    fn averages_converge_to_a_constant_rate() {
        let mut state = PfState::new(1, 0.97).unwrap();
        for _ in 0..600 {
            state.update_avg_throughput(&[5.0]).unwrap();
        }
        assert_relative_eq!(state.avg(0), 5.0, epsilon = 1e-4);
    }

    #[test]
    fn floor_keeps_averages_positive() {
        let mut state = PfState::new(2, 0.97).unwrap();
        for _ in 0..100 {
            state.update_avg_throughput(&[0.0, 0.0]).unwrap();
        }
        assert_eq!(state.avg(0), DEFAULT_AVG_FLOOR);
        assert!(state.pf_metric(0, 1.0).is_finite());
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(PfState::new(1, 0.0).is_err());
        assert!(PfState::new(1, 1.0).is_err());
        assert!(PfState::from_avgs(vec![0.0], 0.97, 1e-6).is_err());
        let mut ok = PfState::new(2, 0.97).unwrap();
        assert!(ok.update_avg_throughput(&[1.0]).is_err());
    }

    #[test]
    fn evaluate_empty_decision_is_zero() {
        let (table, conn, state) = small_setup(1, 4, 3, 2, 1);
        let decision = SchedulingDecision::empty(4, 3, 2);
        let result = evaluate_decision(&conn, &table, &decision, &state).unwrap();
        assert_eq!(result.objective, 0.0);
        assert_eq!(result.muted_fraction, 0.0);
        assert!(result.realized_rate.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn evaluate_single_assignment() {
        let (table, conn, state) = small_setup(2, 4, 3, 2, 1);
        let mut decision = SchedulingDecision::empty(4, 3, 2);
        decision.set_assigned(0, 1, true);
        let result = evaluate_decision(&conn, &table, &decision, &state).unwrap();
        let expect = table.rate(0, 1, 0);
        assert_relative_eq!(result.realized_rate[0], expect);
        assert_relative_eq!(result.objective, state.pf_metric(0, expect));
    }

    #[test]
    fn evaluate_prices_the_actual_muting_column() {
        // Two BSs, one UE each; muting BS 1 while serving UE 0 on BS 0
        // must use UE 0's muted-scenario rate.
        let sc = raw_scenario_with_noise(2, 2, 1, vec![4.0, 1.0, 1.0, 4.0], 1.0);
        let conn = associate_ues(&sc, CreOffsets::default()).unwrap();
        let ifs = strongest_interferers(&sc, &conn, 1).unwrap();
        let table = generate_reports(&sc, &conn, &ifs, &RateMapper::shannon(1.0).unwrap()).unwrap();
        let state = PfState::from_avgs(vec![1.0, 1.0], 0.97, 1e-6).unwrap();
        let mut decision = SchedulingDecision::empty(2, 2, 1);
        decision.set_assigned(0, 0, true);
        decision.set_muted(1, 0, true);
        let result = evaluate_decision(&conn, &table, &decision, &state).unwrap();
        assert_relative_eq!(result.realized_rate[0], (4.0f64 + 1.0).log2(), epsilon = 1e-12);
        assert_relative_eq!(result.muted_fraction, 0.5);
    }

    #[test]
    fn evaluate_rejects_exclusivity_violations() {
        let (table, conn, state) = small_setup(3, 4, 2, 1, 1);
        // Two UEs of the same BS on one PRB.
        let (a, b) = {
            let served = conn.served_ues(0);
            if served.len() >= 2 {
                (served[0], served[1])
            } else {
                let served = conn.served_ues(1);
                (served[0], served[1])
            }
        };
        let bs = conn.serving_bs(a);
        let mut double = SchedulingDecision::empty(4, 2, 1);
        double.set_assigned(a, 0, true);
        double.set_assigned(b, 0, true);
        match evaluate_decision(&conn, &table, &double, &state) {
            Err(Error::Infeasible { bs: m, prb: 0 }) => assert_eq!(m, bs),
            other => panic!("expected infeasible, got {other:?}"),
        }
        // Serving from a muted BS.
        let mut muted_serving = SchedulingDecision::empty(4, 2, 1);
        muted_serving.set_assigned(a, 0, true);
        muted_serving.set_muted(bs, 0, true);
        assert!(matches!(
            evaluate_decision(&conn, &table, &muted_serving, &state),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn exclusivity_fuzzing_matches_direct_check() {
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let (n_ue, n_bs, n_prb) = (5, 3, 2);
        let (table, conn, state) = small_setup(4, n_ue, n_bs, n_prb, 1);
        for _ in 0..300 {
            let assigned: Vec<bool> = (0..n_ue * n_prb).map(|_| rng.gen_bool(0.4)).collect();
            let muted: Vec<bool> = (0..n_bs * n_prb).map(|_| rng.gen_bool(0.3)).collect();
            let decision =
                SchedulingDecision::from_parts(n_ue, n_bs, n_prb, assigned, muted).unwrap();
            let feasible = (0..n_prb).all(|l| {
                (0..n_bs).all(|m| {
                    let users = conn
                        .served_ues(m)
                        .iter()
                        .filter(|&&n| decision.is_assigned(n, l))
                        .count();
                    decision.is_muted(m, l) as usize + users <= 1
                })
            });
            assert_eq!(
                evaluate_decision(&conn, &table, &decision, &state).is_ok(),
                feasible
            );
        }
    }

    #[test]
    fn objective_adds_over_prbs() {
        // Evaluating L PRBs at once equals the sum of per-PRB objectives.
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for trial in 0..50 {
            let (n_ue, n_bs, n_prb) = (6, 3, 4);
            let (table, conn, state) = small_setup(100 + trial, n_ue, n_bs, n_prb, 2);
            let slices: Vec<PrbDecision> = (0..n_prb)
                .map(|l| {
                    // Random feasible slice: each BS serves at most one UE,
                    // random BSs muted.
                    let muted = BsMask::from_indices((0..n_bs).filter(|_| rng.gen_bool(0.3)));
                    let mut scheduled = Vec::new();
                    for m in 0..n_bs {
                        if muted.contains(m) || conn.served_ues(m).is_empty() {
                            continue;
                        }
                        if rng.gen_bool(0.8) {
                            let pick = conn.served_ues(m)[rng.gen_range(0..conn.served_ues(m).len())];
                            scheduled.push(pick);
                        }
                    }
                    scheduled.sort_unstable();
                    let _ = l;
                    PrbDecision { scheduled, muted }
                })
                .collect();
            let decision = SchedulingDecision::from_prb_slices(&slices, n_ue, n_bs);
            let whole = evaluate_decision(&conn, &table, &decision, &state).unwrap();
            let sum: f64 = slices
                .iter()
                .enumerate()
                .map(|(l, s)| decision_objective(&table, &state, l, s))
                .sum();
            assert_relative_eq!(whole.objective, sum, max_relative = 1e-12);
        }
    }

    #[test]
    fn noncoop_schedules_at_most_one_ue_per_bs() {
        let (table, conn, state) = small_setup(6, 9, 3, 4, 1);
        let decision = noncoop_pfs(&table, &conn, &state);
        assert_eq!(decision.muted_fraction(), 0.0);
        for l in 0..4 {
            for m in 0..3 {
                let users = conn
                    .served_ues(m)
                    .iter()
                    .filter(|&&n| decision.is_assigned(n, l))
                    .count();
                assert!(users <= 1);
                // With positive gains every BS with users schedules one.
                if !conn.served_ues(m).is_empty() {
                    assert_eq!(users, 1);
                }
            }
        }
    }

    #[test]
    fn noncoop_picks_the_best_metric() {
        // One BS, two UEs with rates r and equal averages: higher rate wins.
        let sc = raw_scenario_with_noise(2, 1, 1, vec![3.0, 1.0], 1.0);
        let conn = associate_ues(&sc, CreOffsets::default()).unwrap();
        let ifs = strongest_interferers(&sc, &conn, 0).unwrap();
        let table = generate_reports(&sc, &conn, &ifs, &RateMapper::shannon(1.0).unwrap()).unwrap();
        let state = PfState::from_avgs(vec![1.0, 1.0], 0.97, 1e-6).unwrap();
        let slice = noncoop_prb_slice(&table, &conn, &state, 0);
        assert_eq!(slice.scheduled, vec![0]);
        // Lower average flips the choice.
        let state = PfState::from_avgs(vec![1.0, 0.1], 0.97, 1e-6).unwrap();
        let slice = noncoop_prb_slice(&table, &conn, &state, 0);
        assert_eq!(slice.scheduled, vec![1]);
    }

    #[test]
    fn noncoop_ties_and_zero_rates() {
        // Identical UEs: tie resolves to the lowest index.
        let sc = raw_scenario_with_noise(2, 1, 1, vec![3.0, 3.0], 1.0);
        let conn = associate_ues(&sc, CreOffsets::default()).unwrap();
        let ifs = strongest_interferers(&sc, &conn, 0).unwrap();
        let table = generate_reports(&sc, &conn, &ifs, &RateMapper::shannon(1.0).unwrap()).unwrap();
        let state = PfState::from_avgs(vec![1.0, 1.0], 0.97, 1e-6).unwrap();
        assert_eq!(noncoop_prb_slice(&table, &conn, &state, 0).scheduled, vec![0]);

        // All-zero rates: the BS idles.
        let dead = raw_scenario_with_noise(2, 1, 1, vec![0.0, 0.0], 1.0);
        let conn = associate_ues(&dead, CreOffsets::default()).unwrap();
        let ifs = strongest_interferers(&dead, &conn, 0).unwrap();
        let table = generate_reports(&dead, &conn, &ifs, &RateMapper::shannon(1.0).unwrap()).unwrap();
        assert!(noncoop_prb_slice(&table, &conn, &state, 0).scheduled.is_empty());
    }

    #[test]
    fn objective_scale_invariance_of_the_argmax() {
        // Scaling all rates by a constant scales the objective but not the
        // chosen assignment.
        let (table, conn, state) = small_setup(7, 6, 3, 2, 1);
        let base = noncoop_pfs(&table, &conn, &state);
        let scaled_state =
            PfState::from_avgs(state.avgs().iter().map(|a| a * 2.0).collect(), 0.97, 1e-6).unwrap();
        let scaled = noncoop_pfs(&table, &conn, &scaled_state);
        assert_eq!(base, scaled);
    }
}

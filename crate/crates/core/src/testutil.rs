//! Shared helpers for unit tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::csi::{generate_reports, CsiTable, RateMapper};
use crate::network::{
    associate_ues, strongest_interferers, BsClass, ConnectionMatrix, CreOffsets, NetworkScenario,
};
use crate::pf::PfState;

/// Scenario with explicit gains, unit tx power, tiny noise, and no
/// out-of-cluster interference.
pub(crate) fn raw_scenario(
    num_ue: usize,
    num_bs: usize,
    num_prb: usize,
    gain: Vec<f64>,
) -> NetworkScenario {
    raw_scenario_with_noise(num_ue, num_bs, num_prb, gain, 1e-9)
}

pub(crate) fn raw_scenario_with_noise(
    num_ue: usize,
    num_bs: usize,
    num_prb: usize,
    gain: Vec<f64>,
    noise_mw: f64,
) -> NetworkScenario {
    NetworkScenario::new(
        num_ue,
        num_bs,
        num_prb,
        vec![BsClass::Macro; num_bs],
        vec![1.0; num_bs * num_prb],
        gain,
        noise_mw,
        vec![0.0; num_ue * num_prb],
    )
    .unwrap()
}

/// Random strictly positive gains, log-uniform over several decades.
pub(crate) fn random_gains(rng: &mut ChaCha12Rng, count: usize) -> Vec<f64> {
    (0..count).map(|_| 10f64.powf(rng.gen_range(-7.0..-1.0))).collect()
}

pub(crate) struct RandomInstance {
    pub conn: ConnectionMatrix,
    pub table: CsiTable,
    pub state: PfState,
}

/// Random scheduling instance: positive log-uniform gains, association by
/// power, uncapped rates, and random positive PF averages.
pub(crate) fn random_instance(
    seed: u64,
    num_ue: usize,
    num_bs: usize,
    num_prb: usize,
    m_prime: usize,
) -> RandomInstance {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let scenario = raw_scenario_with_noise(
        num_ue,
        num_bs,
        num_prb,
        random_gains(&mut rng, num_ue * num_bs * num_prb),
        10f64.powf(rng.gen_range(-8.0..-4.0)),
    );
    let conn = associate_ues(&scenario, CreOffsets::default()).unwrap();
    let interferers = strongest_interferers(&scenario, &conn, m_prime).unwrap();
    let table =
        generate_reports(&scenario, &conn, &interferers, &RateMapper::shannon(1.0).unwrap())
            .unwrap();
    let avgs: Vec<f64> = (0..num_ue).map(|_| 10f64.powf(rng.gen_range(-3.0..1.0))).collect();
    let state = PfState::from_avgs(avgs, 0.97, 1e-6).unwrap();
    RandomInstance { conn, table, state }
}

//! Channel state reporting under hypothetical muting scenarios.
//!
//! Each UE reports one achievable rate per (PRB, scenario), where a
//! scenario is a subset of its strongest interferers assumed muted. With
//! `m_prime` strongest interferers there are `2^m_prime` scenarios per UE,
//! enumerated in a canonical order shared by every consumer in the crate:
//! the empty set first, the full set second, then the remaining subsets in
//! ascending cardinality, lexicographic on member indices.
//!
//! Weak interferers (outside the strongest set) and out-of-cluster power
//! always stay in the denominator: reports cannot express muting them, and
//! the realized rate of a muting column therefore only depends on the
//! column's restriction to the UE's strongest set (see
//! [`CsiTable::rate_for_column`]).

use crate::error::{Error, Result};
use crate::mask::BsMask;
use crate::network::{ConnectionMatrix, InterfererSets, NetworkScenario};

/// Scenario masks for one UE in canonical order.
///
/// `strongest` is the UE's strongest-interferer list; the returned masks
/// are over global BS indices. The first scenario is always the empty set
/// (nothing muted); with at least one interferer the second is the full
/// set.
pub fn enumerate_scenarios(strongest: &[usize]) -> Vec<BsMask> {
    let m = strongest.len();
    assert!(m < 64, "strongest-interferer sets larger than 63 are unsupported");
    let full = BsMask::from_indices(strongest.iter().copied());
    if m == 0 {
        return vec![BsMask::EMPTY];
    }
    let mut rest: Vec<BsMask> = (1..(1u64 << m) - 1)
        .map(|bits| {
            BsMask::from_indices(
                strongest
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| bits & (1 << i) != 0)
                    .map(|(_, &bs)| bs),
            )
        })
        .collect();
    rest.sort_by(|a, b| a.canonical_cmp(*b));
    let mut out = Vec::with_capacity(1 << m);
    out.push(BsMask::EMPTY);
    out.push(full);
    out.extend(rest);
    out
}

/// SINR of `ue` on `prb` assuming the BSs in `indicator` are muted.
///
/// The serving BS is assumed transmitting. Only strongest-set members can
/// be muted by a report; any other bits in `indicator` are ignored. Weak
/// interference, out-of-cluster power and noise always remain.
pub fn sinr_under_scenario(
    scenario: &NetworkScenario,
    conn: &ConnectionMatrix,
    interferers: &InterfererSets,
    ue: usize,
    prb: usize,
    indicator: BsMask,
) -> f64 {
    let serving = conn.serving_bs(ue);
    let muted = indicator.intersect(interferers.strongest_mask(ue));
    let mut denom = scenario.noise_mw() + scenario.out_of_cluster_mw(ue, prb);
    for m in 0..scenario.num_bs() {
        if m == serving || muted.contains(m) {
            continue;
        }
        denom += scenario.p(ue, m, prb);
    }
    scenario.p(ue, serving, prb) / denom
}

/// SINR-to-rate mapping: `scale * min(log2(1 + sinr), cap)`.
///
/// `scale` converts bits/symbol into whatever throughput unit the caller
/// wants; the default experiments use 1.0 and report normalized rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateMapper {
    scale: f64,
    cap_bits: f64,
}

impl RateMapper {
    /// Pure log2(1 + sinr), no modulation ceiling.
    pub fn shannon(scale: f64) -> Result<Self> {
        Self::new(scale, f64::INFINITY)
    }

    /// log2(1 + sinr) saturating at `cap_bits` (bits/symbol), modeling a
    /// bounded modulation and coding set.
    pub fn shannon_capped(scale: f64, cap_bits: f64) -> Result<Self> {
        Self::new(scale, cap_bits)
    }

    fn new(scale: f64, cap_bits: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::config("rate scale must be finite and positive"));
        }
        if !(cap_bits > 0.0) {
            return Err(Error::config("rate cap must be positive"));
        }
        Ok(RateMapper { scale, cap_bits })
    }

    pub fn map_rate(&self, sinr: f64) -> Result<f64> {
        if !(sinr >= 0.0) || !sinr.is_finite() {
            return Err(Error::domain(format!("SINR must be finite and non-negative, got {sinr}")));
        }
        Ok(self.scale * (sinr.ln_1p() / std::f64::consts::LN_2).min(self.cap_bits))
    }
}

/// One report row: the achievable rate for a UE on a PRB if exactly the
/// indicator set is muted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsiReport {
    pub ue: usize,
    pub prb: usize,
    /// Scenario index in canonical order (0 = nothing muted).
    pub scenario: usize,
    pub indicator: BsMask,
    pub rate: f64,
}

impl CsiReport {
    /// Muting pattern over all `num_bs` BSs: 1 where the indicator asks
    /// for muting. Identical across PRBs for a given (ue, scenario).
    pub fn pattern(&self, num_bs: usize) -> Vec<u8> {
        (0..num_bs).map(|m| self.indicator.contains(m) as u8).collect()
    }
}

/// Complete report set for one drop: `2^m_prime` rates per (UE, PRB), plus
/// the scenario masks and a mask-to-scenario lookup used to price whole
/// muting columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiTable {
    num_ue: usize,
    num_prb: usize,
    j_prime: usize,
    /// Scenario masks per UE, canonical order.
    scenarios: Vec<Vec<BsMask>>,
    /// Strongest-interferer mask per UE.
    strongest: Vec<BsMask>,
    /// Per UE: (indicator bits, scenario index), sorted by bits.
    lookup: Vec<Vec<(u64, usize)>>,
    /// Rates indexed `[ue][prb][scenario]`.
    rates: Vec<f64>,
}

/// Build the report table for every (UE, PRB, scenario).
pub fn generate_reports(
    scenario: &NetworkScenario,
    conn: &ConnectionMatrix,
    interferers: &InterfererSets,
    mapper: &RateMapper,
) -> Result<CsiTable> {
    let (num_ue, num_prb) = (scenario.num_ue(), scenario.num_prb());
    let j_prime = 1usize << interferers.m_prime();
    let mut scenarios = Vec::with_capacity(num_ue);
    let mut strongest = Vec::with_capacity(num_ue);
    let mut lookup = Vec::with_capacity(num_ue);
    let mut rates = Vec::with_capacity(num_ue * num_prb * j_prime);
    for n in 0..num_ue {
        let masks = enumerate_scenarios(interferers.strongest(n));
        debug_assert_eq!(masks.len(), j_prime);
        let mut by_bits: Vec<(u64, usize)> =
            masks.iter().enumerate().map(|(j, m)| (m.bits(), j)).collect();
        by_bits.sort_unstable();
        for l in 0..num_prb {
            for mask in &masks {
                let sinr = sinr_under_scenario(scenario, conn, interferers, n, l, *mask);
                rates.push(mapper.map_rate(sinr)?);
            }
        }
        scenarios.push(masks);
        strongest.push(interferers.strongest_mask(n));
        lookup.push(by_bits);
    }
    Ok(CsiTable {
        num_ue,
        num_prb,
        j_prime,
        scenarios,
        strongest,
        lookup,
        rates,
    })
}

impl CsiTable {
    pub fn num_ue(&self) -> usize {
        self.num_ue
    }

    pub fn num_prb(&self) -> usize {
        self.num_prb
    }

    /// Scenarios per (UE, PRB).
    pub fn j_prime(&self) -> usize {
        self.j_prime
    }

    pub fn rate(&self, ue: usize, prb: usize, scenario: usize) -> f64 {
        self.rates[(ue * self.num_prb + prb) * self.j_prime + scenario]
    }

    pub fn scenario_mask(&self, ue: usize, scenario: usize) -> BsMask {
        self.scenarios[ue][scenario]
    }

    pub fn scenario_masks(&self, ue: usize) -> &[BsMask] {
        &self.scenarios[ue]
    }

    pub fn strongest_mask(&self, ue: usize) -> BsMask {
        self.strongest[ue]
    }

    /// Scenario index whose indicator equals `column` restricted to the
    /// UE's strongest set.
    pub fn scenario_for_column(&self, ue: usize, column: BsMask) -> usize {
        let key = column.intersect(self.strongest[ue]).bits();
        let table = &self.lookup[ue];
        let pos = table
            .binary_search_by_key(&key, |&(bits, _)| bits)
            .expect("every subset of the strongest set has a scenario");
        table[pos].1
    }

    /// Realized rate of `ue` on `prb` under the muting column `column`.
    ///
    /// Muting outside the UE's strongest set does not change the value;
    /// reports carry no information about those BSs, and link adaptation
    /// is assumed to realize exactly the reported rate.
    pub fn rate_for_column(&self, ue: usize, prb: usize, column: BsMask) -> f64 {
        self.rate(ue, prb, self.scenario_for_column(ue, column))
    }

    /// Materialized report rows for one (UE, PRB), canonical order.
    pub fn reports_for(&self, ue: usize, prb: usize) -> Vec<CsiReport> {
        (0..self.j_prime)
            .map(|j| CsiReport {
                ue,
                prb,
                scenario: j,
                indicator: self.scenarios[ue][j],
                rate: self.rate(ue, prb, j),
            })
            .collect()
    }
}

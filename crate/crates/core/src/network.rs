//! Static network state for one drop.
//!
//! The scheduler never sees geometry: path loss, shadowing and fading are
//! folded into per-link channel power gains at generation time (see
//! [`crate::chanmodel`]), and everything downstream works with linear
//! received powers. Received power on a link is the channel power gain
//! times the transmit power of that BS on that PRB.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{BsMask, MAX_BS};
use crate::units::db_to_linear;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BsClass {
    Macro,
    Pico,
}

/// One drop's static downlink state: N UEs, M BSs, L PRBs.
///
/// All powers are linear mW. `gain` is the channel power gain tensor,
/// indexed `[ue][bs][prb]` row-major. Out-of-cluster interference is a
/// fixed per-(UE, PRB) power: it models distant BSs that always transmit
/// and is never modulated by muting decisions inside the cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkScenario {
    num_ue: usize,
    num_bs: usize,
    num_prb: usize,
    bs_class: Vec<BsClass>,
    /// Per-(BS, PRB) transmit power, mW.
    tx_power_mw: Vec<f64>,
    /// Channel power gain per (UE, BS, PRB), linear.
    gain: Vec<f64>,
    /// Receiver noise power per PRB, mW.
    noise_mw: f64,
    /// Out-of-cluster interference per (UE, PRB), mW.
    out_of_cluster_mw: Vec<f64>,
}

impl NetworkScenario {
    pub fn new(
        num_ue: usize,
        num_bs: usize,
        num_prb: usize,
        bs_class: Vec<BsClass>,
        tx_power_mw: Vec<f64>,
        gain: Vec<f64>,
        noise_mw: f64,
        out_of_cluster_mw: Vec<f64>,
    ) -> Result<Self> {
        if num_ue == 0 || num_bs == 0 || num_prb == 0 {
            return Err(Error::config("UE, BS and PRB counts must all be positive"));
        }
        if num_bs > MAX_BS {
            return Err(Error::config(format!("at most {MAX_BS} base stations supported")));
        }
        if bs_class.len() != num_bs {
            return Err(Error::config("bs_class length must equal the BS count"));
        }
        if tx_power_mw.len() != num_bs * num_prb {
            return Err(Error::config("tx_power_mw must have num_bs * num_prb entries"));
        }
        if gain.len() != num_ue * num_bs * num_prb {
            return Err(Error::config("gain must have num_ue * num_bs * num_prb entries"));
        }
        if out_of_cluster_mw.len() != num_ue * num_prb {
            return Err(Error::config("out_of_cluster_mw must have num_ue * num_prb entries"));
        }
        if !(noise_mw.is_finite() && noise_mw > 0.0) {
            return Err(Error::config("noise power must be finite and positive"));
        }
        let nonneg = |v: &[f64]| v.iter().all(|x| x.is_finite() && *x >= 0.0);
        if !nonneg(&tx_power_mw) || !nonneg(&gain) || !nonneg(&out_of_cluster_mw) {
            return Err(Error::config("powers and gains must be finite and non-negative"));
        }
        Ok(NetworkScenario {
            num_ue,
            num_bs,
            num_prb,
            bs_class,
            tx_power_mw,
            gain,
            noise_mw,
            out_of_cluster_mw,
        })
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

    pub fn bs_class(&self, bs: usize) -> BsClass {
        self.bs_class[bs]
    }

    pub fn noise_mw(&self) -> f64 {
        self.noise_mw
    }

    pub fn tx_power_mw(&self, bs: usize, prb: usize) -> f64 {
        self.tx_power_mw[bs * self.num_prb + prb]
    }

    pub fn gain(&self, ue: usize, bs: usize, prb: usize) -> f64 {
        self.gain[(ue * self.num_bs + bs) * self.num_prb + prb]
    }

    pub fn out_of_cluster_mw(&self, ue: usize, prb: usize) -> f64 {
        self.out_of_cluster_mw[ue * self.num_prb + prb]
    }

    /// Raw gain tensor, `[ue][bs][prb]` row-major.
    pub fn gain_tensor(&self) -> &[f64] {
        &self.gain
    }

    /// Received power from `bs` at `ue` on `prb` (gain times transmit
    /// power), with index validation.
    pub fn received_power(&self, ue: usize, bs: usize, prb: usize) -> Result<f64> {
        self.check_index("ue", ue, self.num_ue)?;
        self.check_index("bs", bs, self.num_bs)?;
        self.check_index("prb", prb, self.num_prb)?;
        Ok(self.p(ue, bs, prb))
    }

    /// Received power summed over all PRBs; the wideband quantity used for
    /// association and interferer ranking.
    pub fn total_received_power(&self, ue: usize, bs: usize) -> Result<f64> {
        self.check_index("ue", ue, self.num_ue)?;
        self.check_index("bs", bs, self.num_bs)?;
        Ok((0..self.num_prb).map(|l| self.p(ue, bs, l)).sum())
    }

    /// Unchecked fast path; indices are in range by construction at call
    /// sites that iterate 0..N / 0..M / 0..L.
    #[inline]
    pub(crate) fn p(&self, ue: usize, bs: usize, prb: usize) -> f64 {
        self.gain[(ue * self.num_bs + bs) * self.num_prb + prb] * self.tx_power_mw[bs * self.num_prb + prb]
    }

    fn check_index(&self, what: &'static str, index: usize, limit: usize) -> Result<()> {
        if index >= limit {
            Err(Error::IndexOutOfRange { what, index, limit })
        } else {
            Ok(())
        }
    }
}

/// Cell range expansion offsets, dB, added to the wideband received power
/// of a BS of the given class during association.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct CreOffsets {
    pub macro_db: f64,
    pub pico_db: f64,
}

impl CreOffsets {
    pub fn pico(pico_db: f64) -> Self {
        CreOffsets { macro_db: 0.0, pico_db }
    }

    fn validate(&self) -> Result<()> {
        if self.macro_db != 0.0 {
            return Err(Error::config("macro CRE offset must be 0 dB"));
        }
        if !(self.pico_db.is_finite() && self.pico_db >= 0.0) {
            return Err(Error::config("pico CRE offset must be finite and >= 0 dB"));
        }
        Ok(())
    }
}

/// UE-to-BS association. Exactly one serving BS per UE, so the row-sums-1
/// invariant of the binary connection matrix holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionMatrix {
    num_bs: usize,
    serving: Vec<usize>,
    served: Vec<Vec<usize>>,
}

impl ConnectionMatrix {
    pub fn from_serving(serving: Vec<usize>, num_bs: usize) -> Result<Self> {
        for (&m, n) in serving.iter().zip(0..) {
            if m >= num_bs {
                return Err(Error::config(format!("UE {n} assigned to nonexistent BS {m}")));
            }
        }
        let mut served = vec![Vec::new(); num_bs];
        for (n, &m) in serving.iter().enumerate() {
            served[m].push(n);
        }
        Ok(ConnectionMatrix { num_bs, serving, served })
    }

    pub fn num_ue(&self) -> usize {
        self.serving.len()
    }

    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn serving_bs(&self, ue: usize) -> usize {
        self.serving[ue]
    }

    /// UEs served by `bs`, ascending.
    pub fn served_ues(&self, bs: usize) -> &[usize] {
        &self.served[bs]
    }

    /// Binary connection entry c[ue][bs].
    pub fn connected(&self, ue: usize, bs: usize) -> bool {
        self.serving[ue] == bs
    }
}

/// Associate every UE with the BS maximizing wideband received power plus
/// the class CRE offset (in dB). Ties go to the lowest BS index; a UE with
/// zero power everywhere attaches to BS 0.
pub fn associate_ues(scenario: &NetworkScenario, offsets: CreOffsets) -> Result<ConnectionMatrix> {
    offsets.validate()?;
    let bias: Vec<f64> = (0..scenario.num_bs())
        .map(|m| match scenario.bs_class(m) {
            BsClass::Macro => db_to_linear(offsets.macro_db),
            BsClass::Pico => db_to_linear(offsets.pico_db),
        })
        .collect();
    let mut serving = Vec::with_capacity(scenario.num_ue());
    for n in 0..scenario.num_ue() {
        let mut best = (0usize, f64::NEG_INFINITY);
        for m in 0..scenario.num_bs() {
            // Equivalent to comparing dB power + dB offset, without the
            // -inf special case for zero power.
            let score = scenario.total_received_power(n, m)? * bias[m];
            if score > best.1 {
                best = (m, score);
            }
        }
        serving.push(best.0);
    }
    ConnectionMatrix::from_serving(serving, scenario.num_bs())
}

/// Strongest-interferer sets: for each UE, the `m_prime` non-serving BSs
/// with the largest wideband received power, strongest first. Power ties
/// resolve to the lower BS index.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfererSets {
    m_prime: usize,
    per_ue: Vec<Vec<usize>>,
}

impl InterfererSets {
    pub fn m_prime(&self) -> usize {
        self.m_prime
    }

    /// Strongest interferers of `ue`, strongest first.
    pub fn strongest(&self, ue: usize) -> &[usize] {
        &self.per_ue[ue]
    }

    pub fn strongest_mask(&self, ue: usize) -> BsMask {
        BsMask::from_indices(self.per_ue[ue].iter().copied())
    }
}

pub fn strongest_interferers(
    scenario: &NetworkScenario,
    conn: &ConnectionMatrix,
    m_prime: usize,
) -> Result<InterfererSets> {
    if m_prime + 1 > scenario.num_bs() {
        return Err(Error::config(format!(
            "m_prime = {m_prime} but only {} interferers exist per UE",
            scenario.num_bs() - 1
        )));
    }
    let mut per_ue = Vec::with_capacity(scenario.num_ue());
    for n in 0..scenario.num_ue() {
        let serving = conn.serving_bs(n);
        let mut ranked: Vec<(usize, f64)> = (0..scenario.num_bs())
            .filter(|&m| m != serving)
            .map(|m| Ok((m, scenario.total_received_power(n, m)?)))
            .collect::<Result<_>>()?;
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        per_ue.push(ranked.into_iter().take(m_prime).map(|(m, _)| m).collect());
    }
    Ok(InterfererSets { m_prime, per_ue })
}

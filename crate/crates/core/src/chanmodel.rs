//! Synthetic channel generator.
//!
//! Stands in for a full system-level simulator with the usual urban
//! macro/pico ingredients: a hexagonal macro layout, offset pico cells,
//! log-distance path loss with wall penetration, i.i.d. log-normal
//! shadowing, optional per-PRB Rayleigh fading (exponential power
//! factors), and a fixed ring of external full-power interferers for
//! out-of-cluster interference. Everything is driven by one seeded RNG in
//! a documented draw order, so a (config, seed) pair maps to exactly one
//! scenario.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::MAX_BS;
use crate::network::{BsClass, NetworkScenario};
use crate::units::db_to_linear;

/// Log-distance path loss: `ref_db + slope·log10(d_km) + penetration_db`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossParams {
    /// Loss at 1 km, dB.
    pub ref_db: f64,
    /// dB per decade of distance.
    pub slope_db_per_decade: f64,
    /// Extra constant loss (walls, body), dB.
    pub penetration_db: f64,
}

impl PathLossParams {
    /// Urban macro defaults.
    pub fn macro_default() -> Self {
        PathLossParams { ref_db: 128.1, slope_db_per_decade: 37.6, penetration_db: 20.0 }
    }

    /// Urban pico defaults.
    pub fn pico_default() -> Self {
        PathLossParams { ref_db: 140.7, slope_db_per_decade: 36.7, penetration_db: 20.0 }
    }

    /// Path loss in dB at `distance_m` meters (clamped below at 1 m).
    pub fn loss_db(&self, distance_m: f64) -> f64 {
        let d_km = (distance_m.max(1.0)) / 1000.0;
        self.ref_db + self.slope_db_per_decade * d_km.log10() + self.penetration_db
    }
}

/// Fixed external-interference ring: `count` full-power macro BSs evenly
/// spaced on a circle of radius `radius_factor × ISD`. Their aggregate
/// received power per PRB is precomputed per UE and never changes with
/// muting decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OocRingParams {
    pub count: usize,
    pub radius_factor: f64,
    pub power_dbm: f64,
}

impl Default for OocRingParams {
    fn default() -> Self {
        OocRingParams { count: 6, radius_factor: 2.0, power_dbm: 46.0 }
    }
}

fn default_isd() -> f64 {
    500.0
}
fn default_pico_offset() -> f64 {
    125.0
}
fn default_hotspot_radius() -> f64 {
    40.0
}
fn default_min_ue_dist() -> f64 {
    10.0
}
fn default_macro_power() -> f64 {
    46.0
}
fn default_pico_power() -> f64 {
    30.0
}
fn default_shadowing() -> f64 {
    8.0
}

/// Geometry and propagation parameters of one synthetic drop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelModelConfig {
    pub num_macro: usize,
    #[serde(default)]
    pub num_pico: usize,
    pub num_ue: usize,
    pub num_prb: usize,
    /// Macro inter-site distance, m.
    #[serde(default = "default_isd")]
    pub isd_m: f64,
    /// Pico offset from its host macro, m.
    #[serde(default = "default_pico_offset")]
    pub pico_offset_m: f64,
    /// Hotspot placement radius around a pico, m.
    #[serde(default = "default_hotspot_radius")]
    pub hotspot_radius_m: f64,
    /// Minimum UE–BS separation, m.
    #[serde(default = "default_min_ue_dist")]
    pub min_ue_dist_m: f64,
    /// UE drop disc radius around the origin, m; defaults to the ISD.
    #[serde(default)]
    pub drop_radius_m: Option<f64>,
    /// Total macro transmit power over the band, dBm.
    #[serde(default = "default_macro_power")]
    pub macro_power_dbm: f64,
    /// Total pico transmit power over the band, dBm.
    #[serde(default = "default_pico_power")]
    pub pico_power_dbm: f64,
    /// Log-normal shadowing standard deviation, dB (0 disables).
    #[serde(default = "default_shadowing")]
    pub shadowing_sigma_db: f64,
    /// Per-(UE, BS, PRB) i.i.d. Rayleigh fading power factors.
    #[serde(default)]
    pub fast_fading: bool,
    #[serde(default = "PathLossParams::macro_default")]
    pub macro_path_loss: PathLossParams,
    #[serde(default = "PathLossParams::pico_default")]
    pub pico_path_loss: PathLossParams,
    #[serde(default)]
    pub ooc_ring: OocRingParams,
}

impl ChannelModelConfig {
    /// Minimal macro-only config with library defaults everywhere else.
    pub fn macro_only(num_macro: usize, num_ue: usize, num_prb: usize) -> Self {
        ChannelModelConfig {
            num_macro,
            num_pico: 0,
            num_ue,
            num_prb,
            isd_m: default_isd(),
            pico_offset_m: default_pico_offset(),
            hotspot_radius_m: default_hotspot_radius(),
            min_ue_dist_m: default_min_ue_dist(),
            drop_radius_m: None,
            macro_power_dbm: default_macro_power(),
            pico_power_dbm: default_pico_power(),
            shadowing_sigma_db: default_shadowing(),
            fast_fading: false,
            macro_path_loss: PathLossParams::macro_default(),
            pico_path_loss: PathLossParams::pico_default(),
            ooc_ring: OocRingParams::default(),
        }
    }

    pub fn num_bs(&self) -> usize {
        self.num_macro + self.num_pico
    }

    pub fn drop_radius(&self) -> f64 {
        self.drop_radius_m.unwrap_or(self.isd_m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_macro == 0 {
            return Err(Error::config("at least one macro BS is required"));
        }
        if self.num_bs() > MAX_BS {
            return Err(Error::config(format!("at most {MAX_BS} BSs are supported")));
        }
        if self.num_ue == 0 || self.num_prb == 0 {
            return Err(Error::config("UE and PRB counts must be positive"));
        }
        let lengths = [
            ("isd_m", self.isd_m),
            ("pico_offset_m", self.pico_offset_m),
            ("hotspot_radius_m", self.hotspot_radius_m),
            ("drop_radius_m", self.drop_radius()),
        ];
        for (name, value) in lengths {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::config(format!("{name} must be positive and finite")));
            }
        }
        if !self.min_ue_dist_m.is_finite() || self.min_ue_dist_m < 0.0 {
            return Err(Error::config("min_ue_dist_m must be non-negative"));
        }
        if self.min_ue_dist_m >= self.drop_radius() {
            return Err(Error::config("min_ue_dist_m leaves no room inside the drop radius"));
        }
        if !self.shadowing_sigma_db.is_finite() || self.shadowing_sigma_db < 0.0 {
            return Err(Error::config("shadowing_sigma_db must be non-negative"));
        }
        if !self.macro_power_dbm.is_finite() || !self.pico_power_dbm.is_finite() {
            return Err(Error::config("transmit powers must be finite"));
        }
        if self.ooc_ring.count > 0
            && (!self.ooc_ring.radius_factor.is_finite() || self.ooc_ring.radius_factor <= 0.0)
        {
            return Err(Error::config("ooc_ring.radius_factor must be positive"));
        }
        Ok(())
    }
}

/// Positions of the first `count` sites of a hexagonal lattice with
/// spacing `isd_m`, spiraling outward from the origin. Deterministic:
/// sites are ordered by ring, then by axial coordinates.
pub fn hex_positions(count: usize, isd_m: f64) -> Vec<(f64, f64)> {
    let mut cells: Vec<(i64, i64, i64)> = Vec::new(); // (ring, q, r)
    let mut radius = 1i64;
    while 3 * radius * (radius + 1) + 1 < count as i64 {
        radius += 1;
    }
    for q in -radius..=radius {
        for r in -radius..=radius {
            let ring = (q.abs() + r.abs() + (q + r).abs()) / 2;
            if ring <= radius {
                cells.push((ring, q, r));
            }
        }
    }
    cells.sort_unstable();
    cells
        .into_iter()
        .take(count)
        .map(|(_, q, r)| {
            let x = isd_m * (q as f64 + r as f64 / 2.0);
            let y = isd_m * (3f64.sqrt() / 2.0) * r as f64;
            (x, y)
        })
        .collect()
}

/// Placed transmitters and receivers of one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct DropGeometry {
    /// Cluster BS positions: macros first (hex spiral), then picos.
    pub bs_positions: Vec<(f64, f64)>,
    pub bs_classes: Vec<BsClass>,
    pub ue_positions: Vec<(f64, f64)>,
    /// UEs `0..num_hotspot` were placed around a pico.
    pub num_hotspot: usize,
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// Draw BS and UE positions. RNG draw order: for each hotspot UE, a pico
/// index then disc samples until accepted; for each remaining UE, disc
/// samples until accepted. With picos present, ⌊2N/3⌋ UEs are hotspot
/// UEs (placed first).
pub fn generate_geometry(config: &ChannelModelConfig, rng: &mut ChaCha12Rng) -> Result<DropGeometry> {
    config.validate()?;
    let mut bs_positions = hex_positions(config.num_macro, config.isd_m);
    let mut bs_classes = vec![BsClass::Macro; config.num_macro];
    for p in 0..config.num_pico {
        let host = bs_positions[p % config.num_macro];
        let angle = std::f64::consts::FRAC_PI_3 * p as f64;
        bs_positions.push((
            host.0 + config.pico_offset_m * angle.cos(),
            host.1 + config.pico_offset_m * angle.sin(),
        ));
        bs_classes.push(BsClass::Pico);
    }

    let num_hotspot = if config.num_pico > 0 { 2 * config.num_ue / 3 } else { 0 };
    let mut ue_positions = Vec::with_capacity(config.num_ue);
    for ue in 0..config.num_ue {
        let (center, radius) = if ue < num_hotspot {
            let pico = config.num_macro + rng.gen_range(0..config.num_pico);
            (bs_positions[pico], config.hotspot_radius_m)
        } else {
            ((0.0, 0.0), config.drop_radius())
        };
        let mut attempts = 0;
        let position = loop {
            let r = radius * rng.gen::<f64>().sqrt();
            let theta = rng.gen::<f64>() * std::f64::consts::TAU;
            let candidate = (center.0 + r * theta.cos(), center.1 + r * theta.sin());
            if bs_positions.iter().all(|&bs| dist(candidate, bs) >= config.min_ue_dist_m) {
                break candidate;
            }
            attempts += 1;
            if attempts > 1000 {
                return Err(Error::config(
                    "UE placement failed: minimum distance incompatible with the geometry",
                ));
            }
        };
        ue_positions.push(position);
    }
    Ok(DropGeometry { bs_positions, bs_classes, ue_positions, num_hotspot })
}

/// Generate one synthetic drop. RNG draw order: geometry (see
/// [`generate_geometry`]), then one shadowing value per (UE, BS) if
/// shadowing is enabled, then one fading factor per (UE, BS, PRB) if fast
/// fading is enabled.
pub fn generate_scenario(
    config: &ChannelModelConfig,
    noise_mw: f64,
    with_ooc: bool,
    seed: u64,
) -> Result<NetworkScenario> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let geometry = generate_geometry(config, &mut rng)?;
    let num_ue = config.num_ue;
    let num_bs = config.num_bs();
    let num_prb = config.num_prb;

    let mut shadow_db = vec![0.0f64; num_ue * num_bs];
    if config.shadowing_sigma_db > 0.0 {
        let normal = Normal::new(0.0, config.shadowing_sigma_db)
            .map_err(|e| Error::config(format!("shadowing distribution: {e}")))?;
        for value in shadow_db.iter_mut() {
            *value = normal.sample(&mut rng);
        }
    }
    let mut fading = vec![1.0f64; num_ue * num_bs * num_prb];
    if config.fast_fading {
        let exp = Exp::new(1.0).expect("unit-rate exponential is valid");
        for value in fading.iter_mut() {
            *value = exp.sample(&mut rng);
        }
    }

    let mut gain = vec![0.0f64; num_ue * num_bs * num_prb];
    for n in 0..num_ue {
        for m in 0..num_bs {
            let params = match geometry.bs_classes[m] {
                BsClass::Macro => &config.macro_path_loss,
                BsClass::Pico => &config.pico_path_loss,
            };
            let d = dist(geometry.ue_positions[n], geometry.bs_positions[m]);
            let db = -params.loss_db(d) + shadow_db[n * num_bs + m];
            let slow = db_to_linear(db);
            for l in 0..num_prb {
                gain[(n * num_bs + m) * num_prb + l] = slow * fading[(n * num_bs + m) * num_prb + l];
            }
        }
    }

    let mut tx_power = vec![0.0f64; num_bs * num_prb];
    for m in 0..num_bs {
        let total_dbm = match geometry.bs_classes[m] {
            BsClass::Macro => config.macro_power_dbm,
            BsClass::Pico => config.pico_power_dbm,
        };
        let per_prb = db_to_linear(total_dbm) / num_prb as f64;
        for l in 0..num_prb {
            tx_power[m * num_prb + l] = per_prb;
        }
    }

    let mut ooc = vec![0.0f64; num_ue * num_prb];
    if with_ooc && config.ooc_ring.count > 0 {
        let ring_radius = config.ooc_ring.radius_factor * config.isd_m;
        let per_prb = db_to_linear(config.ooc_ring.power_dbm) / num_prb as f64;
        let externals: Vec<(f64, f64)> = (0..config.ooc_ring.count)
            .map(|k| {
                let angle = std::f64::consts::TAU * k as f64 / config.ooc_ring.count as f64;
                (ring_radius * angle.cos(), ring_radius * angle.sin())
            })
            .collect();
        for n in 0..num_ue {
            let mut total = 0.0;
            for &ext in &externals {
                let d = dist(geometry.ue_positions[n], ext);
                total += db_to_linear(-config.macro_path_loss.loss_db(d)) * per_prb;
            }
            for l in 0..num_prb {
                ooc[n * num_prb + l] = total;
            }
        }
    }

    NetworkScenario::new(
        num_ue,
        num_bs,
        num_prb,
        geometry.bs_classes,
        tx_power,
        gain,
        noise_mw,
        ooc,
    )
}

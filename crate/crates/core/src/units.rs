//! dB / linear conversions.
//!
//! Every stored power or gain in this crate is linear (mW for powers);
//! decibels appear only at configuration boundaries.

/// kT at 290 K, the usual thermal noise density reference.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

/// Nominal bandwidth of one resource block.
pub const PRB_BANDWIDTH_HZ: f64 = 180e3;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Thermal noise power in dBm over `bandwidth_hz`.
pub fn thermal_noise_dbm(bandwidth_hz: f64) -> f64 {
    THERMAL_NOISE_DBM_PER_HZ + 10.0 * bandwidth_hz.log10()
}

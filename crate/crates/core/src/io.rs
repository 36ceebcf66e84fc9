//! File formats: TOML experiment configs, gain-tensor import/export, and
//! JSON/CSV result writers.
//!
//! Floats are written with Rust's shortest-round-trip formatting, so a
//! write/read cycle reproduces gains bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::csi::CsiTable;
use crate::error::{Error, Result};
use crate::network::{BsClass, NetworkScenario};
use crate::sim::{ChannelSource, CompareOutput, RunOutput, SimConfig};
use crate::units::db_to_linear;

/// Imported channel gain tensor, linear units, indexed `[ue][bs][prb]`
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GainTensor {
    pub num_ue: usize,
    pub num_bs: usize,
    pub num_prb: usize,
    pub gains: Vec<f64>,
}

impl GainTensor {
    pub fn new(num_ue: usize, num_bs: usize, num_prb: usize, gains: Vec<f64>) -> Result<Self> {
        if gains.len() != num_ue * num_bs * num_prb {
            return Err(Error::config(format!(
                "gain tensor holds {} values, expected {}·{}·{} = {}",
                gains.len(),
                num_ue,
                num_bs,
                num_prb,
                num_ue * num_bs * num_prb
            )));
        }
        Ok(GainTensor { num_ue, num_bs, num_prb, gains })
    }

    /// Combine the tensor with per-BS band powers (dBm, split evenly over
    /// PRBs) into a scenario with no out-of-cluster interference.
    pub fn into_scenario(
        self,
        tx_power_dbm: &[f64],
        bs_class: Vec<BsClass>,
        noise_mw: f64,
    ) -> Result<NetworkScenario> {
        if tx_power_dbm.len() != self.num_bs || bs_class.len() != self.num_bs {
            return Err(Error::config(format!(
                "expected {} per-BS powers and classes, got {} and {}",
                self.num_bs,
                tx_power_dbm.len(),
                bs_class.len()
            )));
        }
        let mut tx_power = Vec::with_capacity(self.num_bs * self.num_prb);
        for &dbm in tx_power_dbm {
            let per_prb = db_to_linear(dbm) / self.num_prb as f64;
            tx_power.extend(std::iter::repeat(per_prb).take(self.num_prb));
        }
        NetworkScenario::new(
            self.num_ue,
            self.num_bs,
            self.num_prb,
            bs_class,
            tx_power,
            self.gains,
            noise_mw,
            vec![0.0; self.num_ue * self.num_prb],
        )
    }
}

/// Read a gain tensor: whitespace-separated, header `N M L`, then N·M·L
/// linear gains row-major.
pub fn read_gain_tensor(path: impl AsRef<Path>) -> Result<GainTensor> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::parse(format!("{}: {e}", path.display())))?;
    let mut tokens = text.split_whitespace();
    let mut dim = |name: &str| -> Result<usize> {
        tokens
            .next()
            .ok_or_else(|| Error::parse(format!("gain tensor header is missing {name}")))?
            .parse::<usize>()
            .map_err(|e| Error::parse(format!("gain tensor header {name}: {e}")))
    };
    let num_ue = dim("N")?;
    let num_bs = dim("M")?;
    let num_prb = dim("L")?;
    let expected = num_ue * num_bs * num_prb;
    let mut gains = Vec::with_capacity(expected);
    for token in tokens {
        let value: f64 =
            token.parse().map_err(|e| Error::parse(format!("gain value {token:?}: {e}")))?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::parse(format!("gain value {value} is not a finite power gain")));
        }
        gains.push(value);
    }
    if gains.len() != expected {
        return Err(Error::parse(format!(
            "gain tensor has {} values, header promises {expected}",
            gains.len()
        )));
    }
    GainTensor::new(num_ue, num_bs, num_prb, gains)
}

/// Write a gain tensor in the format [`read_gain_tensor`] accepts, one
/// `(ue, bs)` row per line.
pub fn write_gain_tensor(path: impl AsRef<Path>, tensor: &GainTensor) -> Result<()> {
    let mut out = format!("{} {} {}\n", tensor.num_ue, tensor.num_bs, tensor.num_prb);
    for row in tensor.gains.chunks(tensor.num_prb.max(1)) {
        for (i, value) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            write!(out, "{value}").expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Load an experiment config from TOML. A relative external gain-tensor
/// path is resolved against the config file's directory.
pub fn load_config(path: impl AsRef<Path>) -> Result<SimConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::parse(format!("{}: {e}", path.display())))?;
    let mut config: SimConfig =
        toml::from_str(&text).map_err(|e| Error::parse(format!("{}: {e}", path.display())))?;
    if let ChannelSource::External { gain_tensor, .. } = &mut config.channel {
        if gain_tensor.is_relative() {
            if let Some(dir) = path.parent() {
                *gain_tensor = dir.join(&*gain_tensor);
            }
        }
    }
    Ok(config)
}

/// Write an experiment config as TOML.
pub fn write_config(path: impl AsRef<Path>, config: &SimConfig) -> Result<()> {
    let text =
        toml::to_string_pretty(config).map_err(|e| Error::parse(format!("config encode: {e}")))?;
    fs::write(path, text)?;
    Ok(())
}

/// Write a run result as pretty JSON.
pub fn write_summary_json(path: impl AsRef<Path>, run: &RunOutput) -> Result<()> {
    let text = serde_json::to_string_pretty(run)
        .map_err(|e| Error::parse(format!("run encode: {e}")))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Write a comparison result as pretty JSON.
pub fn write_compare_json(path: impl AsRef<Path>, compare: &CompareOutput) -> Result<()> {
    let text = serde_json::to_string_pretty(compare)
        .map_err(|e| Error::parse(format!("comparison encode: {e}")))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Write final per-UE throughputs as CSV: `drop, ue, throughput`.
pub fn write_per_ue_csv(path: impl AsRef<Path>, run: &RunOutput) -> Result<()> {
    let mut writer = csv::Writer::from_writer(fs::File::create(path)?);
    let record = |w: &mut csv::Writer<fs::File>, fields: &[String]| -> Result<()> {
        w.write_record(fields).map_err(|e| Error::parse(format!("csv write: {e}")))
    };
    record(&mut writer, &["drop".into(), "ue".into(), "throughput".into()])?;
    for (drop, metrics) in run.drops.iter().enumerate() {
        for (ue, &throughput) in metrics.per_ue.iter().enumerate() {
            record(&mut writer, &[drop.to_string(), ue.to_string(), throughput.to_string()])?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Dump a report table as CSV: `ue, prb, scenario, muted, rate`, where
/// `muted` is the space-joined muted-BS list of the scenario.
pub fn write_reports_csv(path: impl AsRef<Path>, table: &CsiTable) -> Result<()> {
    let mut writer = csv::Writer::from_writer(fs::File::create(path)?);
    writer
        .write_record(["ue", "prb", "scenario", "muted", "rate"])
        .map_err(|e| Error::parse(format!("csv write: {e}")))?;
    for ue in 0..table.num_ue() {
        for prb in 0..table.num_prb() {
            for scenario in 0..table.j_prime() {
                let muted = table
                    .scenario_mask(ue, scenario)
                    .members()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                writer
                    .write_record([
                        ue.to_string(),
                        prb.to_string(),
                        scenario.to_string(),
                        muted,
                        table.rate(ue, prb, scenario).to_string(),
                    ])
                    .map_err(|e| Error::parse(format!("csv write: {e}")))?;
            }
        }
    }
    writer.flush()?;
    Ok(())
}

/// Render a comparison as an aligned text table.
pub fn render_compare_table(compare: &CompareOutput) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:>12} {:>10} {:>12} {:>10} {:>10}",
        "scheduler", "geo_mean", "vs_base", "cell_edge", "vs_base", "muted"
    );
    for row in &compare.rows {
        let _ = writeln!(
            out,
            "{:<12} {:>12.6} {:>10.4} {:>12.6} {:>10.4} {:>10.4}",
            row.scheduler.as_str(),
            row.summary.geo_mean,
            row.geo_mean_ratio,
            row.summary.cell_edge,
            row.cell_edge_ratio,
            row.summary.muted_fraction,
        );
    }
    out
}

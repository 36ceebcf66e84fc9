//! Small statistics helpers for experiment comparisons.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Result of a paired one-sided t-test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TTestOutcome {
    /// Test statistic; infinite when the paired differences have zero
    /// variance but a non-zero mean.
    pub t: f64,
    /// One-sided p-value for the alternative `mean(a - b) > 0`.
    pub p: f64,
    /// Degrees of freedom (`n - 1`).
    pub df: usize,
    pub mean_diff: f64,
}

/// Paired one-sided t-test of the alternative hypothesis
/// `mean(a - b) > 0` against the null `mean(a - b) <= 0`.
///
/// Degenerate zero-variance samples are resolved by sign: p = 0 when all
/// differences are positive, p = 1 when the shared difference is <= 0.
pub fn paired_t_test_greater(a: &[f64], b: &[f64]) -> Result<TTestOutcome> {
    if a.len() != b.len() {
        return Err(Error::domain("paired samples must have equal length"));
    }
    if a.len() < 2 {
        return Err(Error::domain("paired t-test needs at least two pairs"));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::domain("paired differences must be finite"));
    }
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let df = diffs.len() - 1;
    if var == 0.0 {
        let (t, p) = if mean > 0.0 { (f64::INFINITY, 0.0) } else { (f64::NEG_INFINITY, 1.0) };
        return Ok(TTestOutcome { t, p, df, mean_diff: mean });
    }
    let t = mean / (var / n).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df as f64)
        .map_err(|e| Error::domain(format!("t distribution: {e}")))?;
    Ok(TTestOutcome { t, p: 1.0 - dist.cdf(t), df, mean_diff: mean })
}

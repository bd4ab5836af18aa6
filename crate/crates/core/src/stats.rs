//! Normal-approximation confidence intervals.

use serde::Serialize;

use crate::error::{HawkesError, Result};

pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ci95 {
    pub mean: f64,
    pub halfwidth: f64,
    /// Set when `n = 1`; the halfwidth is then reported as zero.
    pub degenerate: bool,
}

impl Ci95 {
    pub fn covers(&self, value: f64) -> bool {
        (value - self.mean).abs() <= self.halfwidth
    }
}

/// Mean and `1.96 * sd / sqrt(n)` using the unbiased sample variance.
pub fn ci95(samples: &[f64]) -> Result<Ci95> {
    let n = samples.len();
    if n == 0 {
        return Err(HawkesError::EmptyInput("ci95 needs at least one sample"));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Ok(Ci95 {
            mean,
            halfwidth: 0.0,
            degenerate: true,
        });
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(Ci95 {
        mean,
        halfwidth: Z_95 * (var / n as f64).sqrt(),
        degenerate: false,
    })
}

//! Model parameters, validation and closed-form stationary quantities.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HawkesError, Result};
use crate::kernel::{ExcitationKernel, ExponentialKernel};
use crate::linalg::Matrix;
use crate::rng::RandomStream;

/// Background intensities plus excitation kernel.
///
/// Construction checks shapes and positivity only. Stability is a property of
/// the model that [`validate_model`] reports on, so an unstable model can
/// still be loaded and diagnosed.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<K = ExponentialKernel> {
    lambda0: Vec<f64>,
    kernel: K,
}

impl<K: ExcitationKernel> ModelParams<K> {
    pub fn new(lambda0: Vec<f64>, kernel: K) -> Result<Self> {
        if lambda0.len() != kernel.dim() {
            return Err(HawkesError::DimensionMismatch(format!(
                "lambda0 has {} entries but the kernel has dimension {}",
                lambda0.len(),
                kernel.dim()
            )));
        }
        if let Some(l) = lambda0.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(HawkesError::InvalidParameter(format!(
                "background intensities must be positive, got {l}"
            )));
        }
        Ok(Self { lambda0, kernel })
    }

    pub fn dim(&self) -> usize {
        self.lambda0.len()
    }

    pub fn lambda0(&self) -> &[f64] {
        &self.lambda0
    }

    pub fn kernel(&self) -> &K {
        &self.kernel
    }
}

impl ModelParams<ExponentialKernel> {
    pub fn exponential(lambda0: Vec<f64>, alpha: &[Vec<f64>], beta: &[Vec<f64>]) -> Result<Self> {
        Self::new(lambda0, ExponentialKernel::from_rows(alpha, beta)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ModelConfig =
            serde_json::from_str(text).map_err(|e| HawkesError::Config(e.to_string()))?;
        config.try_into()
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| HawkesError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_config(&self) -> ModelConfig {
        ModelConfig {
            lambda0: self.lambda0.clone(),
            kernel: KernelConfig::Exponential {
                alpha: self.kernel.alpha().to_rows(),
                beta: self.kernel.beta().to_rows(),
            },
        }
    }
}

/// On-disk model description:
/// `{"lambda0": [...], "kernel": {"type": "exponential", "alpha": [[...]], "beta": [[...]]}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub lambda0: Vec<f64>,
    pub kernel: KernelConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelConfig {
    Exponential {
        alpha: Vec<Vec<f64>>,
        beta: Vec<Vec<f64>>,
    },
}

impl TryFrom<ModelConfig> for ModelParams<ExponentialKernel> {
    type Error = HawkesError;

    fn try_from(config: ModelConfig) -> Result<Self> {
        match config.kernel {
            KernelConfig::Exponential { alpha, beta } => {
                Self::exponential(config.lambda0, &alpha, &beta)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub dimension: usize,
    pub spectral_radius: f64,
    pub stable: bool,
    pub lambda0_positive: bool,
    /// Tilts strictly below this value have finite birth-time c.g.f.s for every pair.
    pub max_birth_tilt: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.stable && self.lambda0_positive
    }
}

/// Builds the report without failing; see [`validate_model`] for the checked form.
pub fn validation_report<K: ExcitationKernel>(params: &ModelParams<K>) -> ValidationReport {
    let radius = hbar(params).spectral_radius_nonneg();
    ValidationReport {
        dimension: params.dim(),
        spectral_radius: radius,
        stable: radius < 1.0,
        lambda0_positive: params.lambda0.iter().all(|l| *l > 0.0),
        max_birth_tilt: params.kernel.min_tilt_limit(),
    }
}

/// Checks positivity and the stability condition `rho(hbar) < 1`.
pub fn validate_model<K: ExcitationKernel>(params: &ModelParams<K>) -> Result<ValidationReport> {
    let report = validation_report(params);
    if !report.lambda0_positive {
        return Err(HawkesError::InvalidParameter(
            "background intensities must be positive".into(),
        ));
    }
    if !report.stable {
        return Err(HawkesError::Unstable {
            radius: report.spectral_radius,
        });
    }
    Ok(report)
}

/// Branching matrix, `hbar_ij = alpha_ij / beta_ij` for the exponential kernel.
pub fn hbar<K: ExcitationKernel>(params: &ModelParams<K>) -> Matrix {
    params.kernel.branching_matrix()
}

/// Long-run event rate per direction, the solution of `(I - hbar^T) x = lambda0`.
pub fn stationary_intensity<K: ExcitationKernel>(params: &ModelParams<K>) -> Result<Vec<f64>> {
    let h = hbar(params);
    let radius = h.spectral_radius_nonneg();
    if radius >= 1.0 {
        return Err(HawkesError::Unstable { radius });
    }
    let x = h
        .transpose()
        .identity_minus()
        .solve(&params.lambda0)
        .map_err(|_| HawkesError::Unstable { radius })?;
    if x.iter().any(|v| !(*v > 0.0)) {
        return Err(HawkesError::Unstable { radius });
    }
    Ok(x)
}

/// Birth-time c.g.f. `psi_f_ij(theta)`.
pub fn psi_f<K: ExcitationKernel>(
    params: &ModelParams<K>,
    from: usize,
    to: usize,
    theta: f64,
) -> Result<f64> {
    params.kernel.birth_cgf(from, to, theta)
}

/// Draw from the birth density of pair `(from, to)` tilted by `eta`.
pub fn sample_tilted_birth<K: ExcitationKernel>(
    params: &ModelParams<K>,
    from: usize,
    to: usize,
    eta: f64,
    rng: &mut RandomStream,
) -> Result<f64> {
    if eta < 0.0 {
        return Err(HawkesError::InvalidParameter(format!(
            "tilt must be nonnegative, got {eta}"
        )));
    }
    params.kernel.sample_tilted_birth(from, to, eta, rng)
}

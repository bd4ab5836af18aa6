//! Excitation kernels.
//!
//! The samplers only ever touch a kernel through [`ExcitationKernel`]: the
//! branching mean `hbar_ij`, the birth-time c.g.f. `psi_f_ij(theta)`, and a
//! sampler for the exponentially tilted birth density. Any kernel that can
//! provide those three plugs into cluster generation, tilting and perfect
//! sampling unchanged.
//!
//! Index convention: `(from, to)` is the effect of a `from`-event on the
//! intensity of direction `to`.

use serde::{Deserialize, Serialize};

use crate::error::{HawkesError, Result};
use crate::linalg::Matrix;
use crate::rng::RandomStream;

pub trait ExcitationKernel: Send + Sync {
    fn dim(&self) -> usize;

    /// `hbar_ij`, the integral of `h_ij` over `[0, inf)`.
    fn branching_mean(&self, from: usize, to: usize) -> f64;

    /// Supremum of tilts `theta` for which `psi_f_ij(theta)` is finite.
    fn tilt_limit(&self, from: usize, to: usize) -> f64;

    /// Log moment generating function of the birth density `f_ij = h_ij / hbar_ij`.
    fn birth_cgf(&self, from: usize, to: usize, theta: f64) -> Result<f64>;

    /// One draw from `f_ij(t) exp(eta t - psi_f_ij(eta))`.
    fn sample_tilted_birth(
        &self,
        from: usize,
        to: usize,
        eta: f64,
        rng: &mut RandomStream,
    ) -> Result<f64>;

    fn branching_matrix(&self) -> Matrix {
        Matrix::from_fn(self.dim(), |i, j| self.branching_mean(i, j))
    }

    /// Smallest tilt limit over all pairs.
    fn min_tilt_limit(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| self.tilt_limit(i, j))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `h_ij(t) = alpha_ij exp(-beta_ij t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialKernel {
    alpha: Matrix,
    beta: Matrix,
}

impl ExponentialKernel {
    pub fn new(alpha: Matrix, beta: Matrix) -> Result<Self> {
        if alpha.dim() != beta.dim() {
            return Err(HawkesError::DimensionMismatch(format!(
                "alpha is {0}x{0} but beta is {1}x{1}",
                alpha.dim(),
                beta.dim()
            )));
        }
        if alpha.dim() == 0 {
            return Err(HawkesError::DimensionMismatch(
                "kernel has dimension 0".into(),
            ));
        }
        if let Some(a) = alpha.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(HawkesError::InvalidParameter(format!(
                "alpha entries must be finite and nonnegative, got {a}"
            )));
        }
        if let Some(b) = beta.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
            return Err(HawkesError::InvalidParameter(format!(
                "beta entries must be finite and positive, got {b}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn from_rows(alpha: &[Vec<f64>], beta: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_rows(alpha)?, Matrix::from_rows(beta)?)
    }

    pub fn alpha(&self) -> &Matrix {
        &self.alpha
    }

    pub fn beta(&self) -> &Matrix {
        &self.beta
    }

    /// `h_ij(t)`.
    pub fn excitation(&self, from: usize, to: usize, t: f64) -> f64 {
        self.alpha[(from, to)] * (-self.beta[(from, to)] * t).exp()
    }

    fn check_tilt(&self, from: usize, to: usize, theta: f64) -> Result<f64> {
        let beta = self.beta[(from, to)];
        if theta >= beta || theta.is_nan() {
            return Err(HawkesError::TiltTooLarge {
                theta,
                limit: beta,
                from,
                to,
            });
        }
        Ok(beta)
    }
}

impl ExcitationKernel for ExponentialKernel {
    fn dim(&self) -> usize {
        self.alpha.dim()
    }

    fn branching_mean(&self, from: usize, to: usize) -> f64 {
        self.alpha[(from, to)] / self.beta[(from, to)]
    }

    fn tilt_limit(&self, from: usize, to: usize) -> f64 {
        self.beta[(from, to)]
    }

    fn birth_cgf(&self, from: usize, to: usize, theta: f64) -> Result<f64> {
        let beta = self.check_tilt(from, to, theta)?;
        // log(beta / (beta - theta)) without cancellation near theta = 0
        Ok(-(-theta / beta).ln_1p())
    }

    fn sample_tilted_birth(
        &self,
        from: usize,
        to: usize,
        eta: f64,
        rng: &mut RandomStream,
    ) -> Result<f64> {
        let beta = self.check_tilt(from, to, eta)?;
        Ok(rng.exponential(beta - eta))
    }
}

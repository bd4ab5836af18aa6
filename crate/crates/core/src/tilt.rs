//! Exponential tilting of clusters with respect to their total birth time.
//!
//! For a tilt `theta`, the vector `psi_B(theta)` of total-birth-time c.g.f.s
//! solves
//!
//! ```text
//! psi_B_i = sum_j hbar_ij * (exp(psi_f_ij(theta) + psi_B_j) - 1)
//! ```
//!
//! Iterating the right-hand side from zero climbs monotonically to the
//! minimal nonnegative root, which is the c.g.f. itself. Past the
//! feasibility boundary the system has no root and the iterates blow up.
//!
//! Under the tilted measure, clusters are again branching processes with
//! offspring means `h_tilde_ij = hbar_ij * exp(psi_f_ij + psi_B_j)` and birth
//! densities tilted by the same `theta`.

use serde::Serialize;

use crate::branching::EffectiveClusterParams;
use crate::error::{HawkesError, Result};
use crate::kernel::ExcitationKernel;
use crate::linalg::Matrix;
use crate::model::{validate_model, ModelParams};

/// Stop once successive iterates differ by less than this in sup norm.
pub const FIXED_POINT_TOL: f64 = 1e-13;
/// Any iterate above this is treated as divergence.
pub const DIVERGENCE_GUARD: f64 = 1e3;
pub const MAX_ITERATIONS: usize = 100_000;
/// Width to which the feasibility boundary is bracketed.
pub const BOUNDARY_TOL: f64 = 1e-7;
/// Tilts closer than this share a cache entry.
pub const CACHE_KEY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct TiltSolution {
    pub eta: f64,
    pub psi_b: Vec<f64>,
    pub psi_f: Matrix,
    pub h_tilde: Matrix,
    /// Row sums of `(I - h_tilde)^-1`, i.e. mean tilted cluster sizes.
    /// Empty when infeasible.
    pub s_tilde_rowsums: Vec<f64>,
    pub spectral_radius: f64,
    pub iterations: usize,
    /// `max_i |psi_B_i - F_i(psi_B)|` at the returned point.
    pub residual: f64,
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infeasibility: Option<String>,
}

impl TiltSolution {
    fn require_feasible(&self) -> Result<()> {
        if self.feasible {
            Ok(())
        } else {
            Err(HawkesError::Infeasible {
                eta: self.eta,
                reason: self
                    .infeasibility
                    .clone()
                    .unwrap_or_else(|| "no finite c.g.f.".into()),
            })
        }
    }
}

fn fixed_point_map(hbar: &Matrix, psi_f: &Matrix, x: &[f64], out: &mut [f64]) {
    let d = x.len();
    for i in 0..d {
        out[i] = (0..d)
            .filter(|&j| hbar[(i, j)] > 0.0)
            .map(|j| hbar[(i, j)] * (psi_f[(i, j)] + x[j]).exp_m1())
            .sum();
    }
}

fn tilted_means(hbar: &Matrix, psi_f: &Matrix, psi_b: &[f64]) -> Matrix {
    Matrix::from_fn(hbar.dim(), |i, j| {
        if hbar[(i, j)] > 0.0 {
            hbar[(i, j)] * (psi_f[(i, j)] + psi_b[j]).exp()
        } else {
            0.0
        }
    })
}

/// Solves the c.g.f. system at tilt `theta` by fixed-point iteration from 0.
///
/// Divergence is not an error: it comes back as `feasible == false`.
/// A tilt at or beyond some kernel's integrability limit is `TiltTooLarge`.
pub fn solve_psi_b<K: ExcitationKernel>(
    params: &ModelParams<K>,
    theta: f64,
) -> Result<TiltSolution> {
    if !(theta >= 0.0) {
        return Err(HawkesError::InvalidParameter(format!(
            "tilt must be nonnegative, got {theta}"
        )));
    }
    let d = params.dim();
    let kernel = params.kernel();
    let hbar = kernel.branching_matrix();
    let mut psi_f = Matrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            psi_f[(i, j)] = kernel.birth_cgf(i, j, theta)?;
        }
    }

    let mut x = vec![0.0; d];
    let mut next = vec![0.0; d];
    let mut iterations = 0;
    let mut failure = None;
    loop {
        fixed_point_map(&hbar, &psi_f, &x, &mut next);
        iterations += 1;
        let step = x
            .iter()
            .zip(&next)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        std::mem::swap(&mut x, &mut next);
        if x.iter().any(|v| !v.is_finite() || *v > DIVERGENCE_GUARD) {
            failure = Some(format!("iterates exceeded {DIVERGENCE_GUARD}"));
            break;
        }
        if step < FIXED_POINT_TOL {
            break;
        }
        if iterations >= MAX_ITERATIONS {
            failure = Some(format!("no convergence after {MAX_ITERATIONS} iterations"));
            break;
        }
    }

    fixed_point_map(&hbar, &psi_f, &x, &mut next);
    let residual = x
        .iter()
        .zip(&next)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let h_tilde = tilted_means(&hbar, &psi_f, &x);
    let spectral_radius = h_tilde.spectral_radius_nonneg();
    let mut s_tilde_rowsums = Vec::new();
    if failure.is_none() {
        if spectral_radius >= 1.0 {
            failure = Some(format!(
                "tilted branching matrix has spectral radius {spectral_radius}"
            ));
        } else {
            match h_tilde.identity_minus().solve(&vec![1.0; d]) {
                Ok(s) if s.iter().all(|v| v.is_finite() && *v >= 1.0 - 1e-9) => s_tilde_rowsums = s,
                _ => failure = Some("tilted cluster sizes are not finite".into()),
            }
        }
    }
    Ok(TiltSolution {
        eta: theta,
        psi_b: x,
        psi_f,
        h_tilde,
        s_tilde_rowsums,
        spectral_radius,
        iterations,
        residual,
        feasible: failure.is_none(),
        infeasibility: failure,
    })
}

/// Branching law of clusters under the tilted measure.
pub fn tilted_cluster_params<'a, K: ExcitationKernel>(
    params: &'a ModelParams<K>,
    sol: &TiltSolution,
) -> Result<EffectiveClusterParams<'a, K>> {
    sol.require_feasible()?;
    EffectiveClusterParams::new(params.kernel(), sol.h_tilde.clone(), sol.eta)
}

/// Solutions keyed by tilt value.
#[derive(Debug, Default, Clone)]
pub struct TiltCache {
    entries: Vec<TiltSolution>,
}

impl TiltCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get_or_solve<K: ExcitationKernel>(
        &mut self,
        params: &ModelParams<K>,
        eta: f64,
    ) -> Result<&TiltSolution> {
        let pos = match self
            .entries
            .iter()
            .position(|s| (s.eta - eta).abs() <= CACHE_KEY_TOL)
        {
            Some(pos) => pos,
            None => {
                self.entries.push(solve_psi_b(params, eta)?);
                self.entries.len() - 1
            }
        };
        Ok(&self.entries[pos])
    }
}

fn term_from(lambda0: f64, direction: usize, sol: &TiltSolution) -> Result<f64> {
    sol.require_feasible()?;
    Ok(lambda0 * sol.psi_b[direction].exp() / sol.eta * (1.0 + sol.s_tilde_rowsums[direction]))
}

/// Expected number of proposed clusters in `direction` at tilt `eta`:
/// `lambda0_i * exp(psi_B_i(eta)) / eta`.
pub fn expected_proposals<K: ExcitationKernel>(
    params: &ModelParams<K>,
    direction: usize,
    eta: f64,
) -> Result<f64> {
    check_positive_tilt(eta)?;
    let sol = solve_psi_b(params, eta)?;
    sol.require_feasible()?;
    Ok(params.lambda0()[direction] * sol.psi_b[direction].exp() / eta)
}

fn check_positive_tilt(eta: f64) -> Result<()> {
    if eta > 0.0 && eta.is_finite() {
        Ok(())
    } else {
        Err(HawkesError::InvalidParameter(format!(
            "tilt must be positive, got {eta}"
        )))
    }
}

/// Direction `i`'s summand of the complexity function:
/// `lambda0_i * exp(psi_B_i(eta)) / eta * (1 + S_tilde_i(eta))`.
pub fn complexity_term<K: ExcitationKernel>(
    params: &ModelParams<K>,
    direction: usize,
    eta: f64,
) -> Result<f64> {
    check_positive_tilt(eta)?;
    term_from(
        params.lambda0()[direction],
        direction,
        &solve_psi_b(params, eta)?,
    )
}

/// Expected number of random variates (cluster events plus one acceptance
/// uniform per proposal) spent sampling the pre-zero clusters with per-direction
/// tilts `eta`.
pub fn complexity_x<K: ExcitationKernel>(params: &ModelParams<K>, eta: &[f64]) -> Result<f64> {
    complexity_x_cached(params, eta, &mut TiltCache::new())
}

pub fn complexity_x_cached<K: ExcitationKernel>(
    params: &ModelParams<K>,
    eta: &[f64],
    cache: &mut TiltCache,
) -> Result<f64> {
    if eta.len() != params.dim() {
        return Err(HawkesError::DimensionMismatch(format!(
            "eta has {} entries, model has dimension {}",
            eta.len(),
            params.dim()
        )));
    }
    let mut total = 0.0;
    for (i, &e) in eta.iter().enumerate() {
        check_positive_tilt(e)?;
        total += term_from(params.lambda0()[i], i, cache.get_or_solve(params, e)?)?;
    }
    Ok(total)
}

/// Largest tilt (to within [`BOUNDARY_TOL`]) at which the c.g.f. system is
/// still solvable, found by bisection on `(0, min_ij tilt_limit_ij)`. The
/// returned value is itself feasible.
pub fn feasibility_boundary<K: ExcitationKernel>(params: &ModelParams<K>) -> Result<f64> {
    validate_model(params)?;
    let feasible = |theta: f64| matches!(solve_psi_b(params, theta), Ok(s) if s.feasible);
    let mut lo = 0.0;
    let mut hi = params.kernel().min_tilt_limit();
    if !hi.is_finite() {
        hi = 1.0;
        while feasible(hi) {
            lo = hi;
            hi *= 2.0;
        }
    }
    while hi - lo > BOUNDARY_TOL {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Per-direction upper end of the tilt search interval. The c.g.f. system is
/// shared by all directions, so every coordinate gets the same boundary.
pub fn theta0_upper<K: ExcitationKernel>(params: &ModelParams<K>) -> Result<Vec<f64>> {
    Ok(vec![feasibility_boundary(params)?; params.dim()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn zero_tilt_is_exactly_zero() {
        for p in [presets::symmetric_2d(), presets::asymmetric_5d()] {
            let sol = solve_psi_b(&p, 0.0).unwrap();
            assert!(sol.feasible);
            assert!(sol.psi_b.iter().all(|v| *v == 0.0));
            assert_eq!(sol.h_tilde, p.kernel().branching_matrix());
        }
    }

    #[test]
    fn table_values_symmetric() {
        let p = presets::symmetric_2d();
        let x = complexity_x(&p, &[0.07, 0.07]).unwrap();
        assert!((x - 258.5722).abs() < 1e-3, "{x}");
        let x = complexity_x(&p, &[0.03, 0.03]).unwrap();
        assert!((x - 395.3016).abs() < 1e-3, "{x}");
    }

    #[test]
    fn too_large_and_negative_tilts() {
        let p = presets::symmetric_2d();
        assert!(matches!(
            solve_psi_b(&p, 2.0),
            Err(HawkesError::TiltTooLarge { .. })
        ));
        assert!(matches!(
            solve_psi_b(&p, -0.1),
            Err(HawkesError::InvalidParameter(_))
        ));
        assert!(complexity_x(&p, &[0.0, 0.07]).is_err());
        assert!(complexity_x(&p, &[0.07]).is_err());
    }

    #[test]
    fn divergence_is_reported_as_infeasible() {
        let p = presets::symmetric_2d();
        let sol = solve_psi_b(&p, 1.0).unwrap();
        assert!(!sol.feasible);
        assert!(sol.infeasibility.is_some());
        assert!(matches!(
            tilted_cluster_params(&p, &sol),
            Err(HawkesError::Infeasible { .. })
        ));
        assert!(matches!(
            complexity_x(&p, &[1.0, 1.0]),
            Err(HawkesError::Infeasible { .. })
        ));
    }

    #[test]
    fn zero_tilt_cluster_params_are_the_model() {
        let p = presets::symmetric_2d();
        let sol = solve_psi_b(&p, 0.0).unwrap();
        let eff = tilted_cluster_params(&p, &sol).unwrap();
        assert_eq!(eff.offspring_means(), &p.kernel().branching_matrix());
        assert_eq!(eff.tilt(), 0.0);
    }

    #[test]
    fn tilting_inflates_offspring() {
        let p = presets::symmetric_2d();
        let sol = solve_psi_b(&p, 0.0664).unwrap();
        let eff = tilted_cluster_params(&p, &sol).unwrap();
        let hbar = p.kernel().branching_matrix();
        for i in 0..2 {
            for j in 0..2 {
                assert!(eff.offspring_means()[(i, j)] > hbar[(i, j)]);
            }
        }
        assert!(eff.spectral_radius() < 1.0);
    }

    #[test]
    fn cache_reuses_entries() {
        let p = presets::symmetric_2d();
        let mut cache = TiltCache::new();
        complexity_x_cached(&p, &[0.05, 0.05], &mut cache).unwrap();
        assert_eq!(cache.len(), 1);
        complexity_x_cached(&p, &[0.05, 0.06], &mut cache).unwrap();
        assert_eq!(cache.len(), 2);
    }

    #[test]
    fn zero_kernel_boundary_is_min_beta() {
        let p = ModelParams::exponential(
            vec![1.0, 1.0],
            &[vec![0.0; 2], vec![0.0; 2]],
            &[vec![1.0, 3.0], vec![2.0, 4.0]],
        )
        .unwrap();
        let b = theta0_upper(&p).unwrap();
        assert!(b.iter().all(|v| (1.0 - v) < 1e-6 && *v < 1.0));
    }

    #[test]
    fn symmetric_boundary_above_table_grid() {
        let b = feasibility_boundary(&presets::symmetric_2d()).unwrap();
        assert!(b > 0.09);
    }

    #[test]
    fn unstable_model_has_no_boundary() {
        let p = ModelParams::exponential(vec![1.0], &[vec![2.0]], &[vec![1.0]]).unwrap();
        assert!(matches!(
            feasibility_boundary(&p),
            Err(HawkesError::Unstable { .. })
        ));
    }
}

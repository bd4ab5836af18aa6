//! Choice of the tilt vector.
//!
//! The complexity function is a sum of one-coordinate terms, each convex, so
//! the minimizer is found by `d` independent golden-section searches on the
//! interior of `(0, theta0)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HawkesError, Result};
use crate::kernel::ExcitationKernel;
use crate::model::ModelParams;
use crate::tilt::{complexity_term, feasibility_boundary};

/// Distance kept from both ends of the search interval.
pub const BOUNDARY_EPS: f64 = 1e-6;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes a unimodal `f` on `[lo, hi]` until the bracket is narrower than
/// `tol`. Returns the bracket midpoint and `f` there. Non-finite values are
/// treated as `+inf`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let mut eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, eval(x))
}

#[derive(Debug, Clone, Serialize)]
pub struct EtaOptimum {
    pub eta_star: Vec<f64>,
    #[serde(rename = "X_at_eta_star")]
    pub x_at_eta_star: f64,
    /// Upper end of each coordinate's search interval.
    pub theta0: Vec<f64>,
    /// Per-direction summands of the complexity function at `eta_star`.
    pub terms: Vec<f64>,
    /// Coordinates whose minimizer sits within `10 * tol` of an interval end.
    pub at_boundary: Vec<bool>,
}

/// Tilt vector minimizing the expected sampling cost, each coordinate to a
/// bracket width of `tol`.
pub fn optimize_eta<K: ExcitationKernel>(params: &ModelParams<K>, tol: f64) -> Result<EtaOptimum> {
    if !(tol > 0.0) {
        return Err(HawkesError::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let theta0 = feasibility_boundary(params)?;
    let (lo, hi) = (BOUNDARY_EPS, theta0 - BOUNDARY_EPS);
    if !(hi > lo) {
        return Err(HawkesError::Infeasible {
            eta: theta0,
            reason: "no interior feasible tilt".into(),
        });
    }
    let per_direction: Vec<(f64, f64)> = (0..params.dim())
        .into_par_iter()
        .map(|i| {
            golden_section(
                |eta| complexity_term(params, i, eta).unwrap_or(f64::INFINITY),
                lo,
                hi,
                tol,
            )
        })
        .collect();
    if let Some(&(eta, _)) = per_direction.iter().find(|(_, v)| !v.is_finite()) {
        return Err(HawkesError::Infeasible {
            eta,
            reason: "complexity is not finite at the minimizer".into(),
        });
    }
    let margin = 10.0 * tol;
    Ok(EtaOptimum {
        eta_star: per_direction.iter().map(|(e, _)| *e).collect(),
        x_at_eta_star: per_direction.iter().map(|(_, v)| *v).sum(),
        theta0: vec![theta0; params.dim()],
        terms: per_direction.iter().map(|(_, v)| *v).collect(),
        at_boundary: per_direction
            .iter()
            .map(|(e, _)| *e - lo < margin || hi - *e < margin)
            .collect(),
    })
}

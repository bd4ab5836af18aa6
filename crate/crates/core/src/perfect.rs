//! Exact sampling of the stationary process on `[0, T]`.
//!
//! Events on `[0, T]` split into those of clusters whose immigrants arrived
//! before time 0 and are still active at 0, and those of clusters whose
//! immigrants arrive inside `[0, T]`. The second group is plain forward
//! simulation. The first is produced per immigrant direction `i` by:
//!
//! 1. proposing cluster arrival times from a Poisson process on `(-inf, 0]`
//!    with rate `lambda0_i * exp(psi_B_i(eta_i) + eta_i * t)`, which is a
//!    Poisson number of points each at `-Exp(eta_i)`;
//! 2. growing each proposal as a complete cluster under the law tilted by
//!    `eta_i`;
//! 3. accepting it iff its length reaches past 0 (`L > -tau`) and a uniform
//!    `U <= exp(-eta_i * (B + tau))`.
//!
//! Since `B >= L`, the acceptance weight is at most one whenever the first
//! condition holds.

use crate::branching::{generate_cluster, simulate_forward_into, EffectiveClusterParams};
use crate::cluster::Cluster;
use crate::error::{HawkesError, Result};
use crate::kernel::ExcitationKernel;
use crate::model::{validate_model, ModelParams};
use crate::path::{AcceptanceRecord, PathSample};
use crate::rng::RandomStream;
use crate::tilt::{tilted_cluster_params, TiltCache};

/// Proposed arrival times of pre-zero clusters for one direction.
pub fn sample_cluster_arrivals(
    lambda0: f64,
    psi_b: f64,
    eta: f64,
    rng: &mut RandomStream,
) -> Result<Vec<f64>> {
    if !(eta > 0.0 && eta.is_finite()) || !psi_b.is_finite() || !(lambda0 > 0.0) {
        return Err(HawkesError::InvalidParameter(format!(
            "arrival rate needs lambda0 > 0, finite psi_B and eta > 0 (got {lambda0}, {psi_b}, {eta})"
        )));
    }
    let k = rng.poisson(lambda0 * psi_b.exp() / eta);
    Ok((0..k).map(|_| -rng.exponential(eta)).collect())
}

#[derive(Debug, Clone)]
pub struct Proposal {
    pub cluster: Cluster,
    pub accepted: bool,
}

#[derive(Debug, Clone)]
struct DirectionPlan<'a, K> {
    eta: f64,
    psi_b: f64,
    tilted: EffectiveClusterParams<'a, K>,
}

/// Perfect sampler with its tilt solutions prepared once and reusable
/// across replications.
#[derive(Debug, Clone)]
pub struct PerfectSampler<'a, K> {
    params: &'a ModelParams<K>,
    plans: Vec<DirectionPlan<'a, K>>,
    forward: EffectiveClusterParams<'a, K>,
}

impl<'a, K: ExcitationKernel> PerfectSampler<'a, K> {
    pub fn new(params: &'a ModelParams<K>, eta: &[f64]) -> Result<Self> {
        validate_model(params)?;
        if eta.len() != params.dim() {
            return Err(HawkesError::DimensionMismatch(format!(
                "eta has {} entries, model has dimension {}",
                eta.len(),
                params.dim()
            )));
        }
        let mut cache = TiltCache::new();
        let mut plans = Vec::with_capacity(eta.len());
        for (i, &e) in eta.iter().enumerate() {
            if !(e > 0.0 && e.is_finite()) {
                return Err(HawkesError::InvalidParameter(format!(
                    "tilt for direction {} must be positive, got {e}",
                    i + 1
                )));
            }
            let sol = cache.get_or_solve(params, e)?;
            plans.push(DirectionPlan {
                eta: e,
                psi_b: sol.psi_b[i],
                tilted: tilted_cluster_params(params, sol)?,
            });
        }
        Ok(Self {
            params,
            plans,
            forward: EffectiveClusterParams::untilted(params)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn eta(&self) -> Vec<f64> {
        self.plans.iter().map(|p| p.eta).collect()
    }

    /// `psi_B_i(eta_i)` for each direction.
    pub fn psi_b(&self) -> Vec<f64> {
        self.plans.iter().map(|p| p.psi_b).collect()
    }

    pub fn tilted_params(&self, direction: usize) -> &EffectiveClusterParams<'a, K> {
        &self.plans[direction].tilted
    }

    /// Grows one tilted proposal rooted at `tau < 0` and runs the two-part
    /// acceptance test on it.
    pub fn propose(&self, direction: usize, tau: f64, rng: &mut RandomStream) -> Result<Proposal> {
        let plan = &self.plans[direction];
        let cluster = generate_cluster(&plan.tilted, direction, tau, rng)?;
        let u = rng.uniform();
        let accepted =
            cluster.length > -tau && u <= (-plan.eta * (cluster.total_birth + tau)).exp();
        if accepted {
            assert!(
                cluster.total_birth >= cluster.length * (1.0 - 1e-12) && cluster.length + tau > 0.0,
                "acceptance weight above one: B = {}, L = {}, tau = {tau}",
                cluster.total_birth,
                cluster.length
            );
        }
        Ok(Proposal { cluster, accepted })
    }

    /// Pre-zero clusters that are still active at time 0, with full event
    /// lists in absolute time.
    pub fn sample_n0(&self, rng: &mut RandomStream) -> Result<(Vec<Cluster>, AcceptanceRecord)> {
        let start = rng.draws();
        let mut record = AcceptanceRecord::new(self.dim());
        let mut accepted = Vec::new();
        for (i, plan) in self.plans.iter().enumerate() {
            let arrivals =
                sample_cluster_arrivals(self.params.lambda0()[i], plan.psi_b, plan.eta, rng)?;
            for tau in arrivals {
                let proposal = self.propose(i, tau, rng)?;
                record.proposed[i] += 1;
                record.rv_count_uniforms += 1;
                record.rv_count_events += proposal.cluster.size() as u64;
                if proposal.accepted {
                    record.accepted[i] += 1;
                    accepted.push(proposal.cluster);
                }
            }
        }
        record.rv_count_primitive = rng.draws() - start;
        Ok((accepted, record))
    }

    /// Stationary path on `[0, horizon]`.
    pub fn sample_path(&self, horizon: f64, rng: &mut RandomStream) -> Result<PathSample> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(HawkesError::InvalidParameter(format!(
                "horizon must be positive and finite, got {horizon}"
            )));
        }
        let start = rng.draws();
        let (clusters, record) = self.sample_n0(rng)?;
        let mut times = vec![Vec::new(); self.dim()];
        for e in clusters.iter().flat_map(|c| &c.events) {
            if (0.0..=horizon).contains(&e.time) {
                times[e.direction].push(e.time);
            }
        }
        let forward_events = simulate_forward_into(
            &self.forward,
            self.params.lambda0(),
            horizon,
            &mut times,
            rng,
        )?;
        for ts in &mut times {
            ts.sort_by(f64::total_cmp);
        }
        Ok(PathSample {
            horizon,
            times,
            record,
            forward_events,
            primitive_draws: rng.draws() - start,
        })
    }
}

/// One-shot form of [`PerfectSampler::sample_n0`].
pub fn sample_n0<K: ExcitationKernel>(
    params: &ModelParams<K>,
    eta: &[f64],
    rng: &mut RandomStream,
) -> Result<(Vec<Cluster>, AcceptanceRecord)> {
    PerfectSampler::new(params, eta)?.sample_n0(rng)
}

/// One-shot form of [`PerfectSampler::sample_path`].
pub fn sample_stationary_path<K: ExcitationKernel>(
    params: &ModelParams<K>,
    eta: &[f64],
    horizon: f64,
    rng: &mut RandomStream,
) -> Result<PathSample> {
    PerfectSampler::new(params, eta)?.sample_path(horizon, rng)
}

/// Acceptance fraction per direction (zero where nothing was proposed).
pub fn acceptance_rates(record: &AcceptanceRecord) -> Vec<f64> {
    record
        .proposed
        .iter()
        .zip(&record.accepted)
        .map(|(&p, &a)| if p == 0 { 0.0 } else { a as f64 / p as f64 })
        .collect()
}

//! Cluster generation and forward (transient) simulation.
//!
//! A cluster is grown breadth-first from its immigrant: every event, taken
//! in FIFO order, draws a Poisson number of children per direction and an
//! i.i.d. birth time for each child. Forward simulation on `[0, T]` grows
//! every cluster with a horizon and drops any child born after `T` together
//! with its (necessarily later) subtree, which leaves the law of the counts
//! on `[0, T]` unchanged.

use std::io::Write;

use rand_distr::Poisson;
use serde::Serialize;

use crate::cluster::{Cluster, Event};
use crate::error::{HawkesError, Result};
use crate::kernel::ExcitationKernel;
use crate::linalg::Matrix;
use crate::model::ModelParams;
use crate::parallel::map_replications;
use crate::path::{format_sig12, AcceptanceRecord, PathSample};
use crate::rng::RandomStream;
use crate::stats::ci95;

pub const DEFAULT_CLUSTER_SIZE_CAP: usize = 10_000_000;

/// Branching law used to grow clusters: Poisson offspring means per
/// (parent direction, child direction) and birth times drawn from the
/// kernel's density tilted by `tilt` (zero for the untilted law).
#[derive(Debug, Clone)]
pub struct EffectiveClusterParams<'a, K> {
    kernel: &'a K,
    offspring_means: Matrix,
    offspring: Vec<Option<Poisson<f64>>>,
    tilt: f64,
    spectral_radius: f64,
    size_cap: usize,
}

impl<'a, K: ExcitationKernel> EffectiveClusterParams<'a, K> {
    pub fn new(kernel: &'a K, offspring_means: Matrix, tilt: f64) -> Result<Self> {
        let d = kernel.dim();
        if offspring_means.dim() != d {
            return Err(HawkesError::DimensionMismatch(format!(
                "offspring matrix is {0}x{0}, kernel has dimension {d}",
                offspring_means.dim()
            )));
        }
        if !(tilt >= 0.0) {
            return Err(HawkesError::InvalidParameter(format!(
                "tilt must be nonnegative, got {tilt}"
            )));
        }
        for i in 0..d {
            for j in 0..d {
                let limit = kernel.tilt_limit(i, j);
                if tilt >= limit {
                    return Err(HawkesError::TiltTooLarge {
                        theta: tilt,
                        limit,
                        from: i,
                        to: j,
                    });
                }
            }
        }
        let spectral_radius = offspring_means.spectral_radius_nonneg();
        if !(spectral_radius < 1.0) {
            return Err(HawkesError::Unstable {
                radius: spectral_radius,
            });
        }
        let offspring = offspring_means
            .iter()
            .map(|&m| {
                if m > 0.0 {
                    Poisson::new(m).map(Some).map_err(|e| {
                        HawkesError::InvalidParameter(format!("offspring mean {m}: {e}"))
                    })
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kernel,
            offspring_means,
            offspring,
            tilt,
            spectral_radius,
            size_cap: DEFAULT_CLUSTER_SIZE_CAP,
        })
    }

    /// The model's own branching law (`hbar`, untilted birth densities).
    pub fn untilted(params: &'a ModelParams<K>) -> Result<Self> {
        Self::new(params.kernel(), params.kernel().branching_matrix(), 0.0)
    }

    pub fn with_size_cap(mut self, cap: usize) -> Self {
        self.size_cap = cap;
        self
    }

    pub fn dim(&self) -> usize {
        self.offspring_means.dim()
    }

    pub fn offspring_means(&self) -> &Matrix {
        &self.offspring_means
    }

    pub fn tilt(&self) -> f64 {
        self.tilt
    }

    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    pub fn size_cap(&self) -> usize {
        self.size_cap
    }

    /// Expected cluster size per immigrant direction: row sums of `(I - M)^-1`.
    pub fn mean_cluster_sizes(&self) -> Result<Vec<f64>> {
        Ok(self.offspring_means.identity_minus().inverse()?.row_sums())
    }

    fn grow(
        &self,
        immigrant_direction: usize,
        tau: f64,
        horizon: Option<f64>,
        rng: &mut RandomStream,
    ) -> Result<Cluster> {
        let d = self.dim();
        let mut events = vec![Event {
            direction: immigrant_direction,
            parent: None,
            time: tau,
            birth: 0.0,
        }];
        let mut latest = tau;
        let mut total_birth = 0.0;
        let mut k = 0;
        while k < events.len() {
            let parent = events[k];
            for j in 0..d {
                let Some(dist) = &self.offspring[parent.direction * d + j] else {
                    continue;
                };
                let children = rng.poisson_from(dist);
                for _ in 0..children {
                    let birth =
                        self.kernel
                            .sample_tilted_birth(parent.direction, j, self.tilt, rng)?;
                    let time = parent.time + birth;
                    if horizon.is_some_and(|h| time > h) {
                        continue;
                    }
                    events.push(Event {
                        direction: j,
                        parent: Some(k),
                        time,
                        birth,
                    });
                    latest = latest.max(time);
                    total_birth += birth;
                    if events.len() > self.size_cap {
                        return Err(HawkesError::ClusterSizeCap { cap: self.size_cap });
                    }
                }
            }
            k += 1;
        }
        Ok(Cluster {
            immigrant_direction,
            tau,
            events,
            length: latest - tau,
            total_birth,
        })
    }
}

/// Grows one complete cluster rooted at an immigrant in `immigrant_direction`
/// arriving at `tau`.
pub fn generate_cluster<K: ExcitationKernel>(
    eff: &EffectiveClusterParams<'_, K>,
    immigrant_direction: usize,
    tau: f64,
    rng: &mut RandomStream,
) -> Result<Cluster> {
    if immigrant_direction >= eff.dim() {
        return Err(HawkesError::DimensionMismatch(format!(
            "direction {immigrant_direction} out of range for dimension {}",
            eff.dim()
        )));
    }
    eff.grow(immigrant_direction, tau, None, rng)
}

/// Same as [`generate_cluster`] but discards children born after `horizon`
/// along with their descendants.
pub fn generate_cluster_until<K: ExcitationKernel>(
    eff: &EffectiveClusterParams<'_, K>,
    immigrant_direction: usize,
    tau: f64,
    horizon: f64,
    rng: &mut RandomStream,
) -> Result<Cluster> {
    if immigrant_direction >= eff.dim() {
        return Err(HawkesError::DimensionMismatch(format!(
            "direction {immigrant_direction} out of range for dimension {}",
            eff.dim()
        )));
    }
    eff.grow(immigrant_direction, tau, Some(horizon), rng)
}

/// Homogeneous Poisson arrivals on `[0, horizon]`: a Poisson count, then
/// sorted uniforms.
pub fn homogeneous_arrivals(rate: f64, horizon: f64, rng: &mut RandomStream) -> Vec<f64> {
    let n = rng.poisson(rate * horizon);
    let mut times: Vec<f64> = (0..n).map(|_| horizon * rng.uniform()).collect();
    times.sort_by(f64::total_cmp);
    times
}

/// Accumulates events of forward clusters (immigrants arriving in `[0, T]`)
/// into per-direction buckets.
pub(crate) fn simulate_forward_into<K: ExcitationKernel>(
    eff: &EffectiveClusterParams<'_, K>,
    lambda0: &[f64],
    horizon: f64,
    times: &mut [Vec<f64>],
    rng: &mut RandomStream,
) -> Result<u64> {
    let mut generated = 0;
    for (i, &rate) in lambda0.iter().enumerate() {
        for tau in homogeneous_arrivals(rate, horizon, rng) {
            let cluster = eff.grow(i, tau, Some(horizon), rng)?;
            generated += cluster.size() as u64;
            for e in &cluster.events {
                times[e.direction].push(e.time);
            }
        }
    }
    Ok(generated)
}

/// Simulates the process started empty at time 0 (no pre-zero history) on
/// `[0, horizon]`.
pub fn simulate_forward<K: ExcitationKernel>(
    params: &ModelParams<K>,
    horizon: f64,
    rng: &mut RandomStream,
) -> Result<PathSample> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(HawkesError::InvalidParameter(format!(
            "horizon must be positive and finite, got {horizon}"
        )));
    }
    let eff = EffectiveClusterParams::untilted(params)?;
    let start = rng.draws();
    let mut times = vec![Vec::new(); params.dim()];
    let forward_events = simulate_forward_into(&eff, params.lambda0(), horizon, &mut times, rng)?;
    for ts in &mut times {
        ts.sort_by(f64::total_cmp);
    }
    Ok(PathSample {
        horizon,
        times,
        record: AcceptanceRecord::new(params.dim()),
        forward_events,
        primitive_draws: rng.draws() - start,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowRow {
    pub t_start: f64,
    /// One-based direction.
    pub direction: usize,
    /// Mean count per unit time over the window.
    pub mean: f64,
    pub ci_halfwidth: f64,
}

/// Per-window, per-direction intensity estimates from forward simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowTable {
    pub window: f64,
    pub reps: u64,
    pub rows: Vec<WindowRow>,
    /// Mean number of forward-cluster events generated per replication.
    pub events_mean: f64,
    /// Mean number of primitive draws per replication.
    pub primitive_mean: f64,
}

impl WindowTable {
    pub fn row(&self, t_start: f64, direction: usize) -> Option<&WindowRow> {
        self.rows
            .iter()
            .find(|r| r.direction == direction && (r.t_start - t_start).abs() < 1e-9)
    }

    /// `t_start,direction,mean,ci_halfwidth` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t_start,direction,mean,ci_halfwidth")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{}",
                format_sig12(r.t_start),
                r.direction,
                format_sig12(r.mean),
                format_sig12(r.ci_halfwidth)
            )?;
        }
        Ok(())
    }
}

/// Runs `reps` forward simulations on `[0, horizon]` and estimates the
/// intensity on each window `(t, t + window]`. Replication `r` uses stream
/// `(seed, r)`.
pub fn naive_transient_estimate<K: ExcitationKernel>(
    params: &ModelParams<K>,
    horizon: f64,
    window: f64,
    reps: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<WindowTable> {
    if !(window > 0.0) || !(horizon > 0.0) {
        return Err(HawkesError::InvalidParameter(
            "horizon and window must be positive".into(),
        ));
    }
    let n_windows = (horizon / window).round();
    if n_windows < 1.0 || (n_windows * window - horizon).abs() > 1e-9 * horizon {
        return Err(HawkesError::InvalidParameter(format!(
            "window {window} does not divide horizon {horizon}"
        )));
    }
    if reps == 0 {
        return Err(HawkesError::InvalidParameter(
            "reps must be at least 1".into(),
        ));
    }
    let n_windows = n_windows as usize;
    let d = params.dim();
    let eff = EffectiveClusterParams::untilted(params)?;
    let per_rep = map_replications(reps, threads, |rep| {
        let mut rng = RandomStream::for_replication(seed, rep);
        let mut times = vec![Vec::new(); d];
        let events = simulate_forward_into(&eff, params.lambda0(), horizon, &mut times, &mut rng)?;
        for ts in &mut times {
            ts.sort_by(f64::total_cmp);
        }
        let path = PathSample {
            horizon,
            times,
            record: AcceptanceRecord::default(),
            forward_events: events,
            primitive_draws: rng.draws(),
        };
        let counts: Vec<Vec<usize>> = (0..n_windows)
            .map(|w| path.counts_in(w as f64 * window, (w + 1) as f64 * window))
            .collect();
        Ok((counts, events, path.primitive_draws))
    })?;

    let mut rows = Vec::with_capacity(n_windows * d);
    for w in 0..n_windows {
        for j in 0..d {
            let rates: Vec<f64> = per_rep
                .iter()
                .map(|(c, _, _)| c[w][j] as f64 / window)
                .collect();
            let ci = ci95(&rates)?;
            rows.push(WindowRow {
                t_start: w as f64 * window,
                direction: j + 1,
                mean: ci.mean,
                ci_halfwidth: ci.halfwidth,
            });
        }
    }
    let n = reps as f64;
    Ok(WindowTable {
        window,
        reps,
        rows,
        events_mean: per_rep.iter().map(|(_, e, _)| *e as f64).sum::<f64>() / n,
        primitive_mean: per_rep.iter().map(|(_, _, p)| *p as f64).sum::<f64>() / n,
    })
}

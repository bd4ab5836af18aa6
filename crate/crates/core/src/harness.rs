//! Replication orchestration, summaries and the benchmark reproductions.

use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::branching::{naive_transient_estimate, WindowTable};
use crate::error::{HawkesError, Result};
use crate::kernel::ExcitationKernel;
use crate::model::ModelParams;
use crate::optimize::optimize_eta;
use crate::parallel::map_replications;
use crate::path::{format_sig12, AcceptanceRecord, PathSample};
use crate::perfect::{acceptance_rates, PerfectSampler};
use crate::rng::RandomStream;
use crate::stats::{ci95, Ci95};
use crate::tilt::complexity_x;

/// Bracket width used when the tilt is chosen automatically.
pub const AUTO_ETA_TOL: f64 = 1e-6;

/// Tilt grid of the symmetric two-direction benchmark.
pub const TABLE1_ETAS: [f64; 6] = [0.03, 0.05, 0.06, 0.07, 0.08, 0.09];

/// Window `(start, end]` used for the burned-in forward estimate.
pub const NAIVE_WINDOW: (f64, f64) = (6.0, 7.0);

#[derive(Debug, Clone, PartialEq)]
pub enum EtaChoice {
    /// Minimize the complexity function.
    Auto,
    /// One value per direction, or a single value for all directions.
    Fixed(Vec<f64>),
}

impl EtaChoice {
    pub fn resolve<K: ExcitationKernel>(&self, params: &ModelParams<K>) -> Result<Vec<f64>> {
        match self {
            EtaChoice::Auto => Ok(optimize_eta(params, AUTO_ETA_TOL)?.eta_star),
            EtaChoice::Fixed(v) if v.len() == 1 => Ok(vec![v[0]; params.dim()]),
            EtaChoice::Fixed(v) if v.len() == params.dim() => Ok(v.clone()),
            EtaChoice::Fixed(v) => Err(HawkesError::DimensionMismatch(format!(
                "eta has {} entries, model has dimension {}",
                v.len(),
                params.dim()
            ))),
        }
    }
}

impl FromStr for EtaChoice {
    type Err = HawkesError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(EtaChoice::Auto);
        }
        s.split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| HawkesError::Config(format!("bad eta value {v:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(EtaChoice::Fixed)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub horizon: f64,
    pub reps: u64,
    pub eta: EtaChoice,
    pub seed: u64,
    /// Worker count; `None` defers to `HAWKES_THREADS`, then rayon's default.
    pub threads: Option<usize>,
    /// Retain every path in the output (needed for the events CSV).
    pub keep_paths: bool,
}

impl RunConfig {
    pub fn new(horizon: f64, reps: u64, eta: EtaChoice, seed: u64) -> Self {
        Self {
            horizon,
            reps,
            eta,
            seed,
            threads: None,
            keep_paths: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(HawkesError::Config("reps must be at least 1".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(HawkesError::Config(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryStats {
    /// Mean event count on `[0, horizon]` per direction.
    pub per_direction_mean: Vec<f64>,
    pub ci95_halfwidth: Vec<f64>,
    /// Mean cost of the pre-zero stage: cluster events plus one uniform per proposal.
    pub rvs_mean: f64,
    /// Complexity function at the tilt used.
    pub rvs_theoretical: f64,
    pub acceptance_rate: Vec<f64>,
    pub wall_time_s: f64,
    /// True when `reps == 1` and the halfwidths are reported as zero.
    pub ci_degenerate: bool,
    pub rvs_primitive_mean: f64,
    pub forward_events_mean: f64,
    pub eta: Vec<f64>,
    pub horizon: f64,
    pub reps: u64,
    pub seed: u64,
}

impl SummaryStats {
    pub fn ci(&self, direction: usize) -> Ci95 {
        Ci95 {
            mean: self.per_direction_mean[direction],
            halfwidth: self.ci95_halfwidth[direction],
            degenerate: self.ci_degenerate,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone)]
pub struct ReplicationOutput {
    pub summary: SummaryStats,
    /// Paths in replication order; empty unless `keep_paths` was set.
    pub paths: Vec<PathSample>,
}

impl ReplicationOutput {
    pub fn write_events_csv<W: Write>(&self, out: W) -> Result<()> {
        crate::path::write_events_csv(
            out,
            self.paths.iter().enumerate().map(|(r, p)| (r as u64, p)),
        )
    }
}

struct RepResult {
    counts: Vec<usize>,
    record: AcceptanceRecord,
    primitive: u64,
    forward: u64,
    path: Option<PathSample>,
}

/// Runs `config.reps` independent stationary paths. Replication `r` draws from
/// stream `(seed, r)` and results are reduced in replication order, so the
/// output does not depend on the worker count.
pub fn run_replications<K: ExcitationKernel>(
    params: &ModelParams<K>,
    config: &RunConfig,
) -> Result<ReplicationOutput> {
    config.validate()?;
    let eta = config.eta.resolve(params)?;
    let sampler = PerfectSampler::new(params, &eta)?;
    let rvs_theoretical = complexity_x(params, &eta)?;
    let started = Instant::now();
    let results = map_replications(config.reps, config.threads, |rep| {
        let mut rng = RandomStream::for_replication(config.seed, rep);
        let path = sampler.sample_path(config.horizon, &mut rng)?;
        Ok(RepResult {
            counts: path.counts(),
            record: path.record.clone(),
            primitive: path.primitive_draws,
            forward: path.forward_events,
            path: config.keep_paths.then_some(path),
        })
    })?;
    let wall_time_s = started.elapsed().as_secs_f64();

    let d = params.dim();
    let n = config.reps as f64;
    let mut total = AcceptanceRecord::new(d);
    for r in &results {
        total.merge(&r.record);
    }
    let cis = (0..d)
        .map(|j| {
            ci95(
                &results
                    .iter()
                    .map(|r| r.counts[j] as f64)
                    .collect::<Vec<_>>(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = SummaryStats {
        per_direction_mean: cis.iter().map(|c| c.mean).collect(),
        ci95_halfwidth: cis.iter().map(|c| c.halfwidth).collect(),
        rvs_mean: total.rvs() as f64 / n,
        rvs_theoretical,
        acceptance_rate: acceptance_rates(&total),
        wall_time_s,
        ci_degenerate: cis.iter().any(|c| c.degenerate),
        rvs_primitive_mean: results.iter().map(|r| r.primitive as f64).sum::<f64>() / n,
        forward_events_mean: results.iter().map(|r| r.forward as f64).sum::<f64>() / n,
        eta,
        horizon: config.horizon,
        reps: config.reps,
        seed: config.seed,
    };
    let paths = results.into_iter().filter_map(|r| r.path).collect();
    Ok(ReplicationOutput { summary, paths })
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Row {
    pub eta: f64,
    pub ci: Vec<Ci95>,
    pub rvs_mean: f64,
    pub rvs_theoretical: f64,
    pub wall_time_s: f64,
}

/// Perfect sampling on `[0, 1]` at each tilt in `etas` (same tilt in every
/// direction). Row `k` uses master seed `seed + k`.
pub fn reproduce_table1<K: ExcitationKernel>(
    params: &ModelParams<K>,
    etas: &[f64],
    reps: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<Table1Row>> {
    etas.iter()
        .enumerate()
        .map(|(k, &eta)| {
            let mut config = RunConfig::new(
                1.0,
                reps,
                EtaChoice::Fixed(vec![eta]),
                seed.wrapping_add(k as u64),
            );
            config.threads = threads;
            let s = run_replications(params, &config)?.summary;
            Ok(Table1Row {
                eta,
                ci: (0..params.dim()).map(|j| s.ci(j)).collect(),
                rvs_mean: s.rvs_mean,
                rvs_theoretical: s.rvs_theoretical,
                wall_time_s: s.wall_time_s,
            })
        })
        .collect()
}

/// `eta,mean_1,ci_1,...,mean_d,ci_d,rvs,rvs_theoretical,wall_time_s`.
pub fn write_table1_csv<W: Write>(rows: &[Table1Row], mut out: W) -> Result<()> {
    let d = rows.first().map_or(0, |r| r.ci.len());
    let mut header = vec!["eta".to_string()];
    for j in 1..=d {
        header.push(format!("mean_{j}"));
        header.push(format!("ci_{j}"));
    }
    header.extend(["rvs", "rvs_theoretical", "wall_time_s"].map(String::from));
    writeln!(out, "{}", header.join(","))?;
    for r in rows {
        let mut cells = vec![format_sig12(r.eta)];
        for c in &r.ci {
            cells.push(format_sig12(c.mean));
            cells.push(format_sig12(c.halfwidth));
        }
        cells.push(format_sig12(r.rvs_mean));
        cells.push(format_sig12(r.rvs_theoretical));
        cells.push(format_sig12(r.wall_time_s));
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodRow {
    pub method: String,
    pub ci: Vec<Ci95>,
    pub rvs_mean: f64,
    pub rvs_theoretical: Option<f64>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table2 {
    pub eta_star: Vec<f64>,
    pub perfect: MethodRow,
    pub naive: MethodRow,
}

/// Perfect sampling on `[0, 1]` at the optimal tilt against forward
/// simulation counted on the window [`NAIVE_WINDOW`]. For the naive row the
/// cost is the mean number of events generated per replication.
pub fn reproduce_table2<K: ExcitationKernel>(
    params: &ModelParams<K>,
    reps: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<Table2> {
    let eta_star = optimize_eta(params, AUTO_ETA_TOL)?.eta_star;
    let mut config = RunConfig::new(1.0, reps, EtaChoice::Fixed(eta_star.clone()), seed);
    config.threads = threads;
    let s = run_replications(params, &config)?.summary;
    let perfect = MethodRow {
        method: "perfect".into(),
        ci: (0..params.dim()).map(|j| s.ci(j)).collect(),
        rvs_mean: s.rvs_mean,
        rvs_theoretical: Some(s.rvs_theoretical),
        wall_time_s: s.wall_time_s,
    };

    let (start, end) = NAIVE_WINDOW;
    let started = Instant::now();
    let table = naive_transient_estimate(
        params,
        end,
        end - start,
        reps,
        seed.wrapping_add(1),
        threads,
    )?;
    let wall_time_s = started.elapsed().as_secs_f64();
    let ci = (1..=params.dim())
        .map(|j| {
            let row = table.row(start, j).expect("window row present");
            Ci95 {
                mean: row.mean,
                halfwidth: row.ci_halfwidth,
                degenerate: reps == 1,
            }
        })
        .collect();
    let naive = MethodRow {
        method: "naive".into(),
        ci,
        rvs_mean: table.events_mean,
        rvs_theoretical: None,
        wall_time_s,
    };
    Ok(Table2 {
        eta_star,
        perfect,
        naive,
    })
}

/// `method,direction,mean,ci_halfwidth,rvs,rvs_theoretical,wall_time_s`.
pub fn write_table2_csv<W: Write>(table: &Table2, mut out: W) -> Result<()> {
    writeln!(
        out,
        "method,direction,mean,ci_halfwidth,rvs,rvs_theoretical,wall_time_s"
    )?;
    for row in [&table.perfect, &table.naive] {
        for (j, c) in row.ci.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                row.method,
                j + 1,
                format_sig12(c.mean),
                format_sig12(c.halfwidth),
                format_sig12(row.rvs_mean),
                row.rvs_theoretical.map(format_sig12).unwrap_or_default(),
                format_sig12(row.wall_time_s)
            )?;
        }
    }
    Ok(())
}

/// Forward-simulation intensity estimates on unit windows over `[0, horizon]`.
pub fn reproduce_figure1<K: ExcitationKernel>(
    params: &ModelParams<K>,
    horizon: f64,
    reps: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<WindowTable> {
    naive_transient_estimate(params, horizon, 1.0, reps, seed, threads)
}

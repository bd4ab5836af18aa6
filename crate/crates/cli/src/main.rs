use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use hawkes_core::harness::{self, TABLE1_ETAS};
use hawkes_core::{
    complexity_x, naive_transient_estimate, optimize_eta, presets, solve_psi_b, validate_model,
    EtaChoice, HawkesError, ModelParams, RunConfig,
};
use serde_json::json;

/// Exact stationary sampling of multivariate Hawkes processes.
#[derive(Parser)]
#[command(name = "hawkes", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check positivity and stability of a model.
    Validate(ConfigArg),
    /// Solve the total-birth-time c.g.f. system at one tilt.
    Cgf {
        #[command(flatten)]
        model: ConfigArg,
        #[arg(long)]
        theta: f64,
    },
    /// Find the tilt vector minimizing the expected sampling cost.
    OptimizeEta {
        #[command(flatten)]
        model: ConfigArg,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Draw stationary paths with the perfect sampler.
    Sample {
        #[command(flatten)]
        model: ConfigArg,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 10_000)]
        reps: u64,
        /// `auto`, a single value, or one comma-separated value per direction.
        #[arg(long, default_value = "auto")]
        eta: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Events CSV (`rep_id,direction,time`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Summary JSON; printed to stdout when omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[command(flatten)]
        threads: ThreadsArg,
    },
    /// Forward simulation from an empty history, estimated per time window.
    Naive {
        #[command(flatten)]
        model: ConfigArg,
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1.0)]
        window: f64,
        #[arg(long, default_value_t = 10_000)]
        reps: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        threads: ThreadsArg,
    },
    /// Perfect sampling across a tilt grid (defaults to the bundled 2-d model).
    ReproduceTable1(ReproduceArgs),
    /// Perfect sampling at the optimal tilt against burned-in forward
    /// simulation (defaults to the bundled 5-d model).
    ReproduceTable2(ReproduceArgs),
    /// Windowed forward-simulation estimates over [0, 10] (defaults to the
    /// bundled 5-d model).
    ReproduceFigure1 {
        #[command(flatten)]
        args: ReproduceArgs,
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
    },
}

#[derive(Args)]
struct ConfigArg {
    /// Model JSON file.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct ThreadsArg {
    /// Worker count (overrides HAWKES_THREADS).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Model JSON file; the bundled benchmark model when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    reps: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    threads: ThreadsArg,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_UNSTABLE: u8 = 4;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<HawkesError>() {
        Some(HawkesError::TiltTooLarge { .. } | HawkesError::Infeasible { .. }) => EXIT_INFEASIBLE,
        Some(HawkesError::Unstable { .. }) => EXIT_UNSTABLE,
        Some(
            HawkesError::Config(_)
            | HawkesError::DimensionMismatch(_)
            | HawkesError::InvalidParameter(_)
            | HawkesError::Io(_)
            | HawkesError::Json(_),
        ) => EXIT_CONFIG,
        _ => 1,
    }
}

fn load(path: &Path) -> hawkes_core::Result<ModelParams> {
    ModelParams::from_path(path)
}

fn open_output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p)
                .map_err(HawkesError::from)
                .with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json(value: &serde_json::Value) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Validate(ConfigArg { config }) => {
            let model = load(&config)?;
            let report = hawkes_core::model::validation_report(&model);
            print_json(&serde_json::to_value(&report)?)?;
            validate_model(&model)?;
        }
        Command::Cgf { model, theta } => {
            let model = load(&model.config)?;
            validate_model(&model)?;
            let sol = solve_psi_b(&model, theta)?;
            let x = if sol.feasible && theta > 0.0 {
                Some(complexity_x(&model, &vec![theta; model.dim()])?)
            } else {
                None
            };
            print_json(&json!({
                "theta": theta,
                "feasible": sol.feasible,
                "psi_B": sol.psi_b,
                "h_tilde": sol.h_tilde,
                "s_tilde_rowsums": sol.s_tilde_rowsums,
                "X": x,
                "spectral_radius": sol.spectral_radius,
                "iterations": sol.iterations,
                "residual": sol.residual,
            }))?;
            if !sol.feasible {
                return Err(HawkesError::Infeasible {
                    eta: theta,
                    reason: sol.infeasibility.unwrap_or_default(),
                }
                .into());
            }
        }
        Command::OptimizeEta { model, tol } => {
            let model = load(&model.config)?;
            let opt = optimize_eta(&model, tol)?;
            print_json(&serde_json::to_value(&opt)?)?;
        }
        Command::Sample {
            model,
            horizon,
            reps,
            eta,
            seed,
            out,
            summary,
            threads,
        } => {
            let model = load(&model.config)?;
            let mut config = RunConfig::new(horizon, reps, eta.parse::<EtaChoice>()?, seed);
            config.threads = threads.threads;
            config.keep_paths = out.is_some();
            let result = harness::run_replications(&model, &config)?;
            if let Some(path) = &out {
                let mut w = open_output(Some(path))?;
                result.write_events_csv(&mut w)?;
                w.flush()?;
            }
            let text = result.summary.to_json()?;
            match &summary {
                Some(path) => std::fs::write(path, text + "\n")
                    .map_err(HawkesError::from)
                    .with_context(|| format!("cannot write {}", path.display()))?,
                None => println!("{text}"),
            }
        }
        Command::Naive {
            model,
            horizon,
            window,
            reps,
            seed,
            out,
            threads,
        } => {
            let model = load(&model.config)?;
            let table =
                naive_transient_estimate(&model, horizon, window, reps, seed, threads.threads)?;
            let mut w = open_output(out.as_deref())?;
            table.write_csv(&mut w)?;
            w.flush()?;
        }
        Command::ReproduceTable1(args) => {
            let model = match &args.config {
                Some(p) => load(p)?,
                None => presets::symmetric_2d(),
            };
            let rows = harness::reproduce_table1(
                &model,
                &TABLE1_ETAS,
                args.reps,
                args.seed,
                args.threads.threads,
            )?;
            let mut w = open_output(args.out.as_deref())?;
            harness::write_table1_csv(&rows, &mut w)?;
            w.flush()?;
        }
        Command::ReproduceTable2(args) => {
            let model = match &args.config {
                Some(p) => load(p)?,
                None => presets::asymmetric_5d(),
            };
            let table =
                harness::reproduce_table2(&model, args.reps, args.seed, args.threads.threads)?;
            let mut w = open_output(args.out.as_deref())?;
            harness::write_table2_csv(&table, &mut w)?;
            w.flush()?;
        }
        Command::ReproduceFigure1 { args, horizon } => {
            let model = match &args.config {
                Some(p) => load(p)?,
                None => presets::asymmetric_5d(),
            };
            let table = harness::reproduce_figure1(
                &model,
                horizon,
                args.reps,
                args.seed,
                args.threads.threads,
            )?;
            let mut w = open_output(args.out.as_deref())?;
            table.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

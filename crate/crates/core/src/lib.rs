//! Exact simulation of stationary multivariate Hawkes processes.
//!
//! A Hawkes process is a superposition of independent clusters, each a
//! branching process rooted at a background ("immigrant") event. The
//! stationary process on `[0, T]` is produced without burn-in by combining
//! forward simulation of clusters born in `[0, T]` with an exact
//! importance-sampling/acceptance-rejection sampler for clusters born before
//! time 0 that are still active at time 0. The expected cost of that sampler
//! is available in closed form and is minimized over the tilt parameters.
//!
//! ```
//! use hawkes_core::{presets, optimize_eta, PerfectSampler, RandomStream};
//!
//! let model = presets::symmetric_2d();
//! let eta = optimize_eta(&model, 1e-4).unwrap().eta_star;
//! let sampler = PerfectSampler::new(&model, &eta).unwrap();
//! let path = sampler.sample_path(1.0, &mut RandomStream::new(42)).unwrap();
//! assert_eq!(path.times.len(), 2);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod branching;
pub mod cluster;
pub mod error;
pub mod harness;
pub mod kernel;
pub mod linalg;
pub mod model;
pub mod optimize;
pub mod parallel;
pub mod path;
pub mod perfect;
pub mod presets;
pub mod rng;
pub mod stats;
pub mod tilt;

pub use branching::{
    generate_cluster, generate_cluster_until, naive_transient_estimate, simulate_forward,
    EffectiveClusterParams, WindowRow, WindowTable,
};
pub use cluster::{Cluster, Event};
pub use error::{HawkesError, Result};
pub use harness::{
    reproduce_figure1, reproduce_table1, reproduce_table2, run_replications, EtaChoice,
    ReplicationOutput, RunConfig, SummaryStats,
};
pub use kernel::{ExcitationKernel, ExponentialKernel};
pub use linalg::Matrix;
pub use model::{
    hbar, psi_f, sample_tilted_birth, stationary_intensity, validate_model, ModelConfig,
    ModelParams, ValidationReport,
};
pub use optimize::{golden_section, optimize_eta, EtaOptimum};
pub use path::{AcceptanceRecord, PathSample};
pub use perfect::{sample_cluster_arrivals, sample_n0, sample_stationary_path, PerfectSampler};
pub use rng::RandomStream;
pub use stats::{ci95, Ci95};
pub use tilt::{
    complexity_term, complexity_x, solve_psi_b, theta0_upper, tilted_cluster_params, TiltCache,
    TiltSolution,
};

//! Replication fan-out.

use rayon::prelude::*;

use crate::error::{HawkesError, Result};

/// Environment variable that overrides the worker count.
pub const THREADS_ENV: &str = "HAWKES_THREADS";

/// Worker count: explicit request, else `HAWKES_THREADS`, else rayon's default.
pub fn worker_count(requested: Option<usize>) -> Option<usize> {
    requested.filter(|n| *n > 0).or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|n| *n > 0)
    })
}

/// Runs `job(rep)` for `rep in 0..reps` on a dedicated pool and returns the
/// results in replication order.
pub fn map_replications<T, F>(reps: u64, threads: Option<usize>, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count(threads) {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| HawkesError::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..reps).into_par_iter().map(&job).collect())
}

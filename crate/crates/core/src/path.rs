//! Sample paths, cost instrumentation and their CSV encoding.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

/// Proposal/acceptance counts and variate accounting for the pre-zero
/// cluster stage of a perfect-sampling run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AcceptanceRecord {
    /// Proposed clusters per immigrant direction.
    pub proposed: Vec<u64>,
    /// Accepted clusters per immigrant direction.
    pub accepted: Vec<u64>,
    /// Events generated across all proposed clusters, rejected ones included.
    pub rv_count_events: u64,
    /// One acceptance uniform per proposed cluster.
    pub rv_count_uniforms: u64,
    /// Every primitive draw (Poisson counts, exponentials, uniforms).
    pub rv_count_primitive: u64,
}

impl AcceptanceRecord {
    pub fn new(dim: usize) -> Self {
        Self {
            proposed: vec![0; dim],
            accepted: vec![0; dim],
            ..Self::default()
        }
    }

    /// The cost measure whose expectation is the complexity function:
    /// cluster events plus one uniform per proposal.
    pub fn rvs(&self) -> u64 {
        self.rv_count_events + self.rv_count_uniforms
    }

    pub fn merge(&mut self, other: &Self) {
        if self.proposed.len() < other.proposed.len() {
            self.proposed.resize(other.proposed.len(), 0);
            self.accepted.resize(other.accepted.len(), 0);
        }
        for (a, b) in self.proposed.iter_mut().zip(&other.proposed) {
            *a += b;
        }
        for (a, b) in self.accepted.iter_mut().zip(&other.accepted) {
            *a += b;
        }
        self.rv_count_events += other.rv_count_events;
        self.rv_count_uniforms += other.rv_count_uniforms;
        self.rv_count_primitive += other.rv_count_primitive;
    }
}

/// Event times on `[0, horizon]`, sorted per direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSample {
    pub horizon: f64,
    pub times: Vec<Vec<f64>>,
    /// Pre-zero cluster stage; all zeros for forward-only simulation.
    pub record: AcceptanceRecord,
    /// Events generated by clusters whose immigrants arrive in `[0, horizon]`.
    pub forward_events: u64,
    /// Primitive draws over the whole run.
    pub primitive_draws: u64,
}

impl PathSample {
    pub fn dim(&self) -> usize {
        self.times.len()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.times.iter().map(Vec::len).collect()
    }

    /// Per-direction event counts in the window `(start, end]`.
    pub fn counts_in(&self, start: f64, end: f64) -> Vec<usize> {
        self.times
            .iter()
            .map(|ts| ts.partition_point(|t| *t <= end) - ts.partition_point(|t| *t <= start))
            .collect()
    }
}

/// Formats with 12 significant digits in positional notation.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Writes `rep_id,direction,time` rows (direction 1-based), replications in
/// order and, within each, directions in order with ascending times.
pub fn write_events_csv<'a, W: Write>(
    mut out: W,
    paths: impl IntoIterator<Item = (u64, &'a PathSample)>,
) -> Result<()> {
    writeln!(out, "rep_id,direction,time")?;
    for (rep, path) in paths {
        for (dir, times) in path.times.iter().enumerate() {
            for t in times {
                writeln!(out, "{rep},{},{}", dir + 1, format_sig12(*t))?;
            }
        }
    }
    Ok(())
}

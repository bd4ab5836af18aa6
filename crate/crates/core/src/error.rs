use thiserror::Error;

/// Errors raised by model validation, tilting, simulation and the harness.
#[derive(Debug, Error)]
pub enum HawkesError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "model is unstable: spectral radius of the branching matrix is {radius} (must be < 1)"
    )]
    Unstable { radius: f64 },

    #[error("tilt {theta} is not below the kernel's integrability limit {limit} for pair ({from}, {to})")]
    TiltTooLarge {
        theta: f64,
        limit: f64,
        from: usize,
        to: usize,
    },

    #[error("tilt {eta} is infeasible: {reason}")]
    Infeasible { eta: f64, reason: String },

    #[error("cluster exceeded the size cap of {cap} events; the branching matrix is likely near-critical")]
    ClusterSizeCap { cap: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = HawkesError> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("metric undefined: {0}")]
    MetricUndefined(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("empty neighborhood at point {point}")]
    EmptyNeighborhood { point: usize },

    #[error("legendre supremum not attained inside the grid for u = {u} (maximizer at v_max)")]
    DomainTruncation { u: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("entropy undefined: integral of h vanishes")]
    UndefinedEntropy,

    #[error("absolute continuity violated at point {point}: target mass {mass} where reference mass is 0")]
    AbsoluteContinuity { point: usize, mass: f64 },

    #[error("transport certification failed: duality gap {gap:e} exceeds {limit:e}")]
    CertificationFailure { gap: f64, limit: f64 },

    #[error("no information: {0}")]
    NoInformation(String),

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

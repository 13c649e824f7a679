use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("matrix is not symmetric: entry ({row}, {col}) = {value} but ({col}, {row}) = {mirror}")]
    Asymmetric {
        row: usize,
        col: usize,
        value: f64,
        mirror: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("kernel is not metrizable by this construction: {0}")]
    NonMetrizable(String),

    #[error("vertex {0} has zero total affinity")]
    DegenerateVertex(usize),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {residual:e})")]
    NotConverged { sweeps: usize, residual: f64 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of numerical routines rather than of the caller's input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NotConverged { .. } | Error::Internal(_))
    }
}

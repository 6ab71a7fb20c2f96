use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("index {index} out of range for a space of {cardinality} elements")]
    IndexOutOfRange { index: usize, cardinality: usize },

    #[error("vector {values:?} lies outside the space bounds")]
    OutOfBounds { values: Vec<i64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid cost function: {0}")]
    InvalidCost(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("request space is unbounded: request_max must be set")]
    UnboundedRequests,

    #[error("brute-force oracle refused: {plans} candidate plans exceed the limit of {limit}")]
    OracleLimit { plans: u128, limit: u128 },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Runtime(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether this error stems from bad input (config, parameters) rather than
    /// a failure while running.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::Csv(_) | Error::Runtime(_))
    }
}

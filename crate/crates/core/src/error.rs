//! Crate-wide error type.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by library operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An iterative solver exhausted its iteration budget. Carries the last
    /// iterate so callers can inspect or resume.
    #[error("{what} did not converge after {iterations} iterations")]
    Convergence {
        what: &'static str,
        iterations: usize,
        last_iterate: Vec<f64>,
    },

    /// A least-squares system is singular or too ill-conditioned to solve.
    #[error("rank-deficient system: condition number {condition:.3e} exceeds bound {bound:.3e}")]
    RankDeficient { condition: f64, bound: f64 },

    /// An encoded summary exceeded its uplink size budget.
    #[error("summary overflow: encoded {encoded} bytes exceeds budget {budget} bytes")]
    SummaryOverflow { encoded: usize, budget: usize },

    /// Scenario or configuration validation failed; lists every violation.
    #[error("validation failed:\n{}", .0.join("\n"))]
    Validation(Vec<String>),

    /// A byte stream did not decode as the expected wire format.
    #[error("malformed encoding: {0}")]
    Format(String),

    /// Filesystem error while reading or writing artifacts.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

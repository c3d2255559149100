//! Error types shared by the solver, circuit and response layers.

use thiserror::Error;

/// Failure of a dense linear solve.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("singular matrix (pivot modulus {pivot:e} below threshold {threshold:e})")]
    SingularMatrix { pivot: f64, threshold: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input outside the domain of the operation.
    #[error("{0}")]
    Domain(String),
    /// An intermediate quantity overflowed or became NaN.
    #[error("{0}")]
    NonFinite(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    /// A solve that failed at a specific point of a frequency sweep.
    #[error("{source} at {frequency} Hz")]
    SolveAt { frequency: f64, source: SolveError },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

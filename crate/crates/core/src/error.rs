//! Error type shared by the whole laboratory.

use thiserror::Error;

/// Failure modes surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller passed an index, shape or flag outside the documented domain.
    #[error("argument error: {0}")]
    Argument(String),

    /// A matrix violates a structural requirement (shape, block pattern, ...).
    #[error("structure error: {0}")]
    Structure(String),

    /// Chain parameters violate a validity condition (degenerate η, resonant ξ, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Requested computation exceeds the configured size guards.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// A coefficient or function was evaluated at (or too close to) a pole.
    #[error("evaluation error: {0}")]
    Evaluation(String),

    /// A covector/basis construction failed its non-degeneracy certificate.
    #[error("basis error: {0}")]
    Basis(String),

    /// Missing or inconsistent configuration data.
    #[error("configuration error: {0}")]
    Config(String),

    /// Quantities that must agree do not; usually signals bad input data.
    #[error("inconsistency error: {0}")]
    Inconsistent(String),

    /// An iterative solver exhausted its budget before reaching the expected count.
    #[error("incomplete result: {0}")]
    Incomplete(String),

    /// Backend linear-algebra failure.
    #[error("linear algebra error: {0}")]
    LinAlg(#[from] ndarray_linalg::error::LinalgError),
}

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

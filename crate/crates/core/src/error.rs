//! Error types shared across the crate.

use thiserror::Error;

/// Failure modes of constructions, evaluations and verification runs.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter set violates a precondition of the construction
    /// (e.g. the shift `c` exceeds the admissible range for the kind).
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    /// A quadrature or series evaluation exhausted its budget before
    /// reaching the requested tolerance.
    #[error("did not converge: {0}")]
    NonConvergence(String),

    /// The requested point or parameter lies outside the domain of the
    /// operation (poles, jump points, invalid exponents).
    #[error("domain error: {0}")]
    DomainError(String),

    /// The computation would overflow binary64.
    #[error("overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn constraint(msg: impl Into<String>) -> Self {
        Error::ConstraintViolation(msg.into())
    }
    pub fn non_convergence(msg: impl Into<String>) -> Self {
        Error::NonConvergence(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::DomainError(msg.into())
    }
    pub fn overflow(msg: impl Into<String>) -> Self {
        Error::Overflow(msg.into())
    }
}

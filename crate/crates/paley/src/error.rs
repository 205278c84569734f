//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by grid construction, spectral operations, and experiment
/// drivers.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its documented constraint. The message names the
    /// failed inequality.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input data is malformed (wrong length, non-finite entries, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two operands live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A spectral-support precondition failed.
    #[error("support violation: {0}")]
    SupportViolation(String),

    /// A ratio or slope is undefined because the field is identically zero.
    #[error("undefined for the zero field: {0}")]
    ZeroField(String),

    /// Not enough bands or samples to perform the requested fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A manufactured solution would divide by a (near-)vanishing field.
    #[error("degenerate solution: {0}")]
    DegenerateSolution(String),

    /// A constant fit has a zero denominator against a nonzero numerator.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// An iterative solver failed to converge within its budget.
    #[error("iteration limit: {0}")]
    IterationLimit(String),

    /// A numerical identity that should hold by construction failed.
    #[error("numerical invariant violated: {0}")]
    Numerical(String),

    /// A documented precondition of an operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed report or config: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

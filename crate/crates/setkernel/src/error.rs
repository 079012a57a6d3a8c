//! Crate-wide error type.

use thiserror::Error;

use crate::ocsvm::DualSolution;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Two vectors (or collections of vectors) disagree on dimension.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// An input coordinate was NaN or infinite.
    #[error("non-finite input")]
    NonFiniteInput,

    /// A sample set must contain at least one point.
    #[error("empty set")]
    EmptySet,

    /// Not enough data for the requested operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// All pairwise distances are zero, so no bandwidth can be derived.
    #[error("degenerate bandwidth: median pairwise distance is zero")]
    DegenerateBandwidth,

    /// The box and simplex constraints of the one-class SVM dual admit no
    /// feasible point for this (nu, subset count) combination.
    #[error("infeasible nu: nu={nu}, subset_count={subset_count} (need 0 < nu <= 1 and nu * subset_count >= 1)")]
    InfeasibleNu { nu: f64, subset_count: usize },

    /// The dual solver hit its iteration budget; `best` carries the last
    /// (feasible) iterate so callers can inspect how close it got.
    #[error(
        "solver did not converge after {iterations} iterations (KKT violation {violation:.3e})"
    )]
    SolverDidNotConverge {
        iterations: usize,
        violation: f64,
        best: Box<DualSolution>,
    },

    /// A sample variance needed by a parametric test is zero.
    #[error("degenerate variance")]
    DegenerateVariance,

    /// Argument outside the mathematical domain of a special function.
    #[error("domain error: {0}")]
    DomainError(String),

    /// A CSV row had a different number of fields than the first data row.
    #[error("malformed csv at line {line}")]
    MalformedCsv { line: usize },

    /// A CSV cell could not be parsed as a finite number.
    #[error("parse error at line {line}, column {column}")]
    ParseError { line: usize, column: usize },

    /// A configuration value is out of range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A serialized artifact (model, threshold, gram, report) is damaged.
    #[error("bad file format: {0}")]
    FileFormat(String),

    /// A lower-level failure tagged with where in a composite run it happened
    /// (e.g. which benchmark dimension and repetition).
    #[error("{context}: {source}")]
    Context { context: String, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

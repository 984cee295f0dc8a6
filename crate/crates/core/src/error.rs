//! Crate-wide error type.
//!
//! The library distinguishes *domain* errors (the input is structurally fine
//! but outside the mathematical domain of the operation), *precondition*
//! errors (a documented prerequisite such as membership in `R_V` was not
//! met), *backend* errors (mixing exact and floating scalars, or requesting
//! an operation the backend cannot do exactly), *validation* errors
//! (structurally malformed data, reported with the offending pieces named),
//! and a handful of operational failures (resource limits, sampling
//! rejection, numerical breakdown, parsing).

use crate::trees::TreeViolation;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input lies outside the domain of the operation (wrong labels,
    /// colliding label sets, mismatched dimensions, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition does not hold for the given data.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Scalar-backend misuse: mixed exact/float data, or an operation the
    /// exact backend cannot perform (square roots, logarithms).
    #[error("backend error: {0}")]
    Backend(String),

    /// Structurally invalid data (bad weights, malformed tables, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Structurally invalid tree, with the offending edges named.
    #[error("invalid tree: {0}")]
    Tree(TreeViolation),

    /// A hard resource bound was exceeded (label-set or dimension caps).
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Rejection sampling gave up.
    #[error("sampling failed: {0}")]
    Sampling(String),

    /// A numerical routine failed to converge or produced nonsense.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Malformed textual input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

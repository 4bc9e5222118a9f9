use thiserror::Error;

use crate::hilbert::Scheme;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("scheme mismatch: expected {expected} basis, got {found}")]
    SchemeMismatch { expected: Scheme, found: Scheme },

    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("regime violation: {0}")]
    RegimeViolation(String),

    #[error("generator has non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("time {t} outside propagation range [0, {t_total}]")]
    GridOutOfRange { t: f64, t_total: f64 },

    #[error("time grid must be non-decreasing (got {prev} then {next})")]
    UnorderedGrid { prev: f64, next: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit state is not normalized (norm² = {0})")]
    NonUnitState(f64),

    #[error("state has amplitude outside the qubit subspace at `{0}`")]
    NonQubitSupport(String),

    #[error("propagator could not reach accuracy {target:e} (achieved {achieved:e})")]
    Accuracy { target: f64, achieved: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}

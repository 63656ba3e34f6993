use thiserror::Error;

use crate::scalar::Mode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("numeric mode mismatch: expected {expected}, found {found}")]
    ModeMismatch { expected: Mode, found: Mode },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("domain is not compact")]
    NotCompact,

    #[error("point is not in the interior of the domain")]
    NotInterior,

    #[error("point lies outside the domain")]
    OutsideDomain,

    #[error("negative increment {0}: shrinking operators only raise coefficients")]
    NegativeIncrement(String),

    #[error("flow parameter {0} outside [0, 1]")]
    FlowParameter(String),

    #[error("duplicate point at indices {0} and {1}")]
    DuplicatePoint(usize, usize),

    #[error("empty point set")]
    EmptyPointSet,

    #[error("epsilon too large: level set {0} has empty interior")]
    EpsilonTooLarge(String),

    #[error("series belong to different domains")]
    DifferentDomains,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("wave closure did not stabilise within {steps} steps")]
    NonConvergence {
        steps: usize,
        trace: Box<crate::dynamics::FlowTrace>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by configured caps rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_) | Error::NonConvergence { .. })
    }
}

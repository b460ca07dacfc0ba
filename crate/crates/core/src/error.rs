use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by every module of the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("unknown interaction family `{0}`")]
    UnknownFamily(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("malformed step-graphon table: {0}")]
    MalformedStepTable(String),

    #[error("type coordinate {0} outside [0,1]")]
    OutOfDomain(f64),

    #[error("time {t} outside [0,{horizon}]")]
    OutOfTimeDomain { t: f64, horizon: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("horizon mismatch: field has T={field}, requested T={requested}")]
    HorizonMismatch { field: f64, requested: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("agent index {index} out of range for n={n}")]
    AgentIndex { index: usize, n: usize },

    #[error("negative variance {0} passed where a Gaussian law was expected")]
    NegativeVariance(f64),

    #[error("interaction function is negative at ({u}, {v}); the ordering theorem does not apply")]
    NegativeKernel { u: f64, v: f64 },

    #[error("{0}")]
    Invalid(String),
}

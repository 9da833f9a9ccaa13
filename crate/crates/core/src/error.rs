use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A state vector does not have one entry per station.
    #[error("state has {state} components but the model has {stations} stations")]
    ModelMismatch { state: usize, stations: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model: {0}")]
    Validation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A caller broke an operation precondition (for example seeding a
    /// chain outside its level set).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("state space of {states} exceeds the enumeration cap of {cap}")]
    CapacityLimit { states: f64, cap: f64 },

    #[error("level selection did not converge: {0}")]
    Convergence(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

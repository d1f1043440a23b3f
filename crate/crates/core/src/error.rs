use thiserror::Error;

pub type Result<T> = std::result::Result<T, SwarmError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SwarmError {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("random initialization failed after {rounds} rejection rounds: disk graph never connected (spread {spread} too large for gamma {gamma} and n {n})")]
    InitRejected {
        rounds: usize,
        spread: f64,
        gamma: f64,
        n: usize,
    },

    #[error("non-finite state at step {step} (agent {agent})")]
    NonFinite { step: u64, agent: usize },

    #[error("algebraic connectivity requires an undirected graph; use strong_connectivity for directed graphs")]
    DirectedGraph,

    #[error("tail window holds {got} samples, need at least {need}")]
    TailTooShort { got: usize, need: usize },

    #[error("empty feasible (v, omega) region: {0}")]
    EmptyFeasibleSet(String),

    #[error("invalid sweep spec: {0}")]
    InvalidSweep(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("trajectory format error at line {line}: {reason}")]
    TrajectoryFormat { line: usize, reason: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for SwarmError {
    fn from(e: std::io::Error) -> Self {
        SwarmError::Io(e.to_string())
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> SwarmError {
    SwarmError::InvalidParam {
        name,
        reason: reason.into(),
    }
}

use thiserror::Error;

/// Errors surfaced by environments, learners, oracles and the experiment
/// harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid action {action} for environment with {action_count} actions")]
    InvalidAction { action: usize, action_count: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("potential kind {kind} does not apply to a {state_dim}-dimensional state")]
    PotentialMismatch { kind: String, state_dim: usize },

    #[error("demon {id}: non-finite {what} encountered; update rejected")]
    NonFinite { id: String, what: &'static str },

    #[error("transition row for state {state}, action {action} sums to {sum}, not 1")]
    NonStochasticRow {
        state: usize,
        action: usize,
        sum: f64,
    },

    #[error("gridworld must contain at least one cell")]
    DegenerateGrid,

    #[error("goal cell ({x}, {y}) lies outside a {width}x{height} grid")]
    GoalOutsideGrid {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("unknown policy id `{id}`")]
    MissingPolicy { id: String },

    #[error("behavior probability must be positive, got {0}")]
    InvalidBehaviorProb(f64),

    #[error("statistics error: {0}")]
    Stats(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("objective length mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("objective value at index {index} is not finite")]
    NonFinite { index: usize },

    #[error("illegal move {mv} at step {step}")]
    IllegalMove { mv: String, step: usize },

    #[error("state has no legal moves but is not terminal")]
    NoLegalMoves,

    #[error("state is not terminal")]
    NotTerminal,

    #[error("policy index {index} out of range for {n_policies} policies")]
    PolicyIndex { index: usize, n_policies: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("operation requires a single-objective problem, got {0} objectives")]
    NotSingleObjective(usize),

    #[error("{0}")]
    Contract(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("instance with {n} cities exceeds the enumeration limit of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

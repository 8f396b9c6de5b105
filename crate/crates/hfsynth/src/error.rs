use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("arity mismatch for {gate}: expected {expected}, got {got}")]
    Arity {
        gate: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("node {node} references {target}, which is not an earlier node")]
    DanglingReference { node: usize, target: usize },
    #[error("value {value} out of range (limit {limit})")]
    OutOfRange { value: u64, limit: u64 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("missing subcircuit for control assignment {0}")]
    MissingAssignment(String),
    #[error("width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("invalid machine: {0}")]
    Machine(String),
    #[error("parameters too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

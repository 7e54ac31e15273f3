use thiserror::Error;

/// Errors raised by the analysis pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },

    #[error("linear change is singular")]
    SingularMatrix,

    #[error("polynomial is constant")]
    ConstantPolynomial,

    #[error("no admissible coordinate change found after {0} attempts")]
    RetriesExhausted(usize),

    #[error("unsupported dimension {0} (at most 3 variables)")]
    UnsupportedDimension(usize),

    #[error("sublevel set [f <= {level}] is empty (infimum estimate {inf})")]
    InfeasibleLevel { level: f64, inf: f64 },

    #[error("inconsistent detector verdicts: {0}")]
    Inconclusive(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

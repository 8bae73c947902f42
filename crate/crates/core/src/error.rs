use thiserror::Error;

/// Errors raised by the calculus library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("relation not uniquely solvable at degree {degree}: {detail}")]
    NotSolvable { degree: usize, detail: String },

    #[error("inconsistent relation at degree {degree}: {detail}")]
    Inconsistent { degree: usize, detail: String },

    #[error("descriptor error: {0}")]
    Descriptor(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("route disagreement for {sequence} at degree {degree}")]
    RouteMismatch { sequence: String, degree: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(String),
}

pub type Result<T> = std::result::Result<T, Error>;

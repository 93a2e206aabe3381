use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    /// A code-parameter constraint failed; the message names the inequality.
    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("evaluation points are not P-independent")]
    NotPIndependent,

    #[error("polynomial degree {degree} exceeds bound {bound}")]
    DegreeOverflow { degree: usize, bound: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("unrecoverable: {0}")]
    Unrecoverable(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid forwarding list: {0}")]
    ForwardingList(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

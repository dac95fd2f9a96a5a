use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("zero span: every input element is zero")]
    ZeroSpan,

    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("invalid colouring spec: {0}")]
    InvalidSpec(String),

    #[error("negative squared norm: {0}")]
    NegativeNorm(String),

    #[error("precondition failed: not all red")]
    NotAllRed,

    #[error("precondition failed: copy equation violated")]
    CopyEquationViolated,

    #[error("{what}: {count} exceeds the limit of {limit}")]
    SizeLimit {
        what: &'static str,
        count: u128,
        limit: u128,
    },

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }
}

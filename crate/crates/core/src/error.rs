use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search bound {bound} exceeded: {what}")]
    SearchBound { what: String, bound: u64 },

    #[error("no splitting element found at prime {prime}")]
    SplittingSearch { prime: u64 },

    #[error("bad reduction at {0}")]
    BadReduction(u64),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("tower not stabilized at level {level}: {detail}")]
    NotStabilized { level: u32, detail: String },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("simple transitivity failed: {0}")]
    Transitivity(String),

    #[error("conductor mismatch: character level {chi}, point level {point}")]
    ConductorMismatch { chi: u32, point: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}

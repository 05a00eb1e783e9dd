//! Shared error type. Every refusal and every bounded-search giveup is an
//! explicit variant; no operation silently returns a wrong answer.

/// Errors surfaced by the library. `Unsupported` marks honest refusals
/// (theory/operation combinations outside the implemented scope),
/// `Undecided` marks bounded searches that ran out of room, and
/// `Internal` marks broken invariants that indicate a bug here, not bad input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("signature violation: {0}")]
    Signature(String),
    #[error("unsupported for theory {theory}: {what}")]
    Unsupported { theory: String, what: String },
    #[error("undecided at this bound: {0}")]
    Undecided(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn unsupported(theory: impl Into<String>, what: impl Into<String>) -> Self {
        Error::Unsupported { theory: theory.into(), what: what.into() }
    }
}

//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Two values built over different gap parameters were combined.
    #[error("gap parameter mismatch: p={0} vs p={1}")]
    ParameterMismatch(u32, u32),

    /// Malformed text input.
    #[error("parse error at byte {pos}: expected {expected}, found {found}")]
    Parse {
        pos: usize,
        expected: String,
        found: String,
    },

    /// Structurally invalid data (bad superscript, non-symmetrical index
    /// set, degenerate input, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A documented precondition of an operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A mathematical fact the implementation relies on failed to hold.
    /// Signals a bug, never expected on valid inputs.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// An action oracle is inconsistent with every module in the classified
    /// family.
    #[error("classification failed: {0}")]
    Classification(String),

    /// Parameter recovery from a tensor-module oracle failed.
    #[error("fingerprint failed: {0}")]
    Fingerprint(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn violation(msg: impl Into<String>) -> Self {
        Error::InvariantViolation(msg.into())
    }
}

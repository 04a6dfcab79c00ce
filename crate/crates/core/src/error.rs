use thiserror::Error;

use crate::model::{MethodRef, Violation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown interface '{0}'")]
    UnknownInterface(String),
    #[error("unknown method '{0}'")]
    UnknownMethod(MethodRef),
    #[error("graph failed validation with {} violation(s)", .0.len())]
    Validation(Vec<Violation>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("method '{0}' cannot be adapted from the source")]
    NotAdaptable(MethodRef),
    #[error("adapter selection reached a dead end at '{0}'")]
    DeadEnd(MethodRef),
    #[error("exact search budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Machine-readable error category.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownInterface(_) => "UNKNOWN_INTERFACE",
            Error::UnknownMethod(_) => "UNKNOWN_METHOD",
            Error::Validation(_) => "VALIDATION_ERROR",
            Error::Parse(_) => "PARSE_ERROR",
            Error::InvalidInstance(_) => "INVALID_INSTANCE",
            Error::NotAdaptable(_) => "NOT_ADAPTABLE",
            Error::DeadEnd(_) => "DEAD_END",
            Error::BudgetExceeded(_) => "BUDGET_EXCEEDED",
            Error::Io(_) => "IO_ERROR",
        }
    }

    /// Process exit status used by the command line tool: 1 for a domain
    /// negative, 2 for bad input, 3 when the exact-search budget runs out.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotAdaptable(_) | Error::DeadEnd(_) => 1,
            Error::UnknownInterface(_)
            | Error::UnknownMethod(_)
            | Error::Validation(_)
            | Error::Parse(_)
            | Error::InvalidInstance(_)
            | Error::Io(_) => 2,
            Error::BudgetExceeded(_) => 3,
        }
    }
}

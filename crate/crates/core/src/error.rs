use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Structural problem with user input. `pointer` is a JSON pointer when the
    /// input came from a manifest, otherwise a short locator (file:line, face id).
    #[error("validation failed at {pointer}: {message}")]
    Validation { pointer: String, message: String },

    #[error("weight {delta} is exceptional: within {tol:e} of exceptional weight {weight}")]
    ExceptionalWeight { delta: f64, weight: f64, tol: f64 },

    #[error("weight {delta} outside the supported range: {reason}")]
    OutOfValidity { delta: f64, reason: String },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn validation(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the CLI: 2 validation, 3 numeric, 4 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) | Error::Resource(_) => 3,
            Error::Internal(_) => 4,
            _ => 2,
        }
    }

    /// Stable short name, used in report blocks.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Argument(_) => "argument",
            Error::Validation { .. } => "validation",
            Error::ExceptionalWeight { .. } => "exceptional_weight",
            Error::OutOfValidity { .. } => "out_of_validity",
            Error::Numeric(_) => "numeric",
            Error::Resource(_) => "resource",
            Error::Internal(_) => "internal",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

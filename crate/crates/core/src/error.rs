use thiserror::Error;

/// Errors raised across the library.
///
/// Precondition and parse failures are "user" errors (the CLI maps them to
/// exit code 2); everything else is an internal or numerical failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid field `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("precision exhausted at {bits} bits while {context}")]
    PrecisionExhausted { bits: u32, context: String },

    #[error("x = {x} lies outside the domain {domain}")]
    OutsideDomain { x: String, domain: String },

    #[error(
        "coefficient {value} exceeds the divisor enumeration cap {cap}; \
         rerun with the isolating-interval root strategy"
    )]
    DivisorCap { value: String, cap: String },

    #[error("unknown curve family `{0}`")]
    UnknownFamily(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn precondition(message: impl Into<String>) -> Self {
        Error::Precondition(message.into())
    }

    /// True for errors caused by bad input rather than by the computation.
    pub fn is_user_error(&self) -> bool {
        matches!(
            self,
            Error::Precondition(_)
                | Error::Parse { .. }
                | Error::OutsideDomain { .. }
                | Error::UnknownFamily(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

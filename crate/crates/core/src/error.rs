use std::fmt;

/// Errors produced by the model, the simulators and the scenario loader.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("coincident points: {0}")]
    CoincidentPoints(&'static str),

    #[error("zero-length vector cannot be normalized")]
    ZeroVector,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("shape mismatch: expected {expected} reflector, got {found}")]
    ShapeMismatch { expected: &'static str, found: &'static str },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("{0}")]
    Validation(ValidationErrors),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by file-system access rather than bad input.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// A list of violated invariants, each naming the offending field.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationErrors(pub Vec<String>);

impl ValidationErrors {
    pub fn push(&mut self, field: impl fmt::Display, rule: impl fmt::Display) {
        self.0.push(format!("{field} {rule}"));
    }

    /// Requires `ok`, recording `field rule` when it does not hold.
    pub fn check(&mut self, ok: bool, field: impl fmt::Display, rule: impl fmt::Display) {
        if !ok {
            self.push(field, rule);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(self))
        }
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "validation failed: {}", self.0.join("; "))
    }
}

use thiserror::Error;

/// Errors raised by the laboratory's numerical operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("weight validation failed: {0}")]
    Weights(String),

    #[error("point outside domain: {0}")]
    Domain(String),

    #[error("numeric range exceeded: {0}")]
    NumericRange(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("index error: {0}")]
    Index(String),

    #[error("division guard: {0}")]
    DivisionGuard(String),

    #[error("at step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Strips step annotations and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_numeric_range(&self) -> bool {
        matches!(self.root(), Error::NumericRange(_))
    }

    pub(crate) fn at_step(self, step: usize) -> Error {
        Error::AtStep {
            step,
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

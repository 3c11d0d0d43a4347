use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{location}: {message}")]
    Parse { location: String, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] chorefair_core::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse { location: location.into(), message: message.to_string() }
    }

    /// True for failures caused by the input rather than by a broken guarantee.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Core(chorefair_core::Error::InvariantViolation(_)))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

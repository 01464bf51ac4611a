use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or inconsistent input.
    #[error("validation error: {0}")]
    Validation(String),
    /// A configured size limit would be exceeded.
    #[error("resource cap exceeded: {0}")]
    Cap(String),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn cap(msg: impl Into<String>) -> Self {
        Error::Cap(msg.into())
    }

    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) => 2,
            Error::Cap(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A root-finder was asked for a root that does not exist.
    #[error("no root: {0}")]
    NoRoot(String),

    /// A rejection sampler hit its retry cap.
    #[error("retry cap of {cap} attempts exceeded while {what}")]
    RetryCap { what: &'static str, cap: u64 },

    /// A documented precondition of an operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Invalid parameters supplied to a constructor.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A computation produced NaN or infinity.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParams(_) | Error::Precondition(_) => 2,
            Error::RetryCap { .. } => 3,
            Error::Domain(_) | Error::NoRoot(_) | Error::NonFinite(_) => 4,
            Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),

    #[error("{what} = {value} exceeds guard {limit}")]
    GuardExceeded { what: &'static str, value: u128, limit: u128 },

    #[error("no table entry for f({p}^{e})")]
    MissingEntry { p: u64, e: u32 },

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn guard(what: &'static str, value: impl Into<u128>, limit: impl Into<u128>) -> Self {
        Error::GuardExceeded { what, value: value.into(), limit: limit.into() }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::NotCoprime(..) | Error::MissingEntry { .. } | Error::Config(_) => 2,
            Error::GuardExceeded { .. } => 3,
            Error::Consistency(_) => 4,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
        }
    }
}

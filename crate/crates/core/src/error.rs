use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid coalition: player {player} outside ground set of size {n}")]
    InvalidCoalition { player: usize, n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} too large: {size} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("state does not match the {0} scheme")]
    SchemeMismatch(&'static str),

    #[error("player {player} already plays strategy {strategy}")]
    NoOpMove { player: usize, strategy: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("valuation {index} is not monotone submodular: {witness}")]
    InvalidValuation { index: usize, witness: String },

    #[error("no equilibrium found among enumerated states")]
    NoEquilibriumFound,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }
}

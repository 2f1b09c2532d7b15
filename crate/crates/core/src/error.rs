use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resolution {requested} exceeds configured limit {limit}")]
    ResolutionLimit { requested: usize, limit: usize },

    #[error("{what} is out of budget: {detail}")]
    Budget { what: &'static str, detail: String },

    #[error("exact evaluation needs rational parameters: {0}")]
    NotExact(String),

    #[error("monotonicity check failed at {lo:?} <= {hi:?}")]
    NotMonotone { lo: [f64; 3], hi: [f64; 3] },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("rounding could not restore positive semidefiniteness: {0}")]
    Unrepairable(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("value {value} is outside the universe [{lo}, {hi}] of variable `{variable}`")]
    Domain {
        variable: String,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("no rule fired")]
    NoRuleFired,
    #[error("invalid fuzzy set: {0}")]
    InvalidSet(String),
    #[error("invalid fuzzy unit `{unit}`: {reason}")]
    InvalidUnit { unit: String, reason: String },
    #[error("invalid hierarchy: {0}")]
    Hierarchy(String),
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("invalid swarm configuration: {0}")]
    Pso(String),
    #[error("invalid network: {0}")]
    Network(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("xml error at {path}: {message}")]
    Xml { path: String, message: String },
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

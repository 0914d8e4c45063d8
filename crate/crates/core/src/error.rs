use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("space is not connected ({0} components)")]
    Disconnected(usize),
    #[error("invalid Reeb graph: {0}")]
    InvalidGraph(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("maps do not compose: {0}")]
    Mismatch(String),
    #[error("value commutation fails at source vertex {vertex}: expected {expected}, found {found}")]
    Commutation { vertex: usize, expected: String, found: String },
    #[error("interval is empty: lower end {0} exceeds upper end {1}")]
    EmptyInterval(String, String),
    #[error("not a Reeb quotient map: {0}")]
    NotCertified(Box<crate::map::Violation>),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<crate::map::Violation> for Error {
    fn from(v: crate::map::Violation) -> Self {
        Error::NotCertified(Box::new(v))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

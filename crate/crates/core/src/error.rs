use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid characteristic coefficients: {0}")]
    InvalidTriple(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("no sign change: {0}")]
    NoBracket(String),

    #[error("root is not unique: {0}")]
    MultipleRoots(String),

    #[error("polynomial root finder failed: {0}")]
    Polynomial(String),

    #[error("invalid solver input: {0}")]
    Solver(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

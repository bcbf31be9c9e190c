//! Error taxonomy shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad construction parameters (grid sizes, exponents, spec files).
    #[error("configuration error: {0}")]
    Config(String),

    /// A call violated an API precondition (size mismatches, wrong weight).
    #[error("contract error: {0}")]
    Contract(String),

    /// Evaluation outside the admissible domain (|z| too close to 1, poles).
    #[error("domain error: {0}")]
    Domain(String),

    /// The measure lacks the class membership the operation needs.
    #[error("class error: {0}")]
    Class(String),

    /// A recursion or linear solve lost too much precision to continue.
    #[error("ill-conditioned: {0}")]
    Conditioning(String),

    /// A numerical consistency check failed mid-computation.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}:{col}: unknown generator `{name}`")]
    UnknownGenerator {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("expression is not a unit: {0}")]
    NotAUnit(String),
    #[error("operator is not monic of order {0}")]
    NotMonic(u32),
    #[error("operator does not decompose onto the family `{family}`: {detail}")]
    Decomposition { family: String, detail: String },
    #[error("covector pairing identity fails: {0}")]
    Pairing(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed document: {0}")]
    Parse(String),
    #[error("invalid atom {index}: {reason}")]
    InvalidAtom { index: usize, reason: String },
    #[error("element does not belong to the group: {0}")]
    NotInGroup(String),
    #[error("operands live in different groups")]
    AmbientMismatch,
    #[error("subgroup is not contained in the larger one")]
    NotContained,
    #[error("expression is not an automorphism of the group: {0}")]
    InvalidExpr(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;

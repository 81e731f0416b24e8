use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LpError {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("iteration limit of {0} reached")]
    IterationLimit(usize),
}

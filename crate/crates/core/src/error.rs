use dri_lp::LpError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("{0}")]
    Domain(String),

    /// A value violates a structural invariant of its type.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("lp solver: {0}")]
    Lp(#[from] LpError),

    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },

    #[error("model has {nnz} nonzeros, above the cap of {cap}; use a smaller grid")]
    TooLarge { nnz: usize, cap: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Invariant(_) | Error::Parse { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix X is not traceless")]
    NotTraceless,
    #[error("polynomial is not symmetric")]
    Symmetry,
    #[error("polynomial has odd character content")]
    Parity,
    #[error("index out of range: {0}")]
    Range(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("compositions have different totals")]
    Totals,
    #[error("weight is not dominant")]
    NotDominant,
    #[error("inconsistent linear system: {0}")]
    Inconsistent(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
    #[error("Fourier degree {degree} exceeds the configured cap {cap}")]
    GridOverflow { degree: usize, cap: usize },
    #[error("eigenvalue collision between labels {0}")]
    LabelAmbiguity(String),
    #[error("recurrence residual {0:e} too large")]
    Residual(f64),
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Bloch vector norm {norm} deviates from 1 by more than {tol}")]
    NonUnitBloch { norm: f64, tol: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("unknown maximally entangled state kind `{0}`")]
    UnknownKind(String),

    #[error("n must be odd and >= 3, got {0}")]
    InvalidN(u32),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("scenario has no {0} equivalences")]
    NoEquivalences(&'static str),

    #[error("strategy polytope is empty")]
    EmptyPolytope,

    #[error("parse error at {field}: {message}")]
    Parse { field: String, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("value {value} out of range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

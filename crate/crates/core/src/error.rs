use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of {what} at {at}")]
    Pole { what: &'static str, at: String },

    #[error("series did not converge within {terms} terms: {context}")]
    NonConvergence { terms: usize, context: String },

    #[error("parameter out of range: {0}")]
    Range(String),

    #[error("spectral parameter {z} is within {tol:e} of the Landau level {level}")]
    Spectrum { z: String, level: f64, tol: f64 },

    #[error("coincident points: {0}")]
    Coincidence(String),

    #[error("matrix is not symmetric: max asymmetry {0:e}")]
    Symmetry(f64),

    #[error("truncation insufficient: {0}")]
    TruncationInsufficient(String),

    #[error("fit is ill-conditioned: condition number {0:e}")]
    IllConditioned(f64),

    #[error("identity violated: {0}")]
    IdentityViolation(String),

    #[error("lambda = {lambda} lies within {tol:e} of an eigenvalue")]
    OnEigenvalue { lambda: f64, tol: f64 },

    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

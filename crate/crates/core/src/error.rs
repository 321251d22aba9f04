use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("ill-conditioned fit (condition {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("poor fit: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    PoorFit {
        residual: f64,
        tol: f64,
        constant: Complex64,
    },

    #[error("accuracy not reached: {message} (estimate {estimate})")]
    Accuracy { message: String, estimate: Complex64 },

    #[error("pole of order > 1 detected (|c_-2| = {c_minus2:.3e})")]
    NonSimplePole { c_minus2: f64 },

    #[error("evaluation failed at z = {z}: {message}")]
    Contour { z: Complex64, message: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Accuracy and fit failures map to exit code 3 in the CLI.
    pub fn is_accuracy(&self) -> bool {
        matches!(
            self,
            Error::IllConditioned { .. }
                | Error::PoorFit { .. }
                | Error::Accuracy { .. }
                | Error::NonSimplePole { .. }
                | Error::Contour { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

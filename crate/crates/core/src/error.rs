//! Error type shared by the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid bandwidth profile: {0}")]
    InvalidProfile(String),

    #[error("invalid spectral set: {0}")]
    InvalidSpectrum(String),

    #[error("index {index} out of range (expected {expected})")]
    IndexOutOfRange { index: usize, expected: String },

    #[error("spectral parameter must be positive, got {0}")]
    NonPositiveSpectralParameter(f64),

    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    #[error("series evaluation unavailable: {0}")]
    SeriesUnavailable(String),

    #[error("series ratio |R| = {0} is not < 1")]
    SeriesRatioOutOfRange(f64),

    #[error("profile/spectrum shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("duplicate points in set (indices {0} and {1})")]
    DuplicatePoints(usize, usize),

    #[error("Gram matrix is numerically rank zero after thresholding")]
    RankDeficient,

    #[error("kernel value has excess imaginary part {0:.3e}")]
    ExcessImaginary(f64),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
}

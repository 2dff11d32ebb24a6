use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatError {
    #[error("particle number must be even and at least 2, got {0}")]
    InvalidParticleNumber(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is not Hermitian (residual {residual:e}, allowed {allowed:e})")]
    NotHermitian { residual: f64, allowed: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("no separatrix: coupling {coupling} does not exceed the instability threshold 1")]
    SeparatrixAbsent { coupling: f64 },

    #[error("separatrix does not cross phase {phi} at coupling {coupling}")]
    NoSeparatrixCrossing { phi: f64, coupling: f64 },

    #[error("trajectory integration failed at t = {time}: {reason}")]
    IntegrationFailed { time: f64, reason: String },

    #[error("synthetic cat peaks overlap: centre {center} must exceed 3 widths ({width})")]
    PeaksOverlap { center: f64, width: f64 },

    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),
}

impl CatError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        CatError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = CatError> = std::result::Result<T, E>;

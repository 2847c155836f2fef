use thiserror::Error;

/// Errors produced by the spectral toolkit.
#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The transversal spectrum with α = 0 is the Neumann spectrum; λ = 0 is
    /// excluded from the Robin branch, so callers must switch constructors.
    #[error("alpha = 0 has no Robin branch; use neumann_reference")]
    NeumannRequired,

    #[error("coordinate {value} outside the cross-section [0, {eps}]")]
    OutOfDomain { value: f64, eps: f64 },

    #[error("basis defect is defined for mode index n >= 1")]
    GroundDefect,

    #[error("non-integrable excess: tabulated profile does not decay to alpha0 at its ends")]
    NonIntegrableExcess,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("factorization failed: {0}")]
    FactorizationFailed(String),

    #[error("eigensolver did not converge after {iterations} iterations; best residuals {residuals:?}")]
    NoConvergence {
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("dense oracle refused: dimension {dim} exceeds {max}")]
    DenseTooLarge { dim: usize, max: usize },

    #[error("packet of scale {scale} does not fit the truncated strip of half-length {half_length}")]
    PacketDoesNotFit { scale: f64, half_length: f64 },

    #[error(
        "quadratic-form routes disagree: direct quadrature {direct:.12e} vs reduced formula {reduced:.12e}"
    )]
    QuadratureMismatch { direct: f64, reduced: f64 },

    #[error("adaptive quadrature failed to reach the requested tolerance")]
    QuadratureNoConvergence,
}

pub type Result<T> = std::result::Result<T, SpectralError>;

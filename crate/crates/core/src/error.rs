use thiserror::Error;

/// Errors raised by the simulation kernel and the layers built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix exponential produced non-finite entries")]
    NonFiniteEntries,

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("operator tagged unitary deviates from unitarity by {residual:e}")]
    NotUnitary { residual: f64 },

    #[error("operator tagged hermitian deviates from hermiticity by {residual:e}")]
    NotHermitian { residual: f64 },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("relative phase undefined (visibility or fidelity {0:e} too small)")]
    PhaseUndefined(f64),

    #[error("rotation axis must be a finite unit vector (norm {norm})")]
    BadAxis { norm: f64 },

    #[error("2π rotation is not a scalar (off-scalar residual {residual:e})")]
    NotScalar { residual: f64 },

    #[error("mass must be positive and finite, got {0}")]
    NonPositiveMass(f64),

    #[error("expected a null space of dimension 2, found {0}")]
    UnexpectedNullity(usize),

    #[error("boosted spinor violates the wave equation (residual {residual:e})")]
    CovarianceViolation { residual: f64 },

    #[error("plane-wave solution invalid: {0}")]
    InvalidSolution(String),

    #[error("invalid Galilean transformation: {0}")]
    InvalidBoost(String),

    #[error("quantum number 2m = {two_m} is not allowed for 2S = {two_s}")]
    BadQuantumNumber { two_s: u32, two_m: i32 },

    #[error("swap fraction must lie in [0, 1], got {0}")]
    AlphaOutOfRange(f64),

    #[error("invalid rotation schedule: {0}")]
    InvalidSchedule(String),

    #[error("need at least 3 samples, got {0}")]
    TooFewSamples(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

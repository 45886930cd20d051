use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("b must be a positive integer")]
    InvalidExponent,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("quadrature did not converge: refinement estimates {coarse} and {fine} differ by more than {tolerance}")]
    QuadratureNonconvergence { coarse: f64, fine: f64, tolerance: f64 },

    #[error("invalid integrator configuration: {0}")]
    ConfigInvalid(String),

    #[error("step size underflow at t = {t}: dt = {dt}")]
    StepSizeUnderflow { t: f64, dt: f64 },

    #[error("no real b-th root of {value} for b = {b}")]
    Domain { value: f64, b: u32 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("transform not admitted: {0}")]
    TransformNotAdmitted(String),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("samples are not uniformly spaced near t = {t}")]
    NonUniformSamples { t: f64 },

    #[error("differencing stencil around t = {t} crosses a position crossing")]
    StencilCrossesEvent { t: f64 },

    #[error("conserved quantity is not valid: positions coincide at t = {t}")]
    ValidityViolated { t: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

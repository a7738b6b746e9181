use alloc::string::String;

/// Errors raised by the algebraic and numeric routines of this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("curve class has no multiplicity at any point and gives no Seshadri obstruction")]
    NotAnObstruction,
    #[error("invalid Cremona transform: {0}")]
    InvalidTransform(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid point configuration: {0}")]
    InvalidConfiguration(String),
    #[error("evaluation map is not surjective (corank {corank})")]
    SurjectivityRequired { corank: usize },
    #[error("index {index} out of range (at most {max})")]
    Index { index: usize, max: usize },
    #[error("the zero form has no vanishing order")]
    ZeroSection,
    #[error("family section invariant violated: {0}")]
    InvariantViolation(String),
    #[error("general fibre requires a nonzero parameter; use the central restriction for t = 0")]
    CentralParameter,
    #[error("value out of floating-point range: {0}")]
    Range(String),
    #[error("numerical instability: {0}")]
    NumericalInstability(String),
    #[error("bound inconsistency: {0}")]
    BoundInconsistency(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

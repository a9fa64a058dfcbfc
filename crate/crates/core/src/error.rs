use thiserror::Error;

/// Everything that can go wrong inside the fidelity engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("Fock cutoff {cutoff} is too small (need at least {min})")]
    CutoffTooSmall { cutoff: usize, min: usize },

    #[error("truncation tail {tail:.3e} exceeds tolerance {tol:.3e} at cutoff {cutoff}")]
    TailTooLarge { tail: f64, tol: f64, cutoff: usize },

    #[error("mode index {index} out of range for a {modes}-mode state")]
    ModeIndexOutOfRange { index: usize, modes: usize },

    #[error("branch count {branches} outside the supported range {min}..={max}")]
    BranchCountUnsupported { branches: usize, min: usize, max: usize },

    #[error("phase-space grid too coarse: estimated error {estimate:.3e} > {tol:.3e}")]
    GridResolutionInsufficient { estimate: f64, tol: f64 },

    #[error("quadrature did not converge: error estimate {estimate:.3e} > {tol:.3e}")]
    QuadratureNotConverged { estimate: f64, tol: f64 },

    #[error("Gaussian quadratic form is singular (det = {det:.3e})")]
    SingularCovariance { det: f64 },

    #[error("constraint {target} unreachable: {reason}")]
    ConstraintUnreachable { target: f64, reason: String },

    #[error("mean success probability is zero; naive resource cost undefined")]
    DivisionByZeroSuccess,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Crate-wide error type.

use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("unknown distribution `{0}`")]
    UnknownDistribution(String),

    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("measure `{0}` has no representation supporting this operation")]
    UnsupportedRepresentation(String),

    #[error("continued fraction did not converge at depth {depth} (last two iterates {last} / {prev})")]
    CfConvergence {
        depth: usize,
        last: Complex64,
        prev: Complex64,
    },

    #[error("inversion failed at path position {reached} targeting {target}: {reason}")]
    InversionFailure {
        target: Complex64,
        reached: Complex64,
        reason: String,
    },

    #[error("|F'| = {0:.3e} below the derivative-singularity floor")]
    DerivativeSingularity(f64),

    #[error("quadrature failed to reach tolerance: estimated error {est:.3e} > {tol:.3e}")]
    QuadratureFailure { est: f64, tol: f64 },

    #[error("enumeration order {0} exceeds the non-crossing partition cap {1}")]
    OrderCap(usize, usize),

    #[error("not a positive-definite moment sequence: {0}")]
    NotAMomentSequence(String),

    #[error("insufficient coefficients: need {need}, have {have}")]
    Truncation { need: usize, have: usize },

    #[error("Stieltjes inversion unstable at x = {x}: extrapolation spread {spread:.3e}")]
    InversionUnstable { x: f64, spread: f64 },

    #[error("invalid rho measure: {0}")]
    InvalidRho(String),

    #[error("analytic continuation left the admissible domain at {at} (step {step})")]
    ContinuationExit { at: Complex64, step: usize },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("{0}")]
    Other(String),
}

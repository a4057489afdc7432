use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular symbol: homogeneous order {order} applied to data with nonzero mean")]
    SingularSymbol { order: f64 },

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("argument outside supported range: {0}")]
    Range(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("singular prefactor r^(-(d-2)/2) at r = 0 for d = {d}")]
    SingularPrefactor { d: usize },

    #[error("invalid exponent pair: {0}")]
    InvalidPair(String),

    #[error("time samples are not uniform")]
    NonUniformTimes,

    #[error("wraparound contamination: boundary mass fraction {mass:.3e} exceeds {limit:.1e}")]
    Wraparound { mass: f64, limit: f64 },

    #[error("blowup detected at step {step}")]
    Blowup { step: usize },

    #[error("contraction failure: residual grew for three consecutive iterations ending at {iteration}")]
    ContractionFailure { iteration: usize },

    #[error("quadrature did not converge: {0}")]
    Convergence(String),

    #[error("shape mismatch: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

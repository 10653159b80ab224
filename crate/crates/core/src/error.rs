use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Gram matrix is not positive semidefinite (last jitter tried {jitter:e})")]
    NotPsd { jitter: f64 },

    #[error("only {got} tuples could be evaluated, at least {need} are required")]
    InsufficientSamples { got: usize, need: usize },

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("integrand is singular at {0:?}")]
    SingularPoint(Vec<f64>),

    #[error(
        "quadrature budget of {budget} evaluations cannot cover a single rung (needs {needed})"
    )]
    BudgetExceeded { budget: u64, needed: u64 },

    #[error("parameters outside the lemma's regime: {0}")]
    RegimeMismatch(String),

    #[error("series not converged: {0}")]
    NotConverged(String),

    #[error("correlation reaches {rho_max} on the quadrature grid; excise the diagonal")]
    SingularDomain { rho_max: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

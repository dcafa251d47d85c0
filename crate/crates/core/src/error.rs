use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pole of the Gamma function at z = {0}")]
    GammaPole(f64),

    #[error("argument {0} lies on the branch cut of {1}")]
    OnCut(String, &'static str),

    #[error("argument outside the domain of {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("epsilon extrapolation did not converge: spread {spread:.3e} > {limit:.3e}")]
    Extrapolation { spread: f64, limit: f64 },

    #[error("support of the test function leaves the chart window at the {boundary} boundary (tau = {tau:.6})")]
    SupportEscape { boundary: &'static str, tau: f64 },

    #[error("reference function not normalized: integral = {0}")]
    NotNormalized(String),

    #[error("degenerate construction: {0}")]
    Degenerate(String),

    #[error("ill-conditioned Gram matrix: numerical rank {rank}, need at least {needed}")]
    IllConditioned { rank: usize, needed: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("grid mismatch between test functions")]
    GridMismatch,

    #[error("serialization: {0}")]
    Serialization(String),
}

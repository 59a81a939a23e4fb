use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimensions do not match ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("matrix is not unit lower triangular")]
    NotUnitLowerTriangular,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },

    #[error("quadrature did not converge after {doublings} panel doublings")]
    QuadratureNotConverged { doublings: usize },

    #[error("conditioning exhausted at degree {degree}: squared norm lost positive definiteness")]
    ConditioningExhausted { degree: usize },

    #[error("degree budget exceeded: n_max = {requested} > {budget}")]
    DegreeBudget { requested: usize, budget: usize },

    #[error("index {index} is outside the tabulated range 0..={n_max}")]
    OutOfRange { index: usize, n_max: usize },

    #[error("closed form disagrees with quadrature (relative error {error:e})")]
    ClosedFormMismatch { error: f64 },

    #[error("not a polynomial of degree {degree} (verification residual {residual:e})")]
    NotPolynomial { degree: usize, residual: f64 },

    #[error("expansion tail at shift -{shift} does not vanish (residual {residual:e})")]
    NonVanishingTail { shift: usize, residual: f64 },

    #[error("truncation of {n_blocks} blocks is too small for flow index {flow}")]
    TruncationTooSmall { n_blocks: usize, flow: usize },
}

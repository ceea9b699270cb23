//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },

    #[error("entry at ({row},{col}) violates the algebra support pattern (|entry| = {magnitude:.3e})")]
    SupportViolation {
        row: usize,
        col: usize,
        magnitude: f64,
    },

    #[error("dimension mismatch: {context}")]
    ShapeMismatch { context: String },

    #[error("the algebra is not unital")]
    NonUnitalAlgebra,

    #[error("the domain algebra is not unital")]
    NonUnitalDomain,

    #[error("random style {style} is not supported on this algebra")]
    UnsupportedStyle { style: String },

    #[error("n must be at least 2 (got {n})")]
    InvalidN { n: i64 },

    #[error("interpolation index {k} is out of range for n = {n}")]
    IndexOutOfRange { k: usize, n: u32 },

    #[error("element is not an {n}-potent (residual {residual:.3e})")]
    NotNPotent { n: u32, residual: f64 },

    #[error("element is not self-adjoint (residual {residual:.3e})")]
    NotSelfAdjoint { residual: f64 },

    #[error("constructed family fails its own invariants: {what} (residual {residual:.3e})")]
    ToleranceExceeded { what: String, residual: f64 },

    #[error("map is not involutive (residual {residual:.3e})")]
    NotInvolutive { residual: f64 },

    #[error("map is not an {n}-homomorphism (residual {residual:.3e})")]
    NotNHomomorphism { n: u32, residual: f64 },

    #[error(
        "exhaustive check needs {tuples} basis tuples, over the budget of {budget}; \
         use randomized mode"
    )]
    BudgetExceeded { tuples: u128, budget: u128 },

    #[error("part {index} is not a homomorphism (residual {residual:.3e})")]
    NotHomomorphism { index: usize, residual: f64 },

    #[error("parts {i} and {j} are not orthogonal (residual {residual:.3e})")]
    NotOrthogonal { i: usize, j: usize, residual: f64 },

    #[error("decomposition verification failed: {what} (residual {residual:.3e})")]
    VerificationFailed { what: String, residual: f64 },

    #[error("lambda must be nonzero")]
    LambdaZero,

    #[error("spectral inclusion is an odd-n statement (got n = {n})")]
    EvenN { n: u32 },

    #[error("operation requires a direct-sum domain algebra")]
    NonDirectSumDomain,

    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,
}

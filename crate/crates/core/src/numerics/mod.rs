//! Dense linear algebra and special functions.

mod cholesky;
mod matrix;
mod qr;
pub mod quad;
pub mod special;

pub use cholesky::{backward_substitute_tr, cholesky, cholesky_solve, forward_substitute};
pub use matrix::{dot, norm2, norm_inf, Matrix};
pub use qr::{
    givens, gram_defect, qr_factor, qr_replace_column, solve_residual, QrFactors, PIVOT_TOL,
    REFACTOR_INTERVAL,
};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("basis is singular at position {position}")]
    SingularBasis { position: usize },
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("quadrature did not converge (error estimate {error_estimate:e})")]
    QuadratureFailure { error_estimate: f64 },
}

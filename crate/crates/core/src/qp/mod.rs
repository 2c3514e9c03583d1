//! Parametric quadratic programs
//! `min ½xᵀQx − η pᵀx  s.t.  Te x = te, Tl x ≤ tl, x ≥ 0`
//! solved over `η ≥ 0` by pivoting a complementary basis along the critical line.

mod evo;
mod model;
mod solve;
mod sweep;

pub use evo::{assemble_evo, EvoLayout, EvoTableau, EvoVar};
pub use model::QpModel;
pub use solve::{kkt_residual, solve_fixed_eta, FixedEtaSolution, KktPoint};
pub use sweep::{sweep, CriticalPath, SweepOptions};

use crate::simplex::LpError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("covariance matrix is not symmetric")]
    NotSymmetric,
    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("constraints admit no feasible portfolio")]
    InfeasibleModel,
    #[error("constraint rows are linearly dependent")]
    DependentConstraints,
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(&'static str),
    #[error(transparent)]
    Lp(#[from] LpError),
}

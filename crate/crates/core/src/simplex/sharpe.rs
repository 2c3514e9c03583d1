use alloc::vec;
use alloc::vec::Vec;

use super::{LpError, StandardLp};
use crate::moments::MomentSet;
use crate::numerics::Matrix;

/// Single-index parameters `r_i = a_i + b_i r_m` with market mean `a0` and spread `s0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpeModel {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub market_mean: f64,
    pub market_std: f64,
}

/// LP maximizing `η(a + a0 b)ᵀx − s0 bᵀx` over `x ≥ 0, 1ᵀx = 1`, optionally with
/// `x_i ≤ cap / n` (diversification) through slack columns.
pub fn build_sharpe_lp(
    moments: &MomentSet,
    model: &SharpeModel,
    eta: f64,
    cap: Option<f64>,
) -> Result<StandardLp, LpError> {
    let n = moments.len();
    if model.alpha.len() != n || model.beta.len() != n {
        return Err(LpError::DimensionMismatch("index model size differs from the universe"));
    }
    let score: Vec<f64> = model
        .alpha
        .iter()
        .zip(&model.beta)
        .map(|(a, b)| -(eta * (a + model.market_mean * b) - model.market_std * b))
        .collect();
    match cap {
        None => {
            let a = Matrix::from_vec(1, n, vec![1.0; n]);
            StandardLp::new(a, vec![1.0], score)
        }
        Some(kappa) => {
            if !(kappa >= 1.0) {
                return Err(LpError::DimensionMismatch("diversification cap must be at least 1"));
            }
            let mut a = Matrix::zeros(n + 1, 2 * n);
            for j in 0..n {
                a[(0, j)] = 1.0;
                a[(j + 1, j)] = 1.0;
                a[(j + 1, n + j)] = 1.0;
            }
            let mut d = vec![kappa / n as f64; n + 1];
            d[0] = 1.0;
            let mut c = score;
            c.extend(core::iter::repeat_n(0.0, n));
            StandardLp::new(a, d, c)
        }
    }
}

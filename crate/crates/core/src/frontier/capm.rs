use alloc::vec::Vec;

use super::FrontierError;
use crate::numerics::Matrix;

/// `r0 + (e_m − r0)·σ_im / v_m`
pub fn capm_expected_return(r0: f64, e_m: f64, v_m: f64, cov_im: f64) -> f64 {
    r0 + (e_m - r0) * cov_im / v_m
}

/// `E(r) = l0·1 + B·l[1..]`
pub fn apt_expected_returns(b: &Matrix, l: &[f64]) -> Result<Vec<f64>, FrontierError> {
    if l.len() != b.cols() + 1 {
        return Err(FrontierError::DimensionMismatch("premia must have one more entry than factors"));
    }
    Ok(b.mul_vec(&l[1..]).into_iter().map(|v| v + l[0]).collect())
}

use alloc::vec::Vec;

use super::matrix::Matrix;
use super::NumericsError;

/// Relative pivot tolerance for positive definiteness.
pub const CHOLESKY_TOL: f64 = 1e-13;

/// Lower-triangular `L` with `S = L Lᵀ`.
pub fn cholesky(s: &Matrix) -> Result<Matrix, NumericsError> {
    if !s.is_square() {
        return Err(NumericsError::DimensionMismatch);
    }
    let n = s.rows();
    let scale = (0..n).fold(0.0f64, |m, i| m.max(s[(i, i)].abs())).max(f64::MIN_POSITIVE);
    let tol = CHOLESKY_TOL * scale;
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > tol) {
            return Err(NumericsError::NotPositiveDefinite { pivot: j });
        }
        let d = libm::sqrt(d);
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut v = s[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / d;
        }
    }
    Ok(l)
}

/// Solves `L y = b` for lower-triangular `L`.
pub fn forward_substitute(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        let mut acc = y[i];
        for k in 0..i {
            acc -= l[(i, k)] * y[k];
        }
        y[i] = acc / l[(i, i)];
    }
    y
}

/// Solves `Lᵀ x = y` for lower-triangular `L`.
pub fn backward_substitute_tr(l: &Matrix, y: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut x = y.to_vec();
    for i in (0..n).rev() {
        let mut acc = x[i];
        for k in i + 1..n {
            acc -= l[(k, i)] * x[k];
        }
        x[i] = acc / l[(i, i)];
    }
    x
}

/// Solves `S x = b` given `S = L Lᵀ`.
pub fn cholesky_solve(l: &Matrix, b: &[f64]) -> Vec<f64> {
    backward_substitute_tr(l, &forward_substitute(l, b))
}

use alloc::vec::Vec;

use super::MomentsError;
use crate::numerics::{cholesky, forward_substitute, Matrix};

/// Moments implied by `r = a + B c` with independent residuals `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexModelMoments {
    pub er: Vec<f64>,
    pub cov: Matrix,
}

/// `E(r) = E(a) + B E(c)`, `Cov(r) = diag(Var a) + B Cov(c) Bᵀ`.
pub fn index_model_moments(
    mean_a: &[f64],
    var_a: &[f64],
    b: &Matrix,
    mean_c: &[f64],
    cov_c: &Matrix,
) -> Result<IndexModelMoments, MomentsError> {
    let (n, k) = b.shape();
    if mean_a.len() != n || var_a.len() != n || mean_c.len() != k || cov_c.shape() != (k, k) {
        return Err(MomentsError::DimensionMismatch("index model"));
    }
    let bc = b.mul_vec(mean_c);
    let er = mean_a.iter().zip(&bc).map(|(a, x)| a + x).collect();
    let mut cov = b.matmul(cov_c).matmul(&b.transpose());
    for (i, v) in var_a.iter().enumerate() {
        cov[(i, i)] += v;
    }
    Ok(IndexModelMoments { er, cov })
}

/// The same model with uncorrelated unit-variance indices `d = L⁻¹ c`,
/// where `Cov(c) = L Lᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalIndexModel {
    pub mean_a: Vec<f64>,
    pub var_a: Vec<f64>,
    /// `B L`
    pub loadings: Matrix,
    /// `E(d) = L⁻¹ E(c)`
    pub mean_d: Vec<f64>,
}

impl DiagonalIndexModel {
    pub fn new(
        mean_a: &[f64],
        var_a: &[f64],
        b: &Matrix,
        mean_c: &[f64],
        cov_c: &Matrix,
    ) -> Result<Self, MomentsError> {
        let (n, k) = b.shape();
        if mean_a.len() != n || var_a.len() != n || mean_c.len() != k || cov_c.shape() != (k, k) {
            return Err(MomentsError::DimensionMismatch("index model"));
        }
        let l = cholesky(cov_c)?;
        Ok(Self {
            mean_a: mean_a.to_vec(),
            var_a: var_a.to_vec(),
            loadings: b.matmul(&l),
            mean_d: forward_substitute(&l, mean_c),
        })
    }

    pub fn moments(&self) -> IndexModelMoments {
        let bd = self.loadings.mul_vec(&self.mean_d);
        let er = self.mean_a.iter().zip(&bd).map(|(a, x)| a + x).collect();
        let mut cov = self.loadings.matmul(&self.loadings.transpose());
        for (i, v) in self.var_a.iter().enumerate() {
            cov[(i, i)] += v;
        }
        IndexModelMoments { er, cov }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn zero_loadings_give_diagonal() {
        let m = index_model_moments(
            &[0.1, 0.2],
            &[0.01, 0.02],
            &Matrix::zeros(2, 1),
            &[0.05],
            &Matrix::from_rows(&[[0.04]]),
        )
        .unwrap();
        assert_eq!(m.er, vec![0.1, 0.2]);
        assert_eq!(m.cov, Matrix::diagonal(&[0.01, 0.02]));
    }

    #[test]
    fn single_index_entrywise() {
        let b = Matrix::from_rows(&[[1.0], [2.0], [-0.5]]);
        let m = index_model_moments(&[0.0, 0.01, 0.02], &[0.1, 0.2, 0.3], &b, &[0.05], &Matrix::from_rows(&[[0.04]]))
            .unwrap();
        for (a, b) in m.er.iter().zip([0.05, 0.11, -0.005]) {
            assert!((a - b).abs() < 1e-16);
        }
        assert!((m.cov[(0, 1)] - 0.08).abs() < 1e-16);
        assert!((m.cov[(1, 1)] - (0.2 + 0.16)).abs() < 1e-15);
        assert!((m.cov[(0, 2)] + 0.02).abs() < 1e-16);
    }

    #[test]
    fn diagonal_form_matches() {
        let b = Matrix::from_rows(&[[1.0, 0.3], [0.2, -1.0], [0.5, 0.5]]);
        let cov_c = Matrix::from_rows(&[[0.04, 0.01], [0.01, 0.09]]);
        let raw = index_model_moments(&[0.01, 0.02, 0.03], &[0.01, 0.02, 0.03], &b, &[0.05, 0.02], &cov_c).unwrap();
        let diag = DiagonalIndexModel::new(&[0.01, 0.02, 0.03], &[0.01, 0.02, 0.03], &b, &[0.05, 0.02], &cov_c)
            .unwrap()
            .moments();
        for i in 0..3 {
            assert!((raw.er[i] - diag.er[i]).abs() < 1e-12);
            for j in 0..3 {
                assert!((raw.cov[(i, j)] - diag.cov[(i, j)]).abs() < 1e-10);
            }
        }
    }
}

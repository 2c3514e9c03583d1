use alloc::string::String;
use alloc::vec::Vec;

use super::QpError;
use crate::numerics::{cholesky, dot, Matrix};

/// `min ½xᵀQx − η pᵀx  s.t.  Te x = te, Tl x ≤ tl, x ≥ 0`
#[derive(Debug, Clone, PartialEq)]
pub struct QpModel {
    q: Matrix,
    p: Vec<f64>,
    te: Matrix,
    te_rhs: Vec<f64>,
    tl: Matrix,
    tl_rhs: Vec<f64>,
    names: Vec<String>,
}

impl QpModel {
    pub fn new(
        q: Matrix,
        p: Vec<f64>,
        te: Matrix,
        te_rhs: Vec<f64>,
        tl: Matrix,
        tl_rhs: Vec<f64>,
        names: Vec<String>,
    ) -> Result<Self, QpError> {
        let n = p.len();
        let te = if te.rows() == 0 { Matrix::zeros(0, n) } else { te };
        let tl = if tl.rows() == 0 { Matrix::zeros(0, n) } else { tl };
        if n == 0 || q.shape() != (n, n) || names.len() != n {
            return Err(QpError::DimensionMismatch("Q, p and names must agree"));
        }
        if te.cols() != n || te.rows() != te_rhs.len() {
            return Err(QpError::DimensionMismatch("equality block"));
        }
        if tl.cols() != n || tl.rows() != tl_rhs.len() {
            return Err(QpError::DimensionMismatch("inequality block"));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !(finite(q.as_slice())
            && finite(&p)
            && finite(te.as_slice())
            && finite(&te_rhs)
            && finite(tl.as_slice())
            && finite(&tl_rhs))
        {
            return Err(QpError::DimensionMismatch("entries must be finite"));
        }
        if !q.is_symmetric(1e-12 * q.max_abs().max(1.0)) {
            return Err(QpError::NotSymmetric);
        }
        cholesky(&q).map_err(|_| QpError::NotPositiveDefinite)?;
        Ok(Self { q, p, te, te_rhs, tl, tl_rhs, names })
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn te(&self) -> &Matrix {
        &self.te
    }

    pub fn te_rhs(&self) -> &[f64] {
        &self.te_rhs
    }

    pub fn tl(&self) -> &Matrix {
        &self.tl
    }

    pub fn tl_rhs(&self) -> &[f64] {
        &self.tl_rhs
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// `η pᵀx − ½xᵀQx`
    pub fn utility(&self, eta: f64, x: &[f64]) -> f64 {
        eta * dot(&self.p, x) - 0.5 * self.q.quad_form(x, x)
    }

    /// Largest violation of `Te x = te`, `Tl x ≤ tl`, `x ≥ 0`.
    pub fn infeasibility(&self, x: &[f64]) -> f64 {
        let mut worst = x.iter().fold(0.0f64, |m, &v| m.max(-v));
        for (r, b) in self.te.mul_vec(x).iter().zip(&self.te_rhs) {
            worst = worst.max((r - b).abs());
        }
        for (r, b) in self.tl.mul_vec(x).iter().zip(&self.tl_rhs) {
            worst = worst.max(r - b);
        }
        worst
    }

    /// Same model with `p` scaled by `alpha`.
    pub fn with_scaled_returns(&self, alpha: f64) -> QpModel {
        QpModel { p: self.p.iter().map(|v| v * alpha).collect(), ..self.clone() }
    }
}

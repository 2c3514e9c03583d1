//! QR factorization of a basis matrix `B = Q R` that keeps only `R`.
//!
//! Solves go through the semi-normal equations `Rᵀ R z = Bᵀ b` followed by
//! one step of iterative refinement against `B` itself.

use alloc::vec;
use alloc::vec::Vec;

use super::matrix::{norm2, Matrix};
use super::NumericsError;

/// Number of column replacements after which the factors are rebuilt.
pub const REFACTOR_INTERVAL: usize = 64;

/// Relative pivot tolerance used to detect a singular basis.
pub const PIVOT_TOL: f64 = 1e-12;

/// Plane rotation `(c, s)` such that `c·x − s·y = r` and `s·x + c·y = 0`.
pub fn givens(x: f64, y: f64) -> (f64, f64) {
    if y == 0.0 {
        (1.0, 0.0)
    } else if x.abs() >= y.abs() {
        let tau = -y / x;
        let c = 1.0 / libm::sqrt(1.0 + tau * tau);
        (c, c * tau)
    } else {
        let tau = -x / y;
        let s = 1.0 / libm::sqrt(1.0 + tau * tau);
        (s * tau, s)
    }
}

/// Applies the rotation to rows `i` and `k` of `r`, columns `from..`.
fn rotate_rows(r: &mut Matrix, i: usize, k: usize, c: f64, s: f64, from: usize) {
    for j in from..r.cols() {
        let a = r[(i, j)];
        let b = r[(k, j)];
        r[(i, j)] = c * a - s * b;
        r[(k, j)] = s * a + c * b;
    }
}

#[derive(Clone, Debug)]
pub struct QrFactors {
    r: Matrix,
    basis: Vec<usize>,
    updates: usize,
}

impl QrFactors {
    /// The upper-triangular factor.
    pub fn r(&self) -> &Matrix {
        &self.r
    }

    /// Columns of the source matrix forming `B`, in factor order.
    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn updates_since_refactor(&self) -> usize {
        self.updates
    }

    fn basis_matrix(&self, a: &Matrix) -> Matrix {
        a.select(&(0..a.rows()).collect::<Vec<_>>(), &self.basis)
    }

    /// `B z` for the current basis.
    pub fn apply(&self, a: &Matrix, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.rows()];
        for (&j, &zj) in self.basis.iter().zip(z) {
            if zj != 0.0 {
                for (i, o) in out.iter_mut().enumerate() {
                    *o += a[(i, j)] * zj;
                }
            }
        }
        out
    }

    /// `Bᵀ y` for the current basis.
    pub fn apply_tr(&self, a: &Matrix, y: &[f64]) -> Vec<f64> {
        self.basis
            .iter()
            .map(|&j| (0..a.rows()).map(|i| a[(i, j)] * y[i]).sum())
            .collect()
    }

    /// Solves `Rᵀ w = v` in place.
    fn solve_rt(&self, v: &mut [f64]) {
        let m = self.dim();
        for i in 0..m {
            let mut acc = v[i];
            for k in 0..i {
                acc -= self.r[(k, i)] * v[k];
            }
            v[i] = acc / self.r[(i, i)];
        }
    }

    /// Solves `R w = v` in place.
    fn solve_r(&self, v: &mut [f64]) {
        let m = self.dim();
        for i in (0..m).rev() {
            let mut acc = v[i];
            for k in i + 1..m {
                acc -= self.r[(i, k)] * v[k];
            }
            v[i] = acc / self.r[(i, i)];
        }
    }

    fn seminormal(&self, a: &Matrix, b: &[f64]) -> Vec<f64> {
        let mut z = self.apply_tr(a, b);
        self.solve_rt(&mut z);
        self.solve_r(&mut z);
        z
    }

    fn seminormal_tr(&self, a: &Matrix, c: &[f64]) -> Vec<f64> {
        let mut w = c.to_vec();
        self.solve_rt(&mut w);
        self.solve_r(&mut w);
        self.apply(a, &w)
    }

    /// Solves `B z = b`.
    pub fn solve(&self, a: &Matrix, b: &[f64]) -> Vec<f64> {
        let mut z = self.seminormal(a, b);
        let bz = self.apply(a, &z);
        let res: Vec<f64> = b.iter().zip(&bz).map(|(x, y)| x - y).collect();
        let dz = self.seminormal(a, &res);
        z.iter_mut().zip(&dz).for_each(|(z, d)| *z += d);
        z
    }

    /// Solves `Bᵀ y = c`.
    pub fn solve_tr(&self, a: &Matrix, c: &[f64]) -> Vec<f64> {
        let mut y = self.seminormal_tr(a, c);
        let bty = self.apply_tr(a, &y);
        let res: Vec<f64> = c.iter().zip(&bty).map(|(x, y)| x - y).collect();
        let dy = self.seminormal_tr(a, &res);
        y.iter_mut().zip(&dy).for_each(|(y, d)| *y += d);
        y
    }

    fn check_pivots(&self, a: &Matrix) -> Result<(), NumericsError> {
        let scale = self
            .basis
            .iter()
            .map(|&j| norm2(&a.col(j)))
            .fold(0.0f64, f64::max);
        let tol = PIVOT_TOL * scale.max(f64::MIN_POSITIVE);
        for i in 0..self.dim() {
            if !(self.r[(i, i)].abs() > tol) {
                return Err(NumericsError::SingularBasis { position: i });
            }
        }
        Ok(())
    }
}

/// Factors the square matrix formed by `basis` columns of `a`.
pub fn qr_factor(a: &Matrix, basis: &[usize]) -> Result<QrFactors, NumericsError> {
    let m = a.rows();
    if basis.len() != m {
        return Err(NumericsError::DimensionMismatch);
    }
    if basis.iter().any(|&j| j >= a.cols()) {
        return Err(NumericsError::DimensionMismatch);
    }
    let mut f = QrFactors { r: Matrix::zeros(m, m), basis: basis.to_vec(), updates: 0 };
    let mut r = f.basis_matrix(a);
    for j in 0..m {
        for i in (j + 1..m).rev() {
            if r[(i, j)] != 0.0 {
                let (c, s) = givens(r[(i - 1, j)], r[(i, j)]);
                rotate_rows(&mut r, i - 1, i, c, s, j);
                r[(i, j)] = 0.0;
            }
        }
    }
    f.r = r;
    f.check_pivots(a)?;
    Ok(f)
}

/// Removes the column at `position` and appends column `entering` of `a`.
///
/// The basis order shifts: columns after `position` move one slot left and
/// the entering column becomes the last one.
pub fn qr_replace_column(
    f: &QrFactors,
    a: &Matrix,
    position: usize,
    entering: usize,
) -> Result<QrFactors, NumericsError> {
    let m = f.dim();
    if position >= m || entering >= a.cols() {
        return Err(NumericsError::DimensionMismatch);
    }
    let mut basis = f.basis.clone();
    basis.remove(position);
    basis.push(entering);
    if f.updates + 1 >= REFACTOR_INTERVAL {
        return qr_factor(a, &basis);
    }

    // Qᵀ a_e = R⁻ᵀ Bᵀ a_e
    let mut x = f.apply_tr(a, &a.col(entering));
    f.solve_rt(&mut x);

    let mut r = Matrix::zeros(m, m);
    for i in 0..m {
        let mut c = 0;
        for j in 0..m {
            if j == position {
                continue;
            }
            r[(i, c)] = f.r[(i, j)];
            c += 1;
        }
        r[(i, m - 1)] = x[i];
    }
    for j in position..m.saturating_sub(1) {
        let (c, s) = givens(r[(j, j)], r[(j + 1, j)]);
        rotate_rows(&mut r, j, j + 1, c, s, j);
        r[(j + 1, j)] = 0.0;
    }
    let out = QrFactors { r, basis, updates: f.updates + 1 };
    out.check_pivots(a)?;
    Ok(out)
}

/// Residual `‖B z − b‖∞` helper used by callers that want to audit a solve.
pub fn solve_residual(f: &QrFactors, a: &Matrix, z: &[f64], b: &[f64]) -> f64 {
    let bz = f.apply(a, z);
    bz.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// `‖Rᵀ R − Bᵀ B‖∞`, useful for checking factor consistency.
pub fn gram_defect(f: &QrFactors, a: &Matrix) -> f64 {
    let b = f.basis_matrix(a);
    let btb = b.transpose().matmul(&b);
    let rtr = f.r.transpose().matmul(&f.r);
    let mut worst = 0.0f64;
    for i in 0..f.dim() {
        for j in 0..f.dim() {
            worst = worst.max((btb[(i, j)] - rtr[(i, j)]).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn givens_three_four() {
        let (c, s) = givens(3.0, 4.0);
        assert!((c + 0.6).abs() < 1e-15 && (s - 0.8).abs() < 1e-15);
        assert!((c * 3.0 - s * 4.0 + 5.0).abs() < 1e-14);
        assert!((s * 3.0 + c * 4.0).abs() < 1e-15);
        assert_eq!(givens(2.0, 0.0), (1.0, 0.0));
        let (c, s) = givens(1e300, 1e300);
        assert!((c * c + s * s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn factor_and_solve_small() {
        let a = Matrix::from_rows(&[[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]]);
        let f = qr_factor(&a, &[0, 1, 2]).unwrap();
        let z = f.solve(&a, &[3.0, 5.0, 5.0]);
        for (zi, e) in z.iter().zip([1.0, 1.0, 1.0]) {
            assert!((zi - e).abs() < 1e-14);
        }
        let y = f.solve_tr(&a, &[3.0, 5.0, 5.0]);
        let aty = a.tr_mul_vec(&y);
        for (v, e) in aty.iter().zip([3.0, 5.0, 5.0]) {
            assert!((v - e).abs() < 1e-13);
        }
        assert!(gram_defect(&f, &a) < 1e-13);
    }

    #[test]
    fn singular_basis_detected() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        assert!(matches!(qr_factor(&a, &[0, 1]), Err(NumericsError::SingularBasis { .. })));
        let a = Matrix::from_rows(&[[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]);
        let f = qr_factor(&a, &[0, 1]).unwrap();
        assert!(matches!(
            qr_replace_column(&f, &a, 1, 2),
            Err(NumericsError::SingularBasis { .. })
        ));
    }

    #[test]
    fn replace_moves_entering_last() {
        let a = Matrix::from_rows(&[[1.0, 0.0, 1.0, 2.0], [0.0, 1.0, 1.0, -1.0]]);
        let f = qr_factor(&a, &[0, 1]).unwrap();
        let g = qr_replace_column(&f, &a, 0, 3).unwrap();
        assert_eq!(g.basis(), &[1, 3]);
        assert!(gram_defect(&g, &a) < 1e-14);
        let z = g.solve(&a, &[2.0, -1.0]);
        assert!(z[0].abs() < 1e-14 && (z[1] - 1.0).abs() < 1e-14);
    }
}

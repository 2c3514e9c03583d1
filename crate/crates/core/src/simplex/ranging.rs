use super::BasisState;
use crate::numerics::Matrix;

/// Interval of `η` over which a basis stays feasible for right-hand side `t + η p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhsRange {
    pub eta_lo: f64,
    pub eta_hi: f64,
    /// Basis position that blocks at `eta_lo`.
    pub leaving_lo: Option<usize>,
    /// Basis position that blocks at `eta_hi`.
    pub leaving_hi: Option<usize>,
}

/// Critical values `η_j = −t̃_j / p̃_j` with `t̃ = B⁻¹t`, `p̃ = B⁻¹p`.
pub fn parametric_rhs_range(a: &Matrix, basis: &BasisState, t: &[f64], p: &[f64]) -> RhsRange {
    let tt = basis.solve(a, t);
    let pt = basis.solve(a, p);
    let scale = pt.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * (1.0 + scale);
    let mut out = RhsRange {
        eta_lo: f64::NEG_INFINITY,
        eta_hi: f64::INFINITY,
        leaving_lo: None,
        leaving_hi: None,
    };
    for (j, (&tj, &pj)) in tt.iter().zip(&pt).enumerate() {
        if pj < -tol {
            let eta = -tj / pj;
            if eta < out.eta_hi {
                out.eta_hi = eta;
                out.leaving_hi = Some(j);
            }
        } else if pj > tol {
            let eta = -tj / pj;
            if eta > out.eta_lo {
                out.eta_lo = eta;
                out.leaving_lo = Some(j);
            }
        }
    }
    out
}

//! Revised simplex for `min c·x  s.t.  A x = d, x ≥ 0` over a QR-factored basis.

mod phase1;
mod ranging;
mod sharpe;

use alloc::vec;
use alloc::vec::Vec;

use crate::numerics::{dot, qr_factor, qr_replace_column, Matrix, NumericsError, QrFactors};

pub use phase1::{phase1, solve, FeasibleStart};
pub use ranging::{parametric_rhs_range, RhsRange};
pub use sharpe::{build_sharpe_lp, SharpeModel};

/// Primal feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-9;
/// Reduced-cost optimality tolerance.
pub const OPT_TOL: f64 = 1e-9;
/// Smallest admissible pivot element in the ratio test.
pub const PIVOT_ELEM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("basis is singular at position {position}")]
    SingularBasis { position: usize },
    #[error("iteration cap of {iterations} reached")]
    CycleLimit { iterations: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("starting basis is not primal feasible")]
    InfeasibleStart,
    #[error("problem is infeasible (auxiliary optimum {residual:e})")]
    Infeasible { residual: f64 },
}

impl From<NumericsError> for LpError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::SingularBasis { position } => LpError::SingularBasis { position },
            _ => LpError::DimensionMismatch("factorization"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp {
    pub a: Matrix,
    pub d: Vec<f64>,
    pub c: Vec<f64>,
}

impl StandardLp {
    pub fn new(a: Matrix, d: Vec<f64>, c: Vec<f64>) -> Result<Self, LpError> {
        if d.len() != a.rows() {
            return Err(LpError::DimensionMismatch("d must have one entry per row"));
        }
        if c.len() != a.cols() {
            return Err(LpError::DimensionMismatch("c must have one entry per column"));
        }
        if a.rows() > a.cols() {
            return Err(LpError::DimensionMismatch("more rows than columns"));
        }
        Ok(Self { a, d, c })
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    /// The same problem keeping only the listed rows.
    pub fn restrict_rows(&self, rows: &[usize]) -> StandardLp {
        let cols: Vec<usize> = (0..self.cols()).collect();
        StandardLp {
            a: self.a.select(rows, &cols),
            d: rows.iter().map(|&i| self.d[i]).collect(),
            c: self.c.clone(),
        }
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        dot(&self.c, x)
    }

    /// `‖A x − d‖∞`
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.a
            .mul_vec(x)
            .iter()
            .zip(&self.d)
            .fold(0.0, |m, (ax, d)| m.max((ax - d).abs()))
    }
}

/// A basis `B` of `m` columns together with its factors.
#[derive(Debug, Clone)]
pub struct BasisState {
    factors: QrFactors,
    position: Vec<Option<usize>>,
}

impl BasisState {
    pub fn new(a: &Matrix, basic: &[usize]) -> Result<Self, LpError> {
        let factors = qr_factor(a, basic)?;
        Ok(Self::from_factors(factors, a.cols()))
    }

    fn from_factors(factors: QrFactors, n: usize) -> Self {
        let mut position = vec![None; n];
        for (p, &j) in factors.basis().iter().enumerate() {
            position[j] = Some(p);
        }
        Self { factors, position }
    }

    pub fn basic(&self) -> &[usize] {
        self.factors.basis()
    }

    pub fn residual(&self) -> Vec<usize> {
        (0..self.position.len()).filter(|&j| self.position[j].is_none()).collect()
    }

    pub fn is_basic(&self, j: usize) -> bool {
        self.position.get(j).is_some_and(Option::is_some)
    }

    pub fn position_of(&self, j: usize) -> Option<usize> {
        self.position.get(j).copied().flatten()
    }

    pub fn factors(&self) -> &QrFactors {
        &self.factors
    }

    /// `B⁻¹ v`
    pub fn solve(&self, a: &Matrix, v: &[f64]) -> Vec<f64> {
        self.factors.solve(a, v)
    }

    /// `B⁻ᵀ v`
    pub fn solve_tr(&self, a: &Matrix, v: &[f64]) -> Vec<f64> {
        self.factors.solve_tr(a, v)
    }

    /// Basic values `x_b = B⁻¹ d`.
    pub fn values(&self, lp: &StandardLp) -> Vec<f64> {
        self.solve(&lp.a, &lp.d)
    }

    /// Full primal vector for the basic solution.
    pub fn primal(&self, lp: &StandardLp) -> Vec<f64> {
        let mut x = vec![0.0; lp.cols()];
        for (&j, v) in self.basic().iter().zip(self.values(lp)) {
            x[j] = v;
        }
        x
    }

    /// Replaces the column at basis position `position` with `entering`.
    pub fn pivot(&mut self, a: &Matrix, position: usize, entering: usize) -> Result<(), LpError> {
        let factors = qr_replace_column(&self.factors, a, position, entering)?;
        *self = Self::from_factors(factors, a.cols());
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnteringRule {
    /// Largest `z_j = c_b B⁻¹ a_j − c_j`, i.e. the most negative classical reduced cost.
    #[default]
    MostPositive,
    /// First improving column by index.
    FirstIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// `y' = c_b B⁻¹`
    pub duals: Vec<f64>,
    /// `z_j = y' a_j − c_j` over `residual`, in that order.
    pub reduced_costs: Vec<f64>,
    pub residual: Vec<usize>,
    pub status: LpStatus,
    pub iterations: usize,
    /// Direction of unboundedness when `status` is `Unbounded`.
    pub ray: Option<Vec<f64>>,
    pub basis: BasisState,
}

/// Returns `true` when column `j` must not enter the given basis.
pub type PivotVeto<'a> = &'a dyn Fn(usize, &BasisState) -> bool;

/// Simplex iterations from a primal feasible basis.
pub fn simplex_solve(
    lp: &StandardLp,
    start: BasisState,
    rule: EnteringRule,
    veto: Option<PivotVeto<'_>>,
) -> Result<LpSolution, LpError> {
    let (m, n) = (lp.rows(), lp.cols());
    if start.basic().len() != m || start.position.len() != n {
        return Err(LpError::DimensionMismatch("basis does not match problem"));
    }
    let cap = 50 * (n + m);
    let bland_after = 3 * (n + m);
    let mut basis = start;
    let mut stall = 0usize;
    let mut bland = false;
    let mut iterations = 0usize;

    {
        let xb = basis.values(lp);
        let scale = 1.0 + xb.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if xb.iter().any(|&v| v < -FEAS_TOL * scale) {
            return Err(LpError::InfeasibleStart);
        }
    }

    loop {
        let xb: Vec<f64> = basis.values(lp).into_iter().map(|v| v.max(0.0)).collect();
        let cb: Vec<f64> = basis.basic().iter().map(|&j| lp.c[j]).collect();
        let y = basis.solve_tr(&lp.a, &cb);
        let residual = basis.residual();
        let z: Vec<f64> = residual
            .iter()
            .map(|&j| (0..m).map(|i| y[i] * lp.a[(i, j)]).sum::<f64>() - lp.c[j])
            .collect();

        let mut entering: Option<(usize, f64)> = None;
        for (&j, &zj) in residual.iter().zip(&z) {
            if zj <= OPT_TOL || veto.is_some_and(|v| v(j, &basis)) {
                continue;
            }
            match (rule, bland) {
                (EnteringRule::FirstIndex, _) | (_, true) => {
                    entering = Some((j, zj));
                    break;
                }
                (EnteringRule::MostPositive, false) => {
                    if entering.is_none_or(|(_, best)| zj > best) {
                        entering = Some((j, zj));
                    }
                }
            }
        }

        let Some((j, zj)) = entering else {
            let mut x = vec![0.0; n];
            for (&b, &v) in basis.basic().iter().zip(&xb) {
                x[b] = v;
            }
            return Ok(LpSolution {
                value: lp.objective(&x),
                x,
                duals: y,
                reduced_costs: z,
                residual,
                status: LpStatus::Optimal,
                iterations,
                ray: None,
                basis,
            });
        };

        let col = basis.solve(&lp.a, &lp.a.col(j));
        let mut leave: Option<(usize, f64, f64)> = None;
        for (p, (&ci, &xi)) in col.iter().zip(&xb).enumerate() {
            if ci <= PIVOT_ELEM_TOL {
                continue;
            }
            let t = xi / ci;
            let better = match leave {
                None => true,
                Some((q, tq, cq)) => {
                    if t < tq - 1e-12 * (1.0 + tq.abs()) {
                        true
                    } else if t <= tq + 1e-12 * (1.0 + tq.abs()) {
                        if bland {
                            basis.basic()[p] < basis.basic()[q]
                        } else {
                            ci > cq
                        }
                    } else {
                        false
                    }
                }
            };
            if better {
                leave = Some((p, t, ci));
            }
        }

        let Some((p, t, _)) = leave else {
            let mut ray = vec![0.0; n];
            ray[j] = 1.0;
            for (&b, &ci) in basis.basic().iter().zip(&col) {
                ray[b] = -ci;
            }
            let mut x = vec![0.0; n];
            for (&b, &v) in basis.basic().iter().zip(&xb) {
                x[b] = v;
            }
            return Ok(LpSolution {
                value: f64::NEG_INFINITY,
                x,
                duals: y,
                reduced_costs: z,
                residual,
                status: LpStatus::Unbounded,
                iterations,
                ray: Some(ray),
                basis,
            });
        };

        if zj * t > 1e-12 {
            stall = 0;
        } else {
            stall += 1;
            if stall >= bland_after && !bland {
                log::debug!("switching to Bland's rule after {stall} degenerate pivots");
                bland = true;
            }
        }
        basis.pivot(&lp.a, p, j)?;
        iterations += 1;
        if iterations >= cap {
            return Err(LpError::CycleLimit { iterations });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_example() -> StandardLp {
        StandardLp::new(
            Matrix::from_rows(&[[1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0]]),
            vec![1.0, 1.0],
            vec![-1.0, -1.0, 0.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn worked_example_from_slack_basis() {
        let lp = worked_example();
        let start = BasisState::new(&lp.a, &[2, 3]).unwrap();
        let sol = simplex_solve(&lp, start, EnteringRule::default(), None).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.x, vec![1.0, 1.0, 0.0, 0.0]);
        assert_eq!(sol.value, -2.0);
        assert!(sol.iterations <= 3);
        assert!((dot(&sol.duals, &lp.d) - sol.value).abs() < 1e-12);
        assert!(sol.reduced_costs.iter().all(|&z| z <= OPT_TOL));
    }

    #[test]
    fn first_index_rule_agrees() {
        let lp = worked_example();
        let start = BasisState::new(&lp.a, &[2, 3]).unwrap();
        let sol = simplex_solve(&lp, start, EnteringRule::FirstIndex, None).unwrap();
        assert_eq!(sol.value, -2.0);
    }

    #[test]
    fn zero_cost_is_immediately_optimal() {
        let mut lp = worked_example();
        lp.c = vec![0.0; 4];
        let start = BasisState::new(&lp.a, &[2, 3]).unwrap();
        let sol = simplex_solve(&lp, start, EnteringRule::default(), None).unwrap();
        assert_eq!(sol.iterations, 0);
        assert_eq!(sol.value, 0.0);
    }

    #[test]
    fn veto_blocks_column() {
        let lp = worked_example();
        let start = BasisState::new(&lp.a, &[2, 3]).unwrap();
        let veto = |j: usize, _: &BasisState| j == 0;
        let sol = simplex_solve(&lp, start, EnteringRule::default(), Some(&veto)).unwrap();
        assert_eq!(sol.x, vec![0.0, 1.0, 1.0, 0.0]);
        assert_eq!(sol.value, -1.0);
    }

    #[test]
    fn unbounded_ray() {
        // min -x1  s.t. x1 - x2 = 1
        let lp = StandardLp::new(Matrix::from_rows(&[[1.0, -1.0]]), vec![1.0], vec![-1.0, 0.0])
            .unwrap();
        let start = BasisState::new(&lp.a, &[0]).unwrap();
        let sol = simplex_solve(&lp, start, EnteringRule::default(), None).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
        let ray = sol.ray.unwrap();
        assert!(lp.a.mul_vec(&ray)[0].abs() < 1e-12);
        assert!(lp.objective(&ray) < 0.0);
    }

    #[test]
    fn infeasible_start_rejected() {
        let lp = StandardLp::new(Matrix::from_rows(&[[1.0, 1.0]]), vec![-1.0], vec![0.0, 0.0])
            .unwrap();
        let start = BasisState::new(&lp.a, &[0]).unwrap();
        assert!(matches!(
            simplex_solve(&lp, start, EnteringRule::default(), None),
            Err(LpError::InfeasibleStart)
        ));
    }
}

use alloc::vec::Vec;

use super::{simplex_solve, BasisState, EnteringRule, LpError, LpSolution, StandardLp};
use crate::numerics::{dot, Matrix};

/// A feasible basis, possibly for a reduced problem with redundant rows dropped.
#[derive(Debug, Clone)]
pub struct FeasibleStart {
    pub basis: BasisState,
    /// Rows of the original problem the basis refers to, in order.
    pub kept_rows: Vec<usize>,
}

impl FeasibleStart {
    pub fn dropped_any(&self, lp: &StandardLp) -> bool {
        self.kept_rows.len() != lp.rows()
    }
}

/// Finds a feasible basis by minimizing the sum of artificial variables.
pub fn phase1(lp: &StandardLp) -> Result<FeasibleStart, LpError> {
    let (m, n) = (lp.rows(), lp.cols());
    let mut a = Matrix::zeros(m, n + m);
    for i in 0..m {
        a.row_mut(i)[..n].copy_from_slice(lp.a.row(i));
        a[(i, n + i)] = if lp.d[i] < 0.0 { -1.0 } else { 1.0 };
    }
    let mut c = alloc::vec![0.0; n + m];
    c[n..].iter_mut().for_each(|v| *v = 1.0);
    let aux = StandardLp { a, d: lp.d.clone(), c };
    let start = BasisState::new(&aux.a, &(n..n + m).collect::<Vec<_>>())?;
    let sol = simplex_solve(&aux, start, EnteringRule::default(), None)?;
    let scale = 1.0 + lp.d.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    if sol.value > 1e-9 * scale {
        return Err(LpError::Infeasible { residual: sol.value });
    }

    let mut basis = sol.basis;
    let mut redundant: Vec<usize> = Vec::new();
    while let Some(p) = basis
        .basic()
        .iter()
        .position(|&j| j >= n && !redundant.contains(&(j - n)))
    {
        let mut e = alloc::vec![0.0; m];
        e[p] = 1.0;
        let w = basis.solve_tr(&aux.a, &e);
        let mut best: Option<(usize, f64)> = None;
        for j in (0..n).filter(|&j| !basis.is_basic(j)) {
            let alpha = dot(&w, &aux.a.col(j)).abs();
            if alpha > 1e-9 && best.is_none_or(|(_, b)| alpha > b) {
                best = Some((j, alpha));
            }
        }
        match best {
            // degenerate pivot: the artificial sits at zero
            Some((j, _)) => basis.pivot(&aux.a, p, j)?,
            None => redundant.push(basis.basic()[p] - n),
        }
    }

    if redundant.is_empty() {
        let cols: Vec<usize> = basis.basic().to_vec();
        return Ok(FeasibleStart { basis: BasisState::new(&lp.a, &cols)?, kept_rows: (0..m).collect() });
    }
    for &r in &redundant {
        log::warn!("RedundantRow: constraint row {r} is a combination of the others and was dropped");
    }
    let kept_rows: Vec<usize> = (0..m).filter(|i| !redundant.contains(i)).collect();
    let reduced = lp.restrict_rows(&kept_rows);
    let cols: Vec<usize> = basis.basic().iter().copied().filter(|&j| j < n).collect();
    Ok(FeasibleStart { basis: BasisState::new(&reduced.a, &cols)?, kept_rows })
}

/// Phase 1 followed by phase 2 with the default entering rule.
pub fn solve(lp: &StandardLp) -> Result<LpSolution, LpError> {
    let start = phase1(lp)?;
    if start.dropped_any(lp) {
        let reduced = lp.restrict_rows(&start.kept_rows);
        let mut sol = simplex_solve(&reduced, start.basis, EnteringRule::default(), None)?;
        let mut duals = alloc::vec![0.0; lp.rows()];
        for (&i, &y) in start.kept_rows.iter().zip(&sol.duals) {
            duals[i] = y;
        }
        sol.duals = duals;
        Ok(sol)
    } else {
        simplex_solve(lp, start.basis, EnteringRule::default(), None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::LpStatus;
    use alloc::vec;

    #[test]
    fn identity_columns_need_no_work() {
        let lp = StandardLp::new(
            Matrix::from_rows(&[[1.0, 0.0, 2.0], [0.0, 1.0, 3.0]]),
            vec![2.0, 1.0],
            vec![0.0, 0.0, -1.0],
        )
        .unwrap();
        let start = phase1(&lp).unwrap();
        let x = start.basis.primal(&lp);
        assert!(lp.residual(&x) < 1e-12);
        assert!(x.iter().all(|&v| v >= -1e-12));
    }

    #[test]
    fn contradictory_rows_infeasible() {
        let lp = StandardLp::new(
            Matrix::from_rows(&[[1.0, 0.0], [1.0, 0.0]]),
            vec![1.0, 2.0],
            vec![0.0, 0.0],
        )
        .unwrap();
        assert!(matches!(phase1(&lp), Err(LpError::Infeasible { .. })));
    }

    #[test]
    fn redundant_row_dropped() {
        let lp = StandardLp::new(
            Matrix::from_rows(&[[1.0, 1.0, 0.0], [2.0, 2.0, 0.0], [0.0, 1.0, 1.0]]),
            vec![1.0, 2.0, 1.0],
            vec![1.0, 2.0, 0.0],
        )
        .unwrap();
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(lp.residual(&sol.x) < 1e-12);
        assert!((sol.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs() {
        // x1 - x2 = -1, min x1 + x2 → x = (0, 1)
        let lp = StandardLp::new(Matrix::from_rows(&[[1.0, -1.0]]), vec![-1.0], vec![1.0, 1.0])
            .unwrap();
        let sol = solve(&lp).unwrap();
        assert!((sol.x[1] - 1.0).abs() < 1e-12 && sol.x[0].abs() < 1e-12);
    }
}

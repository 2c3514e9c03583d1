use alloc::vec;
use alloc::vec::Vec;

use super::evo::{EvoLayout, EvoVar};
use super::solve::{moments_of, solve_fixed_eta, KktPoint};
use super::{QpError, QpModel};
use crate::numerics::{norm_inf, Matrix};
use crate::simplex::BasisState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Where an unbounded last segment is cut off.
    pub eta_max: f64,
    /// Cap on recorded critical points.
    pub max_points: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { eta_max: 1e6, max_points: 10_000 }
    }
}

/// Piecewise-linear path of optimal portfolios over `η ∈ [0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPath {
    /// Critical values, starting at 0. When `open_ended`, the last entry is `eta_max`.
    pub etas: Vec<f64>,
    pub portfolios: Vec<Vec<f64>>,
    /// `pᵀx` at each critical value.
    pub e: Vec<f64>,
    /// `xᵀQx` at each critical value.
    pub v: Vec<f64>,
    /// `x_kᵀQx_{k+1}` for each segment.
    pub cross: Vec<f64>,
    pub open_ended: bool,
    /// Solutions at both ends of each segment, computed from the basis valid on it.
    pub segments: Vec<(KktPoint, KktPoint)>,
    /// Final basis at the last critical value and one unit beyond, for closed paths.
    pub tail: Option<(KktPoint, KktPoint)>,
}

impl CriticalPath {
    pub fn len(&self) -> usize {
        self.etas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.etas.is_empty()
    }

    /// Interpolated solution at `eta`, or `None` for `eta < 0` or beyond an open end.
    pub fn point_at(&self, eta: f64) -> Option<KktPoint> {
        if !(eta >= 0.0) {
            return None;
        }
        let last = *self.etas.last()?;
        if eta >= last {
            if let Some((a, b)) = &self.tail {
                return Some(a.lerp(b, eta - a.eta));
            }
            if eta > last {
                return None;
            }
        }
        let k = self.etas.partition_point(|&e| e <= eta).saturating_sub(1);
        let k = k.min(self.segments.len().saturating_sub(1));
        let (a, b) = self.segments.get(k)?;
        let width = b.eta - a.eta;
        let lambda = if width > 0.0 { ((eta - a.eta) / width).clamp(0.0, 1.0) } else { 0.0 };
        Some(a.lerp(b, lambda))
    }
}

struct Ranging {
    tt: Vec<f64>,
    pp: Vec<f64>,
}

impl Ranging {
    fn new(a: &Matrix, b: &BasisState, t: &[f64], dir: &[f64]) -> Self {
        Self { tt: b.solve(a, t), pp: b.solve(a, dir) }
    }

    fn point(&self, layout: &EvoLayout, b: &BasisState, eta: f64) -> KktPoint {
        let mut full = vec![0.0; layout.cols()];
        for (p, &j) in b.basic().iter().enumerate() {
            full[j] = self.tt[p] + eta * self.pp[p];
        }
        KktPoint::from_columns(layout, &full, eta)
    }

    /// First non-free basic variable to hit zero as `η` grows from `eta`.
    fn blocking(&self, layout: &EvoLayout, b: &BasisState, eta: f64) -> Option<(usize, f64)> {
        let tol = 1e-12 * (1.0 + norm_inf(&self.pp));
        let mut best: Option<(usize, f64, f64)> = None;
        for (p, &j) in b.basic().iter().enumerate() {
            if layout.is_free(j) || self.pp[p] >= -tol {
                continue;
            }
            let at = (-self.tt[p] / self.pp[p]).max(eta);
            let better = match best {
                None => true,
                Some((_, e, q)) => {
                    let tie = 1e-12 * (1.0 + e.abs());
                    at < e - tie || (at <= e + tie && self.pp[p] < q)
                }
            };
            if better {
                best = Some((p, at, self.pp[p]));
            }
        }
        best.map(|(p, e, _)| (p, e))
    }

    fn x_moves(&self, layout: &EvoLayout, b: &BasisState) -> bool {
        let scale = 1.0 + norm_inf(&self.tt);
        b.basic()
            .iter()
            .zip(&self.pp)
            .any(|(&j, &v)| matches!(layout.var(j), EvoVar::X(_)) && v.abs() > 1e-12 * scale)
    }

    fn feasible_at(&self, layout: &EvoLayout, b: &BasisState, eta: f64) -> bool {
        let scale = 1.0 + norm_inf(&self.tt) + eta * norm_inf(&self.pp);
        b.basic()
            .iter()
            .enumerate()
            .all(|(p, &j)| layout.is_free(j) || self.tt[p] + eta * self.pp[p] >= -1e-9 * scale)
    }
}

/// Traces the critical line from `η = 0`.
pub fn sweep(m: &QpModel, opts: SweepOptions) -> Result<CriticalPath, QpError> {
    let first = solve_fixed_eta(m, 0.0)?;
    let layout = first.tableau.layout.clone();
    let a = first.tableau.lp.a.clone();
    let (t, dir) = (first.tableau.t.clone(), first.tableau.dir.clone());
    let rows = layout.rows();

    let mut basis = first.basis;
    let mut rng = Ranging::new(&a, &basis, &t, &dir);
    let mut eta = 0.0f64;
    let mut seg_start = rng.point(&layout, &basis, eta);
    let mut etas = vec![0.0];
    let mut segments: Vec<(KktPoint, KktPoint)> = Vec::new();
    let mut zero_steps = 0usize;
    let mut open_ended = false;
    let mut tail = None;

    loop {
        if etas.len() > opts.max_points {
            return Err(QpError::NumericalBreakdown("too many critical points"));
        }
        let block = rng.blocking(&layout, &basis, eta);
        let next = match block {
            Some((_, e)) if e <= opts.eta_max => block,
            _ => None,
        };
        let Some((p, eta_next)) = next else {
            if !rng.x_moves(&layout, &basis) {
                tail = Some((rng.point(&layout, &basis, eta), rng.point(&layout, &basis, eta + 1.0)));
            } else {
                let end = rng.point(&layout, &basis, opts.eta_max);
                segments.push((seg_start.clone(), end));
                etas.push(opts.eta_max);
                open_ended = true;
            }
            break;
        };

        let dedup = 1e-9 * (1.0 + eta);
        let zero_length = eta_next - eta <= dedup;
        if !zero_length {
            let end = rng.point(&layout, &basis, eta_next);
            segments.push((seg_start.clone(), end));
            etas.push(eta_next);
            eta = eta_next;
            zero_steps = 0;
        } else {
            zero_steps += 1;
        }

        let leaving = basis.basic()[p];
        let entering = layout.complement(leaving);
        let pivoted = match entering {
            Some(c) if zero_steps <= 2 * rows => {
                let col = basis.solve(&a, &a.col(c));
                col[p].abs() > 1e-9 && basis.pivot(&a, p, c).is_ok()
            }
            _ => false,
        };

        if pivoted {
            rng = Ranging::new(&a, &basis, &t, &dir);
            seg_start = rng.point(&layout, &basis, eta);
            continue;
        }

        log::debug!("critical line pivot failed at eta {eta:e}; re-solving");
        let eps = 1e-7 * (1.0 + eta);
        let fresh = solve_fixed_eta(m, eta + eps)?;
        basis = BasisState::new(&a, fresh.basis.basic())?;
        rng = Ranging::new(&a, &basis, &t, &dir);
        zero_steps = 0;
        if rng.feasible_at(&layout, &basis, eta) {
            seg_start = rng.point(&layout, &basis, eta);
        } else {
            let end = rng.point(&layout, &basis, eta + eps);
            segments.push((seg_start.clone(), end.clone()));
            eta += eps;
            etas.push(eta);
            seg_start = end;
        }
    }

    let mut portfolios: Vec<Vec<f64>> = Vec::with_capacity(etas.len());
    match segments.first() {
        Some((a, _)) => portfolios.push(a.x.clone()),
        None => portfolios.push(tail.as_ref().map_or_else(|| seg_start.x.clone(), |(a, _)| a.x.clone())),
    }
    for (_, b) in &segments {
        portfolios.push(b.x.clone());
    }
    let (e, v): (Vec<f64>, Vec<f64>) = portfolios.iter().map(|x| moments_of(m, x)).unzip();
    let cross = portfolios.windows(2).map(|w| m.q().quad_form(&w[0], &w[1])).collect();
    Ok(CriticalPath { etas, portfolios, e, v, cross, open_ended, segments, tail })
}

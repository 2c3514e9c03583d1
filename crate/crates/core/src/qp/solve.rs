use alloc::vec;
use alloc::vec::Vec;

use super::evo::{assemble_evo, EvoLayout, EvoTableau, EvoVar};
use super::{QpError, QpModel};
use crate::numerics::{dot, norm_inf};
use crate::simplex::{simplex_solve, BasisState, EnteringRule, LpError, StandardLp};

/// Primal and dual values of the optimality system at one `η`.
#[derive(Debug, Clone, PartialEq)]
pub struct KktPoint {
    pub eta: f64,
    pub x: Vec<f64>,
    /// Multipliers of `Tl x ≤ tl`.
    pub l: Vec<f64>,
    /// Multipliers of `Te x = te` (free).
    pub mu: Vec<f64>,
    /// Multipliers of `x ≥ 0`.
    pub s: Vec<f64>,
    /// `tl − Tl x`
    pub slack: Vec<f64>,
}

impl KktPoint {
    pub(crate) fn from_columns(layout: &EvoLayout, full: &[f64], eta: f64) -> Self {
        let pick = |f: fn(usize) -> EvoVar, len: usize| -> Vec<f64> {
            (0..len).map(|i| full[layout.col(f(i))].max(0.0)).collect()
        };
        let mu = (0..layout.me)
            .map(|j| full[layout.col(EvoVar::Ep(j))] - full[layout.col(EvoVar::En(j))])
            .collect();
        KktPoint {
            eta,
            x: pick(EvoVar::X, layout.n),
            l: pick(EvoVar::L, layout.ml),
            mu,
            s: pick(EvoVar::S, layout.n),
            slack: pick(EvoVar::Yl, layout.ml),
        }
    }

    /// `(1 − λ) self + λ other`
    pub fn lerp(&self, other: &KktPoint, lambda: f64) -> KktPoint {
        let mix = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(u, v)| (1.0 - lambda) * u + lambda * v).collect()
        };
        KktPoint {
            eta: (1.0 - lambda) * self.eta + lambda * other.eta,
            x: mix(&self.x, &other.x),
            l: mix(&self.l, &other.l),
            mu: mix(&self.mu, &other.mu),
            s: mix(&self.s, &other.s),
            slack: mix(&self.slack, &other.slack),
        }
    }
}

/// Largest violation of stationarity, feasibility, sign and complementarity.
pub fn kkt_residual(m: &QpModel, k: &KktPoint) -> f64 {
    let mut g = m.q().mul_vec(&k.x);
    let tl = m.tl().tr_mul_vec(&k.l);
    let te = m.te().tr_mul_vec(&k.mu);
    for i in 0..m.n() {
        g[i] += tl[i] + te[i] - k.s[i] - k.eta * m.p()[i];
    }
    let slack: Vec<f64> = m
        .tl()
        .mul_vec(&k.x)
        .iter()
        .zip(m.tl_rhs())
        .map(|(a, b)| b - a)
        .collect();
    let mut worst = norm_inf(&g).max(m.infeasibility(&k.x));
    for v in k.l.iter().chain(&k.s) {
        worst = worst.max(-v);
    }
    for (x, s) in k.x.iter().zip(&k.s) {
        worst = worst.max((x * s).abs());
    }
    for (l, y) in k.l.iter().zip(&slack) {
        worst = worst.max((l * y).abs());
    }
    worst
}

#[derive(Debug, Clone)]
pub struct FixedEtaSolution {
    pub point: KktPoint,
    pub tableau: EvoTableau,
    /// Complementary basis of non-artificial columns.
    pub basis: BasisState,
}

/// Column `j` may not enter while its complement is basic; artificials never re-enter.
fn tabu(layout: &EvoLayout, j: usize, b: &BasisState) -> bool {
    layout.is_artificial(j) || layout.complement(j).is_some_and(|c| b.is_basic(c))
}

/// Replaces the basic artificial at `position` by a non-artificial column with
/// a nonzero entry in that row of `B⁻¹A`, when one exists.
fn drive_out(
    lp: &StandardLp,
    b: &mut BasisState,
    position: usize,
    candidates: impl Fn(usize, &BasisState) -> bool,
) -> Result<bool, QpError> {
    let mut e = vec![0.0; lp.rows()];
    e[position] = 1.0;
    let row = b.solve_tr(&lp.a, &e);
    let mut best: Option<(usize, f64)> = None;
    for j in b.residual() {
        if !candidates(j, b) {
            continue;
        }
        let v = (0..lp.rows()).map(|i| row[i] * lp.a[(i, j)]).sum::<f64>().abs();
        if v > 1e-9 && best.is_none_or(|(_, w)| v > w) {
            best = Some((j, v));
        }
    }
    match best {
        Some((j, _)) => {
            b.pivot(&lp.a, position, j)?;
            Ok(true)
        }
        None => Ok(false),
    }
}

fn scale(v: &[f64]) -> f64 {
    1.0 + norm_inf(v)
}

/// Complementary solution at a fixed `η`.
///
/// Stage 1 finds a feasible portfolio over the constraint rows; stage 2 drives the
/// stationarity artificials to zero while never letting both members of a
/// complementary pair be basic.
pub fn solve_fixed_eta(m: &QpModel, eta: f64) -> Result<FixedEtaSolution, QpError> {
    if !eta.is_finite() {
        return Err(QpError::DimensionMismatch("eta must be finite"));
    }
    let mut tab = assemble_evo(m, eta);
    let layout = tab.layout.clone();
    let mc = layout.ml + layout.me;
    let rows = layout.rows();

    let mut constraint_basis: Vec<usize> = tab.start[..mc].to_vec();
    if mc > 0 {
        let row_idx: Vec<usize> = (0..mc).collect();
        let mut lp1 = tab.lp.restrict_rows(&row_idx);
        for (j, c) in lp1.c.iter_mut().enumerate() {
            *c = if layout.is_artificial(j) { 1.0 } else { 0.0 };
        }
        let start = BasisState::new(&lp1.a, &constraint_basis)?;
        let allowed = |j: usize| matches!(layout.var(j), EvoVar::X(_) | EvoVar::Yl(_));
        let veto = |j: usize, _: &BasisState| !allowed(j);
        let sol = simplex_solve(&lp1, start, EnteringRule::default(), Some(&veto))?;
        if sol.value > 1e-9 * scale(&lp1.d) {
            return Err(QpError::InfeasibleModel);
        }
        let mut b = sol.basis;
        for p in 0..mc {
            if layout.is_artificial(b.basic()[p])
                && !drive_out(&lp1, &mut b, p, |j, _| allowed(j))?
            {
                return Err(QpError::DependentConstraints);
            }
        }
        constraint_basis = b.basic().to_vec();
    }

    let mut x = vec![0.0; layout.cols()];
    if mc > 0 {
        let row_idx: Vec<usize> = (0..mc).collect();
        let lp1 = tab.lp.restrict_rows(&row_idx);
        let b = BasisState::new(&lp1.a, &constraint_basis)?;
        for (&j, v) in constraint_basis.iter().zip(b.values(&lp1)) {
            x[j] = v.max(0.0);
        }
    }
    let qx = m.q().mul_vec(&x[..layout.n]);
    for i in 0..layout.n {
        let r = eta * m.p()[i] - qx[i];
        tab.lp.a[(mc + i, layout.col(EvoVar::Yq(i)))] = if r < 0.0 { -1.0 } else { 1.0 };
    }
    for (j, c) in tab.lp.c.iter_mut().enumerate() {
        *c = if matches!(layout.var(j), EvoVar::Yq(_)) { 1.0 } else { 0.0 };
    }
    let mut basic = constraint_basis;
    basic.extend((0..layout.n).map(|i| layout.col(EvoVar::Yq(i))));
    let start = BasisState::new(&tab.lp.a, &basic)?;
    let veto = |j: usize, b: &BasisState| tabu(&layout, j, b);
    let sol = match simplex_solve(&tab.lp, start, EnteringRule::default(), Some(&veto)) {
        Ok(s) => s,
        Err(LpError::InfeasibleStart) => return Err(QpError::NumericalBreakdown("stationarity start")),
        Err(e) => return Err(e.into()),
    };
    if sol.value > 1e-8 * scale(&tab.lp.d) {
        return Err(QpError::NumericalBreakdown("stationarity artificials did not vanish"));
    }
    let mut b = sol.basis;
    for p in 0..rows {
        if layout.is_artificial(b.basic()[p]) && !drive_out(&tab.lp, &mut b, p, |j, b| !tabu(&layout, j, b))? {
            return Err(QpError::NumericalBreakdown("artificial remains basic"));
        }
    }
    for c in tab.lp.c.iter_mut() {
        *c = 0.0;
    }
    let point = KktPoint::from_columns(&layout, &b.primal(&tab.lp), eta);
    Ok(FixedEtaSolution { point, tableau: tab, basis: b })
}

/// `pᵀx`, `xᵀQx`
pub(crate) fn moments_of(m: &QpModel, x: &[f64]) -> (f64, f64) {
    (dot(m.p(), x), m.q().quad_form(x, x))
}

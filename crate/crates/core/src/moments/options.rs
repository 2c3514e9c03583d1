//! Moments of European option returns under lognormal prices.
//!
//! Each leg's simple return is written as a finite sum of terms
//! `coef · e^{k x} · 1{lo < x < hi}` in the log price change `x`, so
//! expectations and same-variable products reduce to normal integrals.
//! Products of legs on two jointly normal variables use exponential
//! tilting plus a one-dimensional quadrature for the rectangle probability.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{to_log, MomentSet, MomentsError};
use crate::numerics::quad::integrate;
use crate::numerics::special::{norm_interval, norm_pdf};
use crate::numerics::Matrix;

const QUAD_TOL: f64 = 1e-12;
const QUAD_BUDGET: usize = 10_000;
const TRUNCATION: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptionKind {
    Call,
    Put,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptionSpec {
    pub name: String,
    pub kind: OptionKind,
    pub underlying: String,
    pub strike: f64,
    pub premium: f64,
    pub spot: f64,
    /// Days to expiry.
    pub exdays: f64,
}

impl OptionSpec {
    pub fn leg(&self) -> ReturnLeg {
        let (strike, premium, spot) = (self.strike, self.premium, self.spot);
        match self.kind {
            OptionKind::Call => ReturnLeg::Call { strike, premium, spot },
            OptionKind::Put => ReturnLeg::Put { strike, premium, spot },
        }
    }

    fn validate(&self) -> Result<(), MomentsError> {
        let ok = [self.strike, self.premium, self.spot, self.exdays].iter().all(|&v| v > 0.0 && v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(MomentsError::InvalidInput("option strike, premium, spot and exdays must be positive"))
        }
    }
}

/// A simple return driven by the log price change `x` of one asset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReturnLeg {
    /// `e^x − 1`
    Underlying,
    /// `(max(S e^x − K, 0) − C) / C`
    Call { strike: f64, premium: f64, spot: f64 },
    /// `(max(K − S e^x, 0) − P) / P`
    Put { strike: f64, premium: f64, spot: f64 },
}

/// A leg whose log price change spans `fraction` of the reference horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegAt {
    pub leg: ReturnLeg,
    pub fraction: f64,
}

#[derive(Debug, Clone, Copy)]
struct Term {
    coef: f64,
    k: f64,
    lo: f64,
    hi: f64,
}

const INF: f64 = f64::INFINITY;

fn terms(leg: ReturnLeg) -> Vec<Term> {
    let all = |coef, k| Term { coef, k, lo: -INF, hi: INF };
    match leg {
        ReturnLeg::Underlying => vec![all(-1.0, 0.0), all(1.0, 1.0)],
        ReturnLeg::Call { strike, premium, spot } => {
            let b = libm::log(strike / spot);
            vec![
                all(-1.0, 0.0),
                Term { coef: spot / premium, k: 1.0, lo: b, hi: INF },
                Term { coef: -strike / premium, k: 0.0, lo: b, hi: INF },
            ]
        }
        ReturnLeg::Put { strike, premium, spot } => {
            let b = libm::log(strike / spot);
            vec![
                all(-1.0, 0.0),
                Term { coef: strike / premium, k: 0.0, lo: -INF, hi: b },
                Term { coef: -spot / premium, k: 1.0, lo: -INF, hi: b },
            ]
        }
    }
}

/// `E[e^{k x} 1{lo < x < hi}]` for `x ~ N(m, s²)`.
fn partial_exp(k: f64, lo: f64, hi: f64, m: f64, s: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    if s == 0.0 {
        return if lo < m && m < hi { libm::exp(k * m) } else { 0.0 };
    }
    let shift = m + k * s * s;
    libm::exp(k * m + 0.5 * k * k * s * s) * norm_interval((lo - shift) / s, (hi - shift) / s)
}

fn expectation(ts: &[Term], m: f64, s: f64) -> f64 {
    ts.iter().map(|t| t.coef * partial_exp(t.k, t.lo, t.hi, m, s)).sum()
}

fn same_variable_product(ta: &[Term], tb: &[Term], m: f64, s: f64) -> f64 {
    let mut acc = 0.0;
    for a in ta {
        for b in tb {
            acc += a.coef * b.coef * partial_exp(a.k + b.k, a.lo.max(b.lo), a.hi.min(b.hi), m, s);
        }
    }
    acc
}

/// Expected simple return of a leg when `x ~ N(mu, sigma²)`.
pub fn leg_expectation(leg: ReturnLeg, mu: f64, sigma: f64) -> f64 {
    expectation(&terms(leg), mu, sigma)
}

/// Variance of a leg's simple return when `x ~ N(mu, sigma²)`.
pub fn leg_variance(leg: ReturnLeg, mu: f64, sigma: f64) -> f64 {
    let t = terms(leg);
    let e = expectation(&t, mu, sigma);
    (same_variable_product(&t, &t, mu, sigma) - e * e).max(0.0)
}

/// Expected return of an option held to expiry.
pub fn option_expected_return(opt: &OptionSpec, mu: f64, sigma: f64) -> f64 {
    leg_expectation(opt.leg(), mu, sigma)
}

/// Standardized interval for a normal with the given mean and scale;
/// `None` when it carries no mass.
fn standardize(lo: f64, hi: f64, mean: f64, s: f64) -> Option<(f64, f64)> {
    if !(hi > lo) {
        return None;
    }
    if s == 0.0 {
        return (lo < mean && mean < hi).then_some((-INF, INF));
    }
    Some(((lo - mean) / s, (hi - mean) / s))
}

/// `P(u ∈ (a1,b1), v ∈ (a2,b2))` for standard normals with correlation `rho`.
fn rectangle_probability(a1: f64, b1: f64, a2: f64, b2: f64, rho: f64) -> Result<f64, MomentsError> {
    let full1 = a1 == -INF && b1 == INF;
    let full2 = a2 == -INF && b2 == INF;
    if full1 {
        return Ok(norm_interval(a2, b2));
    }
    if full2 {
        return Ok(norm_interval(a1, b1));
    }
    if rho == 0.0 {
        return Ok(norm_interval(a1, b1) * norm_interval(a2, b2));
    }
    if rho.abs() >= 1.0 - 1e-12 {
        let (lo2, hi2) = if rho > 0.0 { (a2, b2) } else { (-b2, -a2) };
        return Ok(norm_interval(a1.max(lo2), b1.min(hi2)));
    }
    let r = libm::sqrt(1.0 - rho * rho);
    let lo = a1.max(-TRUNCATION);
    let hi = b1.min(TRUNCATION);
    if !(hi > lo) {
        return Ok(0.0);
    }
    let mut cuts = vec![-8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0];
    for v in [a2 / rho, b2 / rho] {
        if v.is_finite() {
            cuts.push(v);
        }
    }
    let p = integrate(
        |u| norm_pdf(u) * norm_interval((a2 - rho * u) / r, (b2 - rho * u) / r),
        lo,
        hi,
        &cuts,
        QUAD_TOL,
        QUAD_BUDGET,
    )?;
    Ok(p)
}

/// `E[r_a · r_b] − E[r_a] E[r_b]` for `x ~ N(m1, s1²)`, `y ~ N(m2, s2²)`, `corr(x, y) = rho`.
fn bivariate_cov(
    ta: &[Term],
    tb: &[Term],
    (m1, s1): (f64, f64),
    (m2, s2): (f64, f64),
    rho: f64,
) -> Result<f64, MomentsError> {
    let mut cross = 0.0;
    for a in ta {
        for b in tb {
            let k1 = a.k;
            let k2 = b.k;
            let pref = libm::exp(
                k1 * m1 + k2 * m2 + 0.5 * (k1 * k1 * s1 * s1 + 2.0 * rho * k1 * k2 * s1 * s2 + k2 * k2 * s2 * s2),
            );
            let mean1 = m1 + s1 * (k1 * s1 + rho * k2 * s2);
            let mean2 = m2 + s2 * (k2 * s2 + rho * k1 * s1);
            let (Some((a1, b1)), Some((a2, b2))) =
                (standardize(a.lo, a.hi, mean1, s1), standardize(b.lo, b.hi, mean2, s2))
            else {
                continue;
            };
            cross += a.coef * b.coef * pref * rectangle_probability(a1, b1, a2, b2, rho)?;
        }
    }
    Ok(cross - expectation(ta, m1, s1) * expectation(tb, m2, s2))
}

/// Covariance of two legs on one asset whose horizon log change is `N(mu, sigma²)`.
///
/// Legs with different fractions see `x_f ~ N(mu f, sigma² f)` with
/// `corr(x_f, x_g) = sqrt(min(f,g) / max(f,g))`.
pub fn option_cov_same_asset(a: LegAt, b: LegAt, mu: f64, sigma: f64) -> Result<f64, MomentsError> {
    if !(a.fraction > 0.0 && b.fraction > 0.0) {
        return Err(MomentsError::InvalidInput("leg horizons must be positive"));
    }
    let (ta, tb) = (terms(a.leg), terms(b.leg));
    let (ma, sa) = (mu * a.fraction, sigma * libm::sqrt(a.fraction));
    if a.fraction == b.fraction {
        return Ok(same_variable_product(&ta, &tb, ma, sa) - expectation(&ta, ma, sa) * expectation(&tb, ma, sa));
    }
    let (mb, sb) = (mu * b.fraction, sigma * libm::sqrt(b.fraction));
    let rho = libm::sqrt(a.fraction.min(b.fraction) / a.fraction.max(b.fraction));
    bivariate_cov(&ta, &tb, (ma, sa), (mb, sb), rho)
}

/// Covariance of legs on two assets whose log changes are jointly normal.
pub fn option_cov_cross_asset(
    a: ReturnLeg,
    b: ReturnLeg,
    mu_a: f64,
    sig_a: f64,
    mu_b: f64,
    sig_b: f64,
    rho: f64,
) -> Result<f64, MomentsError> {
    if !(rho.abs() <= 1.0) {
        return Err(MomentsError::InvalidInput("correlation must lie in [-1, 1]"));
    }
    bivariate_cov(&terms(a), &terms(b), (mu_a, sig_a), (mu_b, sig_b), rho)
}

/// Log-return correlation implied by a simple-return correlation under joint lognormality.
fn log_correlation(rho_s: f64, (er_a, sd_a): (f64, f64), (er_b, sd_b): (f64, f64), s_a: f64, s_b: f64) -> Result<f64, MomentsError> {
    if s_a == 0.0 || s_b == 0.0 {
        return Ok(0.0);
    }
    let r = libm::log1p(rho_s * sd_a * sd_b / ((1.0 + er_a) * (1.0 + er_b))) / (s_a * s_b);
    if !(r.abs() <= 1.0 + 1e-9) {
        return Err(MomentsError::InvalidCorrelation(vec![super::CorrelationViolation::Positivity]));
    }
    Ok(r.clamp(-1.0, 1.0))
}

/// Appends option legs to a moment set. Asset moments are simple returns
/// over `horizon_days`; each option's log change spans `exdays / horizon_days`
/// of that horizon.
pub fn extend_universe(
    ms: &MomentSet,
    options: &[OptionSpec],
    horizon_days: f64,
) -> Result<MomentSet, MomentsError> {
    if options.is_empty() {
        return Ok(ms.clone());
    }
    if !(horizon_days > 0.0) {
        return Err(MomentsError::InvalidInput("horizon must be positive"));
    }
    let n = ms.len();
    let logs: Vec<(f64, f64)> =
        ms.er.iter().zip(&ms.std).map(|(&e, &s)| to_log(e, s)).collect::<Result<_, _>>()?;

    let mut legs: Vec<(usize, LegAt)> =
        (0..n).map(|i| (i, LegAt { leg: ReturnLeg::Underlying, fraction: 1.0 })).collect();
    let mut names = ms.names.clone();
    for o in options {
        o.validate()?;
        let u = ms.index_of(&o.underlying).ok_or_else(|| MomentsError::UnknownUnderlying(o.underlying.clone()))?;
        legs.push((u, LegAt { leg: o.leg(), fraction: o.exdays / horizon_days }));
        names.push(o.name.clone());
    }
    let total = legs.len();

    let mut er = ms.er.clone();
    let mut std = ms.std.clone();
    for &(u, leg) in &legs[n..] {
        let (mu, s) = (logs[u].0 * leg.fraction, logs[u].1 * libm::sqrt(leg.fraction));
        er.push(leg_expectation(leg.leg, mu, s));
        std.push(libm::sqrt(leg_variance(leg.leg, mu, s)));
    }

    let mut correl = Matrix::identity(total);
    for i in 0..n {
        for j in 0..n {
            correl[(i, j)] = ms.correl[(i, j)];
        }
    }
    for v in n..total {
        for u in 0..v {
            let (a, la) = legs[u];
            let (b, lb) = legs[v];
            let cov = if a == b {
                option_cov_same_asset(la, lb, logs[a].0, logs[a].1)?
            } else {
                let rho_log = log_correlation(ms.correl[(a, b)], (ms.er[a], ms.std[a]), (ms.er[b], ms.std[b]), logs[a].1, logs[b].1)?;
                let rho = rho_log * la.fraction.min(lb.fraction) / libm::sqrt(la.fraction * lb.fraction);
                if rho == 0.0 {
                    0.0
                } else {
                    let (ma, sa) = (logs[a].0 * la.fraction, logs[a].1 * libm::sqrt(la.fraction));
                    let (mb, sb) = (logs[b].0 * lb.fraction, logs[b].1 * libm::sqrt(lb.fraction));
                    option_cov_cross_asset(la.leg, lb.leg, ma, sa, mb, sb, rho)?
                }
            };
            let c = if std[u] > 0.0 && std[v] > 0.0 { (cov / (std[u] * std[v])).clamp(-1.0, 1.0) } else { 0.0 };
            correl[(u, v)] = c;
            correl[(v, u)] = c;
        }
    }
    MomentSet::new(names, er, std, correl)
}

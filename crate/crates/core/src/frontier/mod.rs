//! Efficient frontier built from a critical path, with portfolio selection.

mod capm;
mod report;
mod tangency;

use alloc::string::String;
use alloc::vec::Vec;

use crate::qp::CriticalPath;

pub use capm::{apt_expected_returns, capm_expected_return};
pub use report::{format_sci, parse_sci, report};
pub use tangency::{brennan_frontier, BrennanFrontier};

/// `l` within this distance of 0 or 1 counts as a critical point.
pub const STATUS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrontierError {
    #[error("frontier has no points")]
    Empty,
    #[error("standard deviation query did not land on the efficient branch")]
    AmbiguousQuery,
    #[error("rate {rate} is not below the highest frontier return {max_return}")]
    RateAboveFrontier { rate: f64, max_return: f64 },
    #[error("lending rate must not exceed the borrowing rate")]
    InvalidRates,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierSegment {
    pub k: usize,
    pub eta_range: (f64, f64),
    pub e0: f64,
    pub e1: f64,
    pub v00: f64,
    pub v01: f64,
    pub v11: f64,
}

impl FrontierSegment {
    pub fn e(&self, l: f64) -> f64 {
        (1.0 - l) * self.e0 + l * self.e1
    }

    /// `(1−λ)²v00 + 2λ(1−λ)v01 + λ²v11`
    pub fn v(&self, l: f64) -> f64 {
        let m = 1.0 - l;
        (m * m * self.v00 + 2.0 * l * m * self.v01 + l * l * self.v11).max(0.0)
    }

    pub fn dv(&self, l: f64) -> f64 {
        2.0 * ((l - 1.0) * self.v00 + (1.0 - 2.0 * l) * self.v01 + l * self.v11)
    }

    pub fn curvature(&self) -> f64 {
        2.0 * (self.v00 - 2.0 * self.v01 + self.v11)
    }

    pub fn eta(&self, l: f64) -> f64 {
        (1.0 - l) * self.eta_range.0 + l * self.eta_range.1
    }

    /// Segment along which the portfolio does not move in return.
    pub fn is_degenerate(&self) -> bool {
        self.e1 - self.e0 <= 1e-14 * (1.0 + self.e0.abs())
    }

    /// Intercept of the tangent line at `l`: `e − s·de/ds`.
    pub fn rate(&self, l: f64) -> f64 {
        let dv = self.dv(l);
        let de = self.e1 - self.e0;
        if dv <= 0.0 {
            return f64::NEG_INFINITY;
        }
        self.e(l) - 2.0 * self.v(l) * de / dv
    }
}

/// `v_λ` quadratic pieces between consecutive critical points.
pub fn build_frontier(path: &CriticalPath) -> Vec<FrontierSegment> {
    (0..path.etas.len().saturating_sub(1))
        .map(|k| FrontierSegment {
            k,
            eta_range: (path.etas[k], path.etas[k + 1]),
            e0: path.e[k],
            e1: path.e[k + 1],
            v00: path.v[k],
            v01: path.cross[k],
            v11: path.v[k + 1],
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionStatus {
    NotComputed,
    CriticalPoint,
    Interior,
    OutOfRangeHigh,
    OutOfRangeLow,
}

impl SelectionStatus {
    pub fn glyph(self) -> &'static str {
        match self {
            SelectionStatus::NotComputed => "∅",
            SelectionStatus::CriticalPoint => "+",
            SelectionStatus::Interior => "√",
            SelectionStatus::OutOfRangeHigh => "↑",
            SelectionStatus::OutOfRangeLow => "↓",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectBy {
    Eta(f64),
    Return(f64),
    Std(f64),
    Rate(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioSelection {
    pub eta: f64,
    pub e: f64,
    pub v: f64,
    pub s: f64,
    /// Rate whose tangency this portfolio is.
    pub r: f64,
    /// Segment index, or the critical point index when `status` is `CriticalPoint`.
    pub k: usize,
    pub l: f64,
    pub status: SelectionStatus,
    pub composition: Vec<(String, f64)>,
}

impl PortfolioSelection {
    pub fn weights(&self) -> Vec<f64> {
        self.composition.iter().map(|(_, w)| *w).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frontier {
    names: Vec<String>,
    etas: Vec<f64>,
    portfolios: Vec<Vec<f64>>,
    e: Vec<f64>,
    v: Vec<f64>,
    segments: Vec<FrontierSegment>,
    open_ended: bool,
}

impl Frontier {
    pub fn new(path: &CriticalPath, names: Vec<String>) -> Result<Self, FrontierError> {
        if path.etas.is_empty() {
            return Err(FrontierError::Empty);
        }
        if path.portfolios.iter().any(|x| x.len() != names.len()) {
            return Err(FrontierError::DimensionMismatch("portfolio size differs from names"));
        }
        Ok(Self {
            names,
            etas: path.etas.clone(),
            portfolios: path.portfolios.clone(),
            e: path.e.clone(),
            v: path.v.clone(),
            segments: build_frontier(path),
            open_ended: path.open_ended,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn segments(&self) -> &[FrontierSegment] {
        &self.segments
    }

    pub fn critical_etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn portfolios(&self) -> &[Vec<f64>] {
        &self.portfolios
    }

    pub fn open_ended(&self) -> bool {
        self.open_ended
    }

    pub fn num_points(&self) -> usize {
        self.etas.len()
    }

    /// `(e, v)` at critical point `k`.
    pub fn point(&self, k: usize) -> (f64, f64) {
        (self.e[k], self.v[k])
    }

    pub fn max_return(&self) -> f64 {
        self.point(self.etas.len() - 1).0
    }

    pub fn min_return(&self) -> f64 {
        self.point(0).0
    }

    fn composition(&self, k: usize, l: f64) -> Vec<(String, f64)> {
        let x0 = &self.portfolios[k];
        let x1 = self.portfolios.get(k + 1).unwrap_or(x0);
        self.names
            .iter()
            .zip(x0.iter().zip(x1))
            .map(|(n, (a, b))| (n.clone(), (1.0 - l) * a + l * b))
            .collect()
    }

    /// Tangency rate at critical point `k`, taken from the segment to its right.
    fn rate_at_point(&self, k: usize) -> f64 {
        if let Some(seg) = self.segments.iter().skip(k).find(|s| !s.is_degenerate()) {
            return seg.rate(0.0);
        }
        match self.segments.iter().take(k).rev().find(|s| !s.is_degenerate()) {
            Some(seg) => seg.rate(1.0),
            None => f64::NAN,
        }
    }

    pub(crate) fn at_point(&self, k: usize, eta: f64, status: SelectionStatus) -> PortfolioSelection {
        let (e, v) = self.point(k);
        PortfolioSelection {
            eta,
            e,
            v,
            s: libm::sqrt(v),
            r: self.rate_at_point(k),
            k,
            l: 0.0,
            status,
            composition: self.composition(k, 0.0),
        }
    }

    /// Portfolio at weight `l` on segment `k`, snapping to critical points.
    pub(crate) fn on_segment(&self, k: usize, l: f64, status: SelectionStatus) -> PortfolioSelection {
        let seg = &self.segments[k];
        if (-STATUS_TOL..=STATUS_TOL).contains(&l) {
            let st = if status == SelectionStatus::Interior { SelectionStatus::CriticalPoint } else { status };
            return self.at_point(k, seg.eta_range.0, st);
        }
        if (l - 1.0).abs() <= STATUS_TOL {
            let st = if status == SelectionStatus::Interior { SelectionStatus::CriticalPoint } else { status };
            return self.at_point(k + 1, seg.eta_range.1, st);
        }
        let v = seg.v(l);
        PortfolioSelection {
            eta: seg.eta(l),
            e: seg.e(l),
            v,
            s: libm::sqrt(v),
            r: if seg.is_degenerate() { self.rate_at_point(k) } else { seg.rate(l) },
            k,
            l,
            status,
            composition: self.composition(k, l),
        }
    }

    pub(crate) fn last(&self) -> usize {
        self.etas.len() - 1
    }

    pub fn select(&self, by: SelectBy) -> Result<PortfolioSelection, FrontierError> {
        use SelectionStatus::*;
        let last = self.last();
        match by {
            SelectBy::Eta(eta) => {
                if !(eta >= 0.0) {
                    return Ok(self.at_point(0, 0.0, OutOfRangeLow));
                }
                if eta >= self.etas[last] {
                    if self.open_ended && !self.segments.is_empty() {
                        let seg = &self.segments[last - 1];
                        let l = (eta - seg.eta_range.0) / (seg.eta_range.1 - seg.eta_range.0);
                        return Ok(self.on_segment(last - 1, l, Interior));
                    }
                    let mut p = self.at_point(last, eta, CriticalPoint);
                    p.eta = eta;
                    return Ok(p);
                }
                let k = self.etas.partition_point(|&e| e <= eta) - 1;
                let seg = &self.segments[k];
                let l = (eta - seg.eta_range.0) / (seg.eta_range.1 - seg.eta_range.0);
                if l <= STATUS_TOL {
                    let mut p = self.at_point(k, eta, CriticalPoint);
                    p.eta = eta;
                    return Ok(p);
                }
                let mut p = self.on_segment(k, l, Interior);
                p.eta = eta;
                Ok(p)
            }
            SelectBy::Return(e) => {
                let (lo, hi) = (self.min_return(), self.max_return());
                let tol = 1e-12 * (1.0 + hi.abs());
                if e < lo - tol {
                    return Ok(self.at_point(0, self.etas[0], OutOfRangeLow));
                }
                if e > hi + tol {
                    return Ok(self.at_point(last, self.etas[last], OutOfRangeHigh));
                }
                for seg in self.segments.iter().filter(|s| !s.is_degenerate()) {
                    if e <= seg.e1 + tol {
                        let l = ((e - seg.e0) / (seg.e1 - seg.e0)).clamp(0.0, 1.0);
                        return Ok(self.on_segment(seg.k, l, Interior));
                    }
                }
                Ok(self.at_point(last, self.etas[last], CriticalPoint))
            }
            SelectBy::Std(s) => {
                let (_, v_lo) = self.point(0);
                let (_, v_hi) = self.point(last);
                let (s_lo, s_hi) = (libm::sqrt(v_lo), libm::sqrt(v_hi));
                let tol = 1e-12 * (1.0 + s_hi);
                if s < s_lo - tol {
                    return Ok(self.at_point(0, self.etas[0], OutOfRangeLow));
                }
                if s > s_hi + tol {
                    return Ok(self.at_point(last, self.etas[last], OutOfRangeHigh));
                }
                for seg in self.segments.iter().filter(|s| !s.is_degenerate()) {
                    if s <= libm::sqrt(seg.v11) + tol {
                        let l = efficient_root(seg, s * s).ok_or(FrontierError::AmbiguousQuery)?;
                        return Ok(self.on_segment(seg.k, l, Interior));
                    }
                }
                Ok(self.at_point(last, self.etas[last], CriticalPoint))
            }
            SelectBy::Rate(r) => tangency::select_rate(self, r),
        }
    }

    /// Efficient return at standard deviation `s`, if `s` lies within the frontier.
    pub fn e_at_std(&self, s: f64) -> Option<f64> {
        match self.select(SelectBy::Std(s)).ok()? {
            p if matches!(p.status, SelectionStatus::OutOfRangeHigh | SelectionStatus::OutOfRangeLow) => None,
            p => Some(p.e),
        }
    }

    /// `per_segment + 1` evenly spaced `λ` samples on every segment, as `(s, e)`.
    pub fn sample(&self, per_segment: usize) -> Vec<(f64, f64)> {
        if self.segments.is_empty() {
            let (e, v) = self.point(0);
            return alloc::vec![(libm::sqrt(v), e)];
        }
        let mut out = Vec::with_capacity(self.segments.len() * per_segment + 1);
        for seg in &self.segments {
            for j in 0..per_segment {
                let l = j as f64 / per_segment as f64;
                out.push((libm::sqrt(seg.v(l)), seg.e(l)));
            }
        }
        let tail = self.segments.last().unwrap();
        out.push((libm::sqrt(tail.v11), tail.e1));
        out
    }
}

/// Root of `v(λ) = target` in `[0, 1]` on the efficient side.
fn efficient_root(seg: &FrontierSegment, target: f64) -> Option<f64> {
    let a = seg.v00 - 2.0 * seg.v01 + seg.v11;
    let b = 2.0 * (seg.v01 - seg.v00);
    let c = seg.v00 - target;
    let tol = 1e-9;
    let scale = seg.v00.abs().max(seg.v11.abs()).max(f64::MIN_POSITIVE);
    let roots: Vec<f64> = if a.abs() <= 1e-15 * scale {
        if b == 0.0 {
            return Some(0.0);
        }
        alloc::vec![-c / b]
    } else {
        let disc = (b * b - 4.0 * a * c).max(0.0);
        let sq = libm::sqrt(disc);
        let q = -0.5 * (b + if b >= 0.0 { sq } else { -sq });
        if q == 0.0 {
            alloc::vec![0.0]
        } else {
            alloc::vec![q / a, c / q]
        }
    };
    roots
        .into_iter()
        .filter(|l| l.is_finite() && *l >= -tol && *l <= 1.0 + tol)
        .fold(None, |best: Option<f64>, l| Some(best.map_or(l, |b| b.max(l))))
        .map(|l| l.clamp(0.0, 1.0))
}

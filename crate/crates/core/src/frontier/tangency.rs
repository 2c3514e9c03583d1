use super::{Frontier, FrontierError, PortfolioSelection, SelectBy, SelectionStatus};

/// Tangency portfolio for riskless rate `r`: the intercept `e − s·de/ds` increases
/// along the frontier, so it is bracketed by segment and bisected on `λ`.
pub(crate) fn select_rate(f: &Frontier, r: f64) -> Result<PortfolioSelection, FrontierError> {
    use SelectionStatus::*;
    let last = f.last();
    let etas = f.critical_etas();
    let mut moving = f.segments().iter().filter(|s| !s.is_degenerate()).peekable();
    let Some(first) = moving.peek() else {
        let status = if r < f.max_return() { CriticalPoint } else { OutOfRangeHigh };
        return Ok(f.at_point(last, etas[last], status));
    };
    if r < first.rate(0.0) {
        return Ok(f.at_point(first.k, etas[first.k], OutOfRangeLow));
    }
    let mut end = first.k;
    for seg in moving {
        if r < seg.rate(0.0) {
            return Ok(f.at_point(seg.k, etas[seg.k], CriticalPoint));
        }
        if r <= seg.rate(1.0) {
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if seg.rate(mid) < r {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-17 {
                    break;
                }
            }
            return Ok(f.on_segment(seg.k, 0.5 * (lo + hi), Interior));
        }
        end = seg.k + 1;
    }
    if !f.open_ended() && r < f.max_return() {
        return Ok(f.at_point(end, etas[end], CriticalPoint));
    }
    Ok(f.at_point(last, etas[last], OutOfRangeHigh))
}

/// Lending ray, frontier arc and borrowing ray.
#[derive(Debug, Clone, PartialEq)]
pub struct BrennanFrontier {
    pub r_lend: f64,
    pub r_borrow: f64,
    pub lend: PortfolioSelection,
    pub borrow: PortfolioSelection,
}

impl BrennanFrontier {
    /// Composite return at standard deviation `s`.
    pub fn e_at(&self, f: &Frontier, s: f64) -> Option<f64> {
        if s <= self.lend.s {
            Some(self.r_lend + s * (self.lend.e - self.r_lend) / self.lend.s)
        } else if s <= self.borrow.s {
            f.e_at_std(s).or(Some(self.borrow.e))
        } else {
            Some(self.borrow.e + (s - self.borrow.s) * (self.borrow.e - self.r_borrow) / self.borrow.s)
        }
    }
}

pub fn brennan_frontier(f: &Frontier, r_lend: f64, r_borrow: f64) -> Result<BrennanFrontier, FrontierError> {
    if !(r_lend <= r_borrow) {
        return Err(FrontierError::InvalidRates);
    }
    let max_return = f.max_return();
    if !(r_borrow < max_return) {
        return Err(FrontierError::RateAboveFrontier { rate: r_borrow, max_return });
    }
    Ok(BrennanFrontier {
        r_lend,
        r_borrow,
        lend: f.select(SelectBy::Rate(r_lend))?,
        borrow: f.select(SelectBy::Rate(r_borrow))?,
    })
}

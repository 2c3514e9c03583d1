use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{to_simple, Day, MomentSet, MomentsError};
use crate::numerics::Matrix;

/// Quote gaps up to this many sampling intervals are filled with the last price.
pub const MAX_CARRY_INTERVALS: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub asset: String,
    pub deflator: String,
    pub shares: f64,
    /// `(date, price)` pairs; any order is accepted.
    pub observations: Vec<(Day, f64)>,
}

impl PriceSeries {
    /// Price on `date`, carrying the latest earlier quote forward within `max_gap` days.
    pub fn price_at(&self, date: Day, max_gap: i32) -> Option<f64> {
        self.observations
            .iter()
            .filter(|(d, _)| *d <= date && date.0 - d.0 <= max_gap)
            .max_by_key(|(d, _)| *d)
            .map(|&(_, p)| p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    pub final_date: Day,
    /// Days between samples.
    pub interval: i32,
    /// Number of log returns.
    pub samples: usize,
    /// Horizon as a multiple of the sampling interval.
    pub extrap: f64,
    pub hurst: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogMoments {
    pub meanl: Vec<f64>,
    pub sl: Vec<f64>,
    /// Sample covariance with `1/samples` normalization.
    pub covl: Matrix,
    pub corrl: Matrix,
    pub erl: Vec<f64>,
    pub stdl: Vec<f64>,
}

/// Sample log-return moments on the grid `final, final − interval, …`,
/// extrapolated to the horizon and converted to simple returns.
pub fn filter_estimate(
    series: &[PriceSeries],
    params: &FilterParams,
) -> Result<(MomentSet, LogMoments), MomentsError> {
    if params.samples < 2 {
        return Err(MomentsError::InsufficientSamples);
    }
    if params.interval <= 0 || !(params.extrap > 0.0) || !params.hurst.is_finite() {
        return Err(MomentsError::InvalidInput("interval and extrap must be positive"));
    }
    let n = series.len();
    let t = params.samples;
    let max_gap = MAX_CARRY_INTERVALS * params.interval;

    // returns[i][k], k ascending in time
    let mut returns = vec![vec![0.0; t]; n];
    for (i, s) in series.iter().enumerate() {
        let mut prices = Vec::with_capacity(t + 1);
        for j in (0..=t).rev() {
            let date = params.final_date.offset(-(j as i32) * params.interval);
            let p = s
                .price_at(date, max_gap)
                .ok_or_else(|| MomentsError::MissingQuote { asset: s.asset.clone(), date })?;
            if !(p > 0.0) {
                return Err(MomentsError::InvalidInput("prices must be positive"));
            }
            prices.push(p);
        }
        for k in 0..t {
            returns[i][k] = libm::log(prices[k + 1] / prices[k]);
        }
    }

    let tf = t as f64;
    let meanl: Vec<f64> = returns.iter().map(|r| r.iter().sum::<f64>() / tf).collect();
    let mut covl = Matrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let c = (0..t)
                .map(|k| (returns[a][k] - meanl[a]) * (returns[b][k] - meanl[b]))
                .sum::<f64>()
                / tf;
            covl[(a, b)] = c;
            covl[(b, a)] = c;
        }
    }
    let sl: Vec<f64> = (0..n).map(|i| libm::sqrt(covl[(i, i)].max(0.0))).collect();
    let mut corrl = Matrix::identity(n);
    for a in 0..n {
        for b in 0..n {
            if a != b && sl[a] > 0.0 && sl[b] > 0.0 {
                corrl[(a, b)] = (covl[(a, b)] / (sl[a] * sl[b])).clamp(-1.0, 1.0);
            }
        }
    }

    let factor = libm::pow(params.extrap, params.hurst);
    let erl: Vec<f64> = meanl.iter().map(|m| params.extrap * m).collect();
    let stdl: Vec<f64> = sl.iter().map(|s| factor * s).collect();
    let (er, std): (Vec<f64>, Vec<f64>) = erl.iter().zip(&stdl).map(|(&m, &s)| to_simple(m, s)).unzip();

    let ms = MomentSet::new(series.iter().map(|s| s.asset.clone()).collect(), er, std, corrl.clone())?;
    Ok((ms, LogMoments { meanl, sl, covl, corrl, erl, stdl }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn series(name: &str, start: Day, prices: &[f64]) -> PriceSeries {
        PriceSeries {
            asset: name.to_string(),
            deflator: "NONE".to_string(),
            shares: 1.0,
            observations: prices.iter().enumerate().map(|(k, &p)| (start.offset(k as i32), p)).collect(),
        }
    }

    #[test]
    fn constant_prices() {
        let d0 = Day::from_ymd(1994, 1, 1).unwrap();
        let s = series("A", d0, &[10.0; 40]);
        let p = FilterParams { final_date: d0.offset(39), interval: 1, samples: 30, extrap: 30.0, hurst: 0.5 };
        let (ms, lm) = filter_estimate(&[s.clone(), s], &p).unwrap();
        assert_eq!(lm.meanl, vec![0.0, 0.0]);
        assert_eq!(lm.sl, vec![0.0, 0.0]);
        assert_eq!(ms.er, vec![0.0, 0.0]);
        assert_eq!(ms.std, vec![0.0, 0.0]);
        assert_eq!(ms.correl, Matrix::identity(2));
    }

    #[test]
    fn geometric_growth_and_extrapolation() {
        let d0 = Day::from_ymd(1994, 1, 1).unwrap();
        let prices: Vec<f64> = (0..20).map(|k| libm::exp(0.01 * k as f64)).collect();
        let s = series("A", d0, &prices);
        let p = FilterParams { final_date: d0.offset(18), interval: 2, samples: 9, extrap: 1.0, hurst: 0.5 };
        let (_, lm) = filter_estimate(core::slice::from_ref(&s), &p).unwrap();
        assert!((lm.meanl[0] - 0.02).abs() < 1e-14);
        assert!(lm.sl[0] < 1e-9);
        assert_eq!(lm.erl, lm.meanl);
        let p = FilterParams { extrap: 30.0, ..p };
        let (_, lm) = filter_estimate(&[s], &p).unwrap();
        assert!((lm.erl[0] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn gaps_are_carried_then_rejected() {
        let d0 = Day::from_ymd(1994, 1, 1).unwrap();
        let mut s = series("A", d0, &[1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7]);
        s.observations.retain(|(d, _)| d.0 != d0.offset(5).0);
        let p = FilterParams { final_date: d0.offset(7), interval: 1, samples: 7, extrap: 1.0, hurst: 0.5 };
        let (_, lm) = filter_estimate(core::slice::from_ref(&s), &p).unwrap();
        assert!(lm.meanl[0].is_finite());
        s.observations.retain(|(d, _)| d.0 < d0.offset(2).0 || d.0 > d0.offset(5).0);
        let err = filter_estimate(&[s], &p).unwrap_err();
        assert_eq!(err, MomentsError::MissingQuote { asset: "A".to_string(), date: d0.offset(5) });
        let short = FilterParams { samples: 1, ..p };
        assert_eq!(filter_estimate(&[], &short).unwrap_err(), MomentsError::InsufficientSamples);
    }
}

//! Return moments: estimation from prices, lognormal conversions,
//! covariance assembly, index models and option legs.

mod date;
mod filter;
mod index;
mod options;

use alloc::string::String;
use alloc::vec::Vec;

use crate::numerics::{cholesky, Matrix, NumericsError};

pub use date::Day;
pub use filter::{filter_estimate, FilterParams, LogMoments, PriceSeries};
pub use index::{index_model_moments, DiagonalIndexModel, IndexModelMoments};
pub use options::{
    extend_universe, leg_expectation, leg_variance, option_cov_cross_asset, option_cov_same_asset,
    option_expected_return, LegAt, OptionKind, OptionSpec, ReturnLeg,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MomentsError {
    #[error("missing quote for {asset} on {date}")]
    MissingQuote { asset: String, date: Day },
    #[error("at least two samples are required")]
    InsufficientSamples,
    #[error("invalid correlation matrix: {0:?}")]
    InvalidCorrelation(Vec<CorrelationViolation>),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("unknown underlying asset {0}")]
    UnknownUnderlying(String),
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error("quadrature did not converge (error estimate {0:e})")]
    QuadratureFailure(f64),
}

impl From<NumericsError> for MomentsError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::QuadratureFailure { error_estimate } => {
                MomentsError::QuadratureFailure(error_estimate)
            }
            NumericsError::NotPositiveDefinite { .. } => {
                MomentsError::InvalidCorrelation(alloc::vec![CorrelationViolation::Positivity])
            }
            _ => MomentsError::DimensionMismatch("linear algebra"),
        }
    }
}

/// Expected returns, standard deviations and correlations of simple returns
/// over one horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    pub names: Vec<String>,
    pub er: Vec<f64>,
    pub std: Vec<f64>,
    pub correl: Matrix,
}

impl MomentSet {
    pub fn new(
        names: Vec<String>,
        er: Vec<f64>,
        std: Vec<f64>,
        correl: Matrix,
    ) -> Result<Self, MomentsError> {
        let n = names.len();
        if er.len() != n || std.len() != n || correl.shape() != (n, n) {
            return Err(MomentsError::DimensionMismatch("moment vectors and names differ in size"));
        }
        if std.iter().any(|&s| !(s >= 0.0)) || er.iter().any(|v| !v.is_finite()) {
            return Err(MomentsError::InvalidInput("std must be nonnegative and er finite"));
        }
        let violations = validate_correlation(&correl);
        if !violations.is_empty() {
            return Err(MomentsError::InvalidCorrelation(violations));
        }
        Ok(Self { names, er, std, correl })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Restricts to the given names, in that order.
    pub fn subset(&self, names: &[String]) -> Result<MomentSet, MomentsError> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.index_of(n).ok_or(MomentsError::UnknownUnderlying(n.clone())))
            .collect::<Result<_, _>>()?;
        Ok(MomentSet {
            names: names.to_vec(),
            er: idx.iter().map(|&i| self.er[i]).collect(),
            std: idx.iter().map(|&i| self.std[i]).collect(),
            correl: self.correl.select(&idx, &idx),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CorrelationViolation {
    /// Diagonal entry differs from one.
    Diagonal { i: usize, value: f64 },
    /// Off-diagonal magnitude exceeds one.
    Dominance { i: usize, j: usize, value: f64 },
    Asymmetry { i: usize, j: usize },
    /// Smallest eigenvalue below the floor.
    Positivity,
    NotFinite { i: usize, j: usize },
}

const CORREL_TOL: f64 = 1e-10;
const EIGEN_FLOOR: f64 = 1e-8;

/// Checks the diagonal, dominance, symmetry and positivity properties.
pub fn validate_correlation(c: &Matrix) -> Vec<CorrelationViolation> {
    let mut out = Vec::new();
    if !c.is_square() {
        out.push(CorrelationViolation::Positivity);
        return out;
    }
    let n = c.rows();
    for i in 0..n {
        for j in 0..n {
            let v = c[(i, j)];
            if !v.is_finite() {
                out.push(CorrelationViolation::NotFinite { i, j });
            } else if i == j {
                if (v - 1.0).abs() > CORREL_TOL {
                    out.push(CorrelationViolation::Diagonal { i, value: v });
                }
            } else if j > i {
                if v.abs() > 1.0 + CORREL_TOL {
                    out.push(CorrelationViolation::Dominance { i, j, value: v });
                }
                if (v - c[(j, i)]).abs() > CORREL_TOL {
                    out.push(CorrelationViolation::Asymmetry { i, j });
                }
            }
        }
    }
    if out.is_empty() {
        let mut shifted = c.clone();
        for i in 0..n {
            shifted[(i, i)] += EIGEN_FLOOR;
        }
        if cholesky(&shifted).is_err() {
            out.push(CorrelationViolation::Positivity);
        }
    }
    out
}

/// `S(i,j) = std(i)·corr(i,j)·std(j)`
pub fn covariance_from_corr(ms: &MomentSet) -> Result<Matrix, MomentsError> {
    let violations = validate_correlation(&ms.correl);
    if !violations.is_empty() {
        return Err(MomentsError::InvalidCorrelation(violations));
    }
    let n = ms.len();
    let mut s = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] = ms.std[i] * ms.correl[(i, j)] * ms.std[j];
        }
    }
    Ok(s)
}

/// Mean and standard deviation of `e^x − 1` for `x ~ N(erl, stdl²)`.
pub fn to_simple(erl: f64, stdl: f64) -> (f64, f64) {
    let v = stdl * stdl;
    let er = libm::expm1(erl + 0.5 * v);
    let var = libm::exp(2.0 * erl + v) * libm::expm1(v);
    (er, libm::sqrt(var.max(0.0)))
}

/// Inverse of [`to_simple`]; requires `er > −1`.
pub fn to_log(er: f64, std: f64) -> Result<(f64, f64), MomentsError> {
    if !(er > -1.0) || !(std >= 0.0) {
        return Err(MomentsError::InvalidInput("simple moments need er > -1 and std >= 0"));
    }
    let g = 1.0 + er;
    let v = libm::log1p((std / g) * (std / g));
    Ok((libm::log(g) - 0.5 * v, libm::sqrt(v)))
}

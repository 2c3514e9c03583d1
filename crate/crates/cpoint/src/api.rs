//! JSON shapes shared by the command line and the HTTP service.

use cpoint_core::frontier::{report, PortfolioSelection, SelectBy, SelectionStatus};
use serde::{Deserialize, Serialize};

use crate::{Error, ModelBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum By {
    Eta,
    E,
    S,
    R,
}

impl std::str::FromStr for By {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "eta" => Ok(By::Eta),
            "e" => Ok(By::E),
            "s" => Ok(By::S),
            "r" => Ok(By::R),
            _ => Err(Error::Request(format!("unknown selector {s:?}; expected eta, e, s or r"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_id: Option<String>,
    pub by: By,
    pub value: f64,
    /// Reject out-of-range selections instead of clamping them.
    #[serde(default)]
    pub strict: bool,
}

impl SelectRequest {
    pub fn new(by: By, value: f64) -> Self {
        Self { model_id: None, by, value, strict: false }
    }

    fn select_by(&self) -> SelectBy {
        match self.by {
            By::Eta => SelectBy::Eta(self.value),
            By::E => SelectBy::Return(self.value),
            By::S => SelectBy::Std(self.value),
            By::R => SelectBy::Rate(self.value),
        }
    }
}

/// Parses `by=value`, e.g. `eta=0.5` or `r=0.01`.
impl std::str::FromStr for SelectRequest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let (by, v) = s.split_once('=').ok_or_else(|| Error::Request(format!("expected by=value, got {s:?}")))?;
        let value = v.trim().parse().map_err(|_| Error::Request(format!("invalid number {v:?}")))?;
        Ok(Self::new(by.trim().parse()?, value))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Weight {
    pub name: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionView {
    pub eta: f64,
    pub e: f64,
    pub v: f64,
    pub s: f64,
    pub r: f64,
    pub k: usize,
    pub l: f64,
    pub status: &'static str,
    pub glyph: &'static str,
    pub composition: Vec<Weight>,
}

pub fn status_name(s: SelectionStatus) -> &'static str {
    match s {
        SelectionStatus::NotComputed => "not_computed",
        SelectionStatus::CriticalPoint => "critical",
        SelectionStatus::Interior => "interior",
        SelectionStatus::OutOfRangeHigh => "above_range",
        SelectionStatus::OutOfRangeLow => "below_range",
    }
}

impl From<&PortfolioSelection> for SelectionView {
    fn from(p: &PortfolioSelection) -> Self {
        SelectionView {
            eta: p.eta,
            e: p.e,
            v: p.v,
            s: p.s,
            r: p.r,
            k: p.k,
            l: p.l,
            status: status_name(p.status),
            glyph: p.status.glyph(),
            composition: p.composition.iter().map(|(n, w)| Weight { name: n.clone(), weight: *w }).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPointView {
    pub k: usize,
    pub eta: f64,
    pub e: f64,
    pub v: f64,
    pub s: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentView {
    pub k: usize,
    pub eta0: f64,
    pub eta1: f64,
    pub e0: f64,
    pub e1: f64,
    /// `v(l) = (1−l)² v00 + 2l(1−l) v01 + l² v11`
    pub v00: f64,
    pub v01: f64,
    pub v11: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierView {
    pub id: String,
    pub names: Vec<String>,
    pub open_ended: bool,
    pub critical_points: Vec<CriticalPointView>,
    pub segments: Vec<SegmentView>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Created {
    pub id: String,
}

impl ModelBundle {
    pub fn frontier_view(&self) -> FrontierView {
        let f = &self.frontier;
        FrontierView {
            id: self.id.clone(),
            names: f.names().to_vec(),
            open_ended: f.open_ended(),
            critical_points: (0..f.num_points())
                .map(|k| {
                    let (e, v) = f.point(k);
                    CriticalPointView { k, eta: f.critical_etas()[k], e, v, s: v.max(0.0).sqrt(), x: f.portfolios()[k].clone() }
                })
                .collect(),
            segments: f
                .segments()
                .iter()
                .map(|g| SegmentView {
                    k: g.k,
                    eta0: g.eta_range.0,
                    eta1: g.eta_range.1,
                    e0: g.e0,
                    e1: g.e1,
                    v00: g.v00,
                    v01: g.v01,
                    v11: g.v11,
                })
                .collect(),
        }
    }

    pub fn select(&self, req: &SelectRequest) -> Result<PortfolioSelection, Error> {
        if let Some(id) = &req.model_id {
            if *id != self.id {
                return Err(Error::Request(format!("request names model {id} but targets {}", self.id)));
            }
        }
        if !req.value.is_finite() {
            return Err(Error::Request("value must be finite".into()));
        }
        let p = self.frontier.select(req.select_by())?;
        if req.strict {
            match p.status {
                SelectionStatus::OutOfRangeHigh => return Err(Error::OutOfRange("above the frontier")),
                SelectionStatus::OutOfRangeLow => return Err(Error::OutOfRange("below the frontier")),
                _ => {}
            }
        }
        Ok(p)
    }

    pub fn report(&self, reqs: &[SelectRequest]) -> Result<String, Error> {
        let picks = reqs.iter().map(|r| self.select(r)).collect::<Result<Vec<_>, _>>()?;
        Ok(report(&picks))
    }
}

/// Pretty JSON with a trailing newline; the single rendering used by every output path.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("views serialize");
    s.push('\n');
    s
}

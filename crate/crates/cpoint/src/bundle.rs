//! Compiled models with their critical path, identified by a content hash.

use std::fmt::Write;

use cpoint_core::frontier::Frontier;
use cpoint_core::mdl::{compile, extend_universe_decl, parse, parse_moment_vectors, parse_options};
use cpoint_core::moments::{extend_universe, MomentSet};
use cpoint_core::numerics::Matrix;
use cpoint_core::qp::{kkt_residual, sweep, CriticalPath, KktPoint, QpModel, SweepOptions};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::formats::parse_correl;
use crate::Error;

const FORMAT: &str = "cpoint-bundle/1";

/// Largest KKT residual tolerated when a stored path is loaded.
pub const LOAD_KKT_TOL: f64 = 1e-6;

/// Source texts for one model.
#[derive(Debug, Clone, Default)]
pub struct Inputs {
    pub model: String,
    pub moments: String,
    pub correl: String,
    pub deriv: Option<String>,
    /// Horizon of the moments in days; defaults to `extrap × interval` from the moments file.
    pub horizon_days: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ModelBundle {
    pub id: String,
    pub created_at: String,
    pub model: QpModel,
    pub te_names: Vec<String>,
    pub tl_names: Vec<String>,
    pub short: Vec<String>,
    pub print_log: Vec<String>,
    pub path: CriticalPath,
    pub frontier: Frontier,
}

fn moment_set(inputs: &Inputs) -> Result<(MomentSet, f64), Error> {
    let mv = parse_moment_vectors(&inputs.moments).map_err(|e| Error::mdl("moments", e))?;
    let (names, c) = parse_correl("correl", &inputs.correl)?;
    let n = mv.names.len();
    let mut idx = Vec::with_capacity(n);
    for a in &mv.names {
        let i = names.iter().position(|b| b == a).ok_or_else(|| Error::Format {
            file: "correl".into(),
            line: 1,
            message: format!("asset {a} is missing"),
        })?;
        idx.push(i);
    }
    let mut correl = Matrix::zeros(n, n);
    for (r, &i) in idx.iter().enumerate() {
        for (s, &j) in idx.iter().enumerate() {
            correl[(r, s)] = c[(i, j)];
        }
    }
    let horizon = mv.scalars.get("extrap").copied().unwrap_or(f64::NAN) * mv.scalars.get("interval").copied().unwrap_or(1.0);
    Ok((MomentSet::new(mv.names, mv.er, mv.std, correl)?, inputs.horizon_days.unwrap_or(horizon)))
}

impl ModelBundle {
    /// Compiles the model, appends any option legs to its universe and sweeps the frontier.
    pub fn build(inputs: &Inputs) -> Result<Self, Error> {
        let (mut ms, horizon) = moment_set(inputs)?;
        let mut program = parse(&inputs.model).map_err(|e| Error::mdl("model", e))?;
        if let Some(d) = &inputs.deriv {
            let options = parse_options(d).map_err(|e| Error::mdl("deriv", e))?;
            if !(horizon > 0.0) {
                return Err(Error::Request("option legs need a horizon: set extrap in the moments file".into()));
            }
            ms = extend_universe(&ms, &options, horizon)?;
            let names: Vec<String> = options.into_iter().map(|o| o.name).collect();
            extend_universe_decl(&mut program, &names).map_err(|e| Error::mdl("model", e))?;
        }
        let c = compile(&program, &ms).map_err(|e| Error::mdl("model", e))?;
        for line in &c.print_log {
            log::info!("{line}");
        }
        let path = sweep(&c.model, SweepOptions::default())?;
        let frontier = Frontier::new(&path, c.model.names().to_vec())?;
        Ok(Self {
            id: content_id(&c.model),
            created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            model: c.model,
            te_names: c.te_names,
            tl_names: c.tl_names,
            short: c.short,
            print_log: c.print_log,
            path,
            frontier,
        })
    }

    pub fn to_json(&self) -> String {
        let file = BundleFile {
            format: FORMAT.into(),
            id: self.id.clone(),
            created_at: self.created_at.clone(),
            model: ModelFile {
                names: self.model.names().to_vec(),
                q: rows(self.model.q()),
                p: self.model.p().to_vec(),
                te: rows(self.model.te()),
                te_rhs: self.model.te_rhs().to_vec(),
                tl: rows(self.model.tl()),
                tl_rhs: self.model.tl_rhs().to_vec(),
                te_names: self.te_names.clone(),
                tl_names: self.tl_names.clone(),
                short: self.short.clone(),
                print_log: self.print_log.clone(),
            },
            path: PathFile {
                etas: self.path.etas.clone(),
                portfolios: self.path.portfolios.clone(),
                e: self.path.e.clone(),
                v: self.path.v.clone(),
                cross: self.path.cross.clone(),
                open_ended: self.path.open_ended,
                segments: self.path.segments.iter().map(|(a, b)| [a.into(), b.into()]).collect(),
                tail: self.path.tail.as_ref().map(|(a, b)| [a.into(), b.into()]),
            },
        };
        serde_json::to_string_pretty(&file).expect("bundle serializes")
    }

    /// Reads a stored bundle, re-validating the model, its id and the KKT conditions along the path.
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let f: BundleFile = serde_json::from_str(text).map_err(|e| Error::Bundle(e.to_string()))?;
        if f.format != FORMAT {
            return Err(Error::Bundle(format!("unsupported format {:?}", f.format)));
        }
        let m = f.model;
        let model = QpModel::new(
            matrix(&m.q, m.names.len())?,
            m.p,
            matrix(&m.te, m.names.len())?,
            m.te_rhs,
            matrix(&m.tl, m.names.len())?,
            m.tl_rhs,
            m.names,
        )?;
        if content_id(&model) != f.id {
            return Err(Error::Bundle("content does not match id".into()));
        }
        let point = |p: PointFile| KktPoint { eta: p.eta, x: p.x, l: p.l, mu: p.mu, s: p.s, slack: p.slack };
        let pair = |[a, b]: [PointFile; 2]| (point(a), point(b));
        let path = CriticalPath {
            etas: f.path.etas,
            portfolios: f.path.portfolios,
            e: f.path.e,
            v: f.path.v,
            cross: f.path.cross,
            open_ended: f.path.open_ended,
            segments: f.path.segments.into_iter().map(pair).collect(),
            tail: f.path.tail.map(pair),
        };
        for (a, b) in path.segments.iter().chain(&path.tail) {
            for k in [a, b] {
                let r = kkt_residual(&model, k);
                if !(r <= LOAD_KKT_TOL) {
                    return Err(Error::Bundle(format!("KKT residual {r:e} at eta {}", k.eta)));
                }
            }
        }
        let frontier = Frontier::new(&path, model.names().to_vec())?;
        Ok(Self {
            id: f.id,
            created_at: f.created_at,
            model,
            te_names: m.te_names,
            tl_names: m.tl_names,
            short: m.short,
            print_log: m.print_log,
            path,
            frontier,
        })
    }
}

/// Hex SHA-256 prefix of a canonical text rendering of the model, floats in `{:.16e}`.
pub fn content_id(m: &QpModel) -> String {
    let mut text = String::from(FORMAT);
    text.push('\n');
    text.push_str(&m.names().join(","));
    text.push('\n');
    let mut put = |label: &str, rows: usize, cols: usize, vals: &[f64]| {
        let _ = write!(text, "{label} {rows} {cols}");
        for v in vals {
            let _ = write!(text, " {v:.16e}");
        }
        text.push('\n');
    };
    let n = m.n();
    put("q", n, n, m.q().as_slice());
    put("p", n, 1, m.p());
    put("te", m.te().rows(), n, m.te().as_slice());
    put("te_rhs", m.te_rhs().len(), 1, m.te_rhs());
    put("tl", m.tl().rows(), n, m.tl().as_slice());
    put("tl_rhs", m.tl_rhs().len(), 1, m.tl_rhs());
    let digest = Sha256::digest(text.as_bytes());
    digest[..16].iter().map(|b| format!("{b:02x}")).collect()
}

fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn matrix(rows: &[Vec<f64>], cols: usize) -> Result<Matrix, Error> {
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Bundle("ragged matrix".into()));
    }
    Ok(Matrix::from_vec(rows.len(), cols, rows.concat()))
}

#[derive(Serialize, Deserialize)]
struct BundleFile {
    format: String,
    id: String,
    created_at: String,
    model: ModelFile,
    path: PathFile,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    names: Vec<String>,
    q: Vec<Vec<f64>>,
    p: Vec<f64>,
    te: Vec<Vec<f64>>,
    te_rhs: Vec<f64>,
    tl: Vec<Vec<f64>>,
    tl_rhs: Vec<f64>,
    te_names: Vec<String>,
    tl_names: Vec<String>,
    short: Vec<String>,
    print_log: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct PathFile {
    etas: Vec<f64>,
    portfolios: Vec<Vec<f64>>,
    e: Vec<f64>,
    v: Vec<f64>,
    cross: Vec<f64>,
    open_ended: bool,
    segments: Vec<[PointFile; 2]>,
    tail: Option<[PointFile; 2]>,
}

#[derive(Serialize, Deserialize)]
struct PointFile {
    eta: f64,
    x: Vec<f64>,
    l: Vec<f64>,
    mu: Vec<f64>,
    s: Vec<f64>,
    slack: Vec<f64>,
}

impl From<&KktPoint> for PointFile {
    fn from(k: &KktPoint) -> Self {
        PointFile { eta: k.eta, x: k.x.clone(), l: k.l.clone(), mu: k.mu.clone(), s: k.s.clone(), slack: k.slack.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_asset_inputs() -> Inputs {
        Inputs {
            model: "all={A,B};\nnormal: sum[all] $==1;\ncap: for[all] $ <= 0.8;\n".into(),
            moments: "all={A,B};\ner[all]={0.05@A, 0.12@B};\nstd[all]={0.1@A, 0.25@B};\nextrap=30;\n".into(),
            correl: "B A\n1 0.2\n0.2 1\n".into(),
            ..Inputs::default()
        }
    }

    #[test]
    fn builds_and_round_trips() {
        let b = ModelBundle::build(&two_asset_inputs()).unwrap();
        assert_eq!(b.id.len(), 32);
        assert_eq!(b.tl_names, ["cap[A]", "cap[B]"]);
        assert_eq!(b.model.q()[(0, 1)], 0.2 * 0.1 * 0.25);
        let back = ModelBundle::from_json(&b.to_json()).unwrap();
        assert_eq!(back.id, b.id);
        assert_eq!(back.path, b.path);
        assert_eq!(back.frontier, b.frontier);
        assert_eq!(back.to_json(), b.to_json());
    }

    #[test]
    fn id_depends_on_content_only() {
        let a = ModelBundle::build(&two_asset_inputs()).unwrap();
        let b = ModelBundle::build(&two_asset_inputs()).unwrap();
        assert_eq!(a.id, b.id);
        let mut other = two_asset_inputs();
        other.model = other.model.replace("0.8", "0.9");
        assert_ne!(ModelBundle::build(&other).unwrap().id, a.id);
    }

    #[test]
    fn tampered_bundles_are_rejected() {
        let json = ModelBundle::build(&two_asset_inputs()).unwrap().to_json();
        let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
        v["model"]["p"][0] = 0.07.into();
        assert!(matches!(ModelBundle::from_json(&v.to_string()), Err(Error::Bundle(_))));
        let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
        v["path"]["segments"][0][1]["x"][0] = 0.3.into();
        assert!(matches!(ModelBundle::from_json(&v.to_string()), Err(Error::Bundle(_))));
        assert!(matches!(ModelBundle::from_json("{}"), Err(Error::Bundle(_))));
    }

    #[test]
    fn correlation_file_order_is_irrelevant() {
        let mut i = two_asset_inputs();
        i.correl = "A B\n1 0.2\n0.2 1\n".into();
        assert_eq!(ModelBundle::build(&i).unwrap().id, ModelBundle::build(&two_asset_inputs()).unwrap().id);
        i.correl = "A C\n1 0.2\n0.2 1\n".into();
        assert!(matches!(ModelBundle::build(&i), Err(Error::Format { .. })));
    }

    #[test]
    fn compile_errors_keep_positions() {
        let mut i = two_asset_inputs();
        i.model = "all={A,B};\nnormal: sum[all] $==1;\nx = .5;\n".into();
        let e = ModelBundle::build(&i).unwrap_err();
        assert_eq!((e.code(), e.line()), ("lex", Some(3)));
        i.model = "all={A,B};\n".into();
        assert_eq!(ModelBundle::build(&i).unwrap_err().code(), "missing_normal_constraint");
    }
}

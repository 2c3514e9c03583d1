use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::{Expr, ListItem, StatementKind};
use super::eval::{evaluate, Value};
use super::{parse, MdlError};
use crate::moments::{OptionKind, OptionSpec};

/// Asset names, expected returns, standard deviations and named scalars read
/// from a moments file in MDL vector syntax.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVectors {
    pub names: Vec<String>,
    pub er: Vec<f64>,
    pub std: Vec<f64>,
    pub scalars: BTreeMap<String, f64>,
}

pub fn parse_moment_vectors(source: &str) -> Result<MomentVectors, MdlError> {
    let program = parse(source)?;
    let env = evaluate(&program, None)?;
    let vector = |name: &str| match env.get(name) {
        Some(Value::Vector(v)) => Ok(v.clone()),
        Some(_) => Err(MdlError::TypeMismatch { line: env.defined_at[name], what: "er and std must be vectors" }),
        None => Err(MdlError::UnknownName { line: program.statements.last().map_or(1, |s| s.line), name: name.into() }),
    };
    let scalars = env
        .bindings
        .iter()
        .filter_map(|(k, v)| match v {
            Value::Scalar(x) => Some((k.clone(), *x)),
            _ => None,
        })
        .collect();
    Ok(MomentVectors { er: vector("er")?, std: vector("std")?, names: env.universe.clone(), scalars })
}

struct Decl<'a> {
    line: usize,
    items: &'a [ListItem],
}

/// Reads option declarations: `put` and `call` lists of `OPTION@UNDERLYING`,
/// and `exdays`, `O` (premium), `S` (spot) and `K` (strike) as `value@OPTION`
/// lists. Options come back puts first, each in declaration order.
pub fn parse_options(source: &str) -> Result<Vec<OptionSpec>, MdlError> {
    let program = parse(source)?;
    let mut decls: BTreeMap<&str, Decl<'_>> = BTreeMap::new();
    for st in &program.statements {
        let StatementKind::Assign { name, domain: None, value: Expr::List(items) } = &st.kind else {
            return Err(MdlError::TypeMismatch { line: st.line, what: "derivative files hold list assignments only" });
        };
        if !matches!(name.as_str(), "put" | "call" | "exdays" | "O" | "S" | "K") {
            return Err(MdlError::UnknownName { line: st.line, name: name.clone() });
        }
        if decls.insert(name, Decl { line: st.line, items }).is_some() {
            return Err(MdlError::DuplicateName { line: st.line, name: name.clone() });
        }
    }

    let mut out: Vec<OptionSpec> = Vec::new();
    for (field, kind) in [("put", OptionKind::Put), ("call", OptionKind::Call)] {
        let Some(d) = decls.get(field) else { continue };
        for it in d.items {
            let ListItem::Pair(opt, under) = it else {
                return Err(MdlError::TypeMismatch { line: d.line, what: "put and call list OPTION@UNDERLYING pairs" });
            };
            if out.iter().any(|o| o.name == *opt) || opt == under {
                return Err(MdlError::DuplicateName { line: d.line, name: opt.clone() });
            }
            out.push(OptionSpec {
                name: opt.clone(),
                kind,
                underlying: under.clone(),
                strike: f64::NAN,
                premium: f64::NAN,
                spot: f64::NAN,
                exdays: f64::NAN,
            });
        }
    }

    for field in ["exdays", "O", "S", "K"] {
        let Some(d) = decls.get(field) else { continue };
        for it in d.items {
            let ListItem::Valued(v, opt) = it else {
                return Err(MdlError::TypeMismatch { line: d.line, what: "option parameters are value@OPTION lists" });
            };
            let o = out
                .iter_mut()
                .find(|o| o.name == *opt)
                .ok_or_else(|| MdlError::UnknownName { line: d.line, name: opt.clone() })?;
            match field {
                "exdays" => o.exdays = *v,
                "O" => o.premium = *v,
                "S" => o.spot = *v,
                _ => o.strike = *v,
            }
        }
    }
    for o in &out {
        for (field, v) in [("exdays", o.exdays), ("O", o.premium), ("S", o.spot), ("K", o.strike)] {
            if v.is_nan() {
                return Err(MdlError::MissingOptionField { option: o.name.to_string(), field });
            }
        }
    }
    Ok(out)
}

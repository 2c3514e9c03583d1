use alloc::string::String;
use alloc::vec::Vec;

use super::ast::{Expr, ListItem, Program, Relation, StatementKind};
use super::eval::{evaluate, Env, Value};
use super::{parse, MdlError};
use crate::moments::{covariance_from_corr, MomentSet};
use crate::numerics::Matrix;
use crate::qp::QpModel;

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledModel {
    pub model: QpModel,
    pub te_names: Vec<String>,
    pub tl_names: Vec<String>,
    pub print_log: Vec<String>,
    /// Assets held short: their returns and correlations were negated.
    pub short: Vec<String>,
    pub env: Env,
}

/// Builds the quadratic program for a model over the given moments.
pub fn compile(program: &Program, moments: &MomentSet) -> Result<CompiledModel, MdlError> {
    let env = evaluate(program, Some(moments))?;
    if !env.has_normal {
        return Err(MdlError::MissingNormalConstraint);
    }
    let n = env.universe.len();
    let vector = |name: &'static str| match env.get(name) {
        Some(Value::Vector(v)) => Ok(v.clone()),
        _ => Err(MdlError::TypeMismatch { line: env.defined_at.get(name).copied().unwrap_or(0), what: "er and std must be vectors" }),
    };
    let mut er = vector("er")?;
    let std = vector("std")?;
    let short = match env.get("short") {
        None => alloc::vec![false; n],
        Some(Value::Set(s)) => s.clone(),
        Some(_) => {
            return Err(MdlError::TypeMismatch {
                line: env.defined_at.get("short").copied().unwrap_or(0),
                what: "short must be a set",
            })
        }
    };
    let mut correl = moments.subset(&env.universe)?.correl;
    for i in 0..n {
        if short[i] {
            er[i] = -er[i];
        }
        for j in 0..n {
            if short[i] != short[j] {
                correl[(i, j)] = -correl[(i, j)];
            }
        }
    }
    let ms = MomentSet::new(env.universe.clone(), er, std, correl)?;
    let q = covariance_from_corr(&ms)?;

    let (mut te, mut te_rhs, mut te_names) = (Matrix::zeros(0, n), Vec::new(), Vec::new());
    let (mut tl, mut tl_rhs, mut tl_names) = (Matrix::zeros(0, n), Vec::new(), Vec::new());
    for row in &env.rows {
        match row.rel {
            Relation::Eq => {
                te.push_row(&row.coef);
                te_rhs.push(row.rhs);
                te_names.push(row.name.clone());
            }
            Relation::Le | Relation::Ge => {
                let s = if row.rel == Relation::Ge { -1.0 } else { 1.0 };
                let coef: Vec<f64> = row.coef.iter().map(|c| s * c).collect();
                tl.push_row(&coef);
                tl_rhs.push(s * row.rhs);
                tl_names.push(row.name.clone());
            }
        }
    }
    let model = QpModel::new(q, ms.er, te, te_rhs, tl, tl_rhs, env.universe.clone())?;
    let short = env.universe.iter().zip(&short).filter(|(_, &s)| s).map(|(a, _)| a.clone()).collect();
    Ok(CompiledModel { model, te_names, tl_names, print_log: env.print_log.clone(), short, env })
}

/// Appends names to the leading `all = {…}` declaration, skipping those already listed.
pub fn extend_universe_decl(program: &mut Program, names: &[String]) -> Result<(), MdlError> {
    let Some(StatementKind::Assign { name, domain: None, value: Expr::List(items) }) =
        program.statements.first_mut().map(|s| &mut s.kind)
    else {
        return Err(MdlError::MissingUniverse);
    };
    if name != "all" {
        return Err(MdlError::MissingUniverse);
    }
    for n in names {
        if !items.iter().any(|it| matches!(it, ListItem::Name(a) if a == n)) {
            items.push(ListItem::Name(n.clone()));
        }
    }
    Ok(())
}

pub fn compile_source(source: &str, moments: &MomentSet) -> Result<CompiledModel, MdlError> {
    compile(&parse(source)?, moments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn moments(names: &[&str]) -> MomentSet {
        let n = names.len();
        let mut c = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    c[(i, j)] = 0.2;
                }
            }
        }
        MomentSet::new(
            names.iter().map(|s| s.to_string()).collect(),
            (0..n).map(|i| 0.01 * (i + 1) as f64).collect(),
            (0..n).map(|i| 0.1 + 0.05 * i as f64).collect(),
            c,
        )
        .unwrap()
    }

    #[test]
    fn single_asset() {
        let c = compile_source("all={A};\nnormal: sum[all] $==1;", &moments(&["A", "B"])).unwrap();
        assert_eq!(c.model.te().as_slice(), &[1.0]);
        assert_eq!(c.model.te_rhs(), &[1.0]);
        assert_eq!(c.model.tl().rows(), 0);
        assert_eq!(c.model.q()[(0, 0)], 0.1 * 0.1);
    }

    #[test]
    fn normal_constraint_required() {
        let m = moments(&["A", "B"]);
        for src in ["all={A,B};", "all={A,B};\nc: sum[{A}] $ == 1;", "all={A,B};\nc: sum[all] $ <= 1;"] {
            assert_eq!(compile_source(src, &m).unwrap_err(), MdlError::MissingNormalConstraint, "{src}");
        }
    }

    #[test]
    fn universe_follows_moment_order() {
        let c = compile_source("all={C,A};\nnormal: sum[all] $==1;", &moments(&["A", "B", "C"])).unwrap();
        assert_eq!(c.model.names(), &["A".to_string(), "C".to_string()]);
        assert_eq!(c.model.p(), &[0.01, 0.03]);
        assert!(matches!(
            compile_source("all={A,Z};\nnormal: sum[all] $==1;", &moments(&["A"])),
            Err(MdlError::UnknownName { line: 1, .. })
        ));
        assert!(matches!(
            compile_source("all={A};\ns={B};\nnormal: sum[all] $==1;", &moments(&["A", "B"])),
            Err(MdlError::UniverseViolation { line: 2, .. })
        ));
    }

    #[test]
    fn universe_extension() {
        let mut p = parse("all={A};\nnormal: sum[all] $==1;").unwrap();
        extend_universe_decl(&mut p, &["B".to_string(), "A".to_string()]).unwrap();
        let c = compile(&p, &moments(&["A", "B"])).unwrap();
        assert_eq!(c.model.te().as_slice(), &[1.0, 1.0]);
        let mut p = parse("x={A};").unwrap();
        assert_eq!(extend_universe_decl(&mut p, &[]).unwrap_err(), MdlError::MissingUniverse);
    }

    #[test]
    fn short_flips_return_and_correlation() {
        let m = moments(&["A", "B", "C"]);
        let c = compile_source("all={A,B,C};\nshort={B};\ner[short]=er-0.01;\nnormal: sum[all] $==1;", &m).unwrap();
        assert_eq!(c.short, vec!["B".to_string()]);
        let want = [0.01, -(m.er[1] - 0.01), m.er[2]];
        assert!(c.model.p().iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-17));
        let q = c.model.q();
        let sign = [1.0, -1.0, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                let rho = if i == j { 1.0 } else { 0.2 * sign[i] * sign[j] };
                assert!((q[(i, j)] - rho * m.std[i] * m.std[j]).abs() < 1e-17);
            }
        }
    }
}

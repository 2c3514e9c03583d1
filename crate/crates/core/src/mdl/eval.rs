use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::ast::*;
use super::MdlError;
use crate::moments::MomentSet;

/// A set is a boolean mask over the universe; a vector holds one real per
/// universe member.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(f64),
    Vector(Vec<f64>),
    Set(Vec<bool>),
}

impl Value {
    fn at(&self, i: usize) -> f64 {
        match self {
            Value::Scalar(v) => *v,
            Value::Vector(v) => v[i],
            Value::Set(s) => f64::from(u8::from(s[i])),
        }
    }

    fn truth(&self, i: usize) -> bool {
        match self {
            Value::Set(s) => s[i],
            other => other.at(i) != 0.0,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "scalar",
            Value::Vector(_) => "vector",
            Value::Set(_) => "set",
        }
    }
}

/// One emitted constraint row over the universe.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintRow {
    pub name: String,
    pub rel: Relation,
    pub coef: Vec<f64>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Env {
    pub universe: Vec<String>,
    pub bindings: BTreeMap<String, Value>,
    /// Line of each name's first definition; predefined names map to 0.
    pub defined_at: BTreeMap<String, usize>,
    pub rows: Vec<ConstraintRow>,
    pub print_log: Vec<String>,
    pub has_normal: bool,
}

impl Env {
    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.get(name)
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        match self.get(name)? {
            Value::Scalar(v) => Some(*v),
            _ => None,
        }
    }

    pub fn vector(&self, name: &str) -> Option<&[f64]> {
        match self.get(name)? {
            Value::Vector(v) => Some(v),
            _ => None,
        }
    }

    /// Members of a set binding, in universe order.
    pub fn members(&self, name: &str) -> Option<Vec<&str>> {
        match self.get(name)? {
            Value::Set(s) => {
                Some(self.universe.iter().zip(s).filter(|(_, &m)| m).map(|(n, _)| n.as_str()).collect())
            }
            _ => None,
        }
    }

    /// MDL text for a value: `{v@A, ...}` for vectors, `{A, ...}` for sets.
    pub fn render(&self, v: &Value) -> String {
        match v {
            Value::Scalar(x) => format!("{x:.5e}"),
            Value::Vector(xs) => {
                let items: Vec<String> =
                    xs.iter().zip(&self.universe).map(|(x, n)| format!("{x:.5e}@{n}")).collect();
                format!("{{{}}}", items.join(", "))
            }
            Value::Set(s) => {
                let items: Vec<&str> =
                    self.universe.iter().zip(s).filter(|(_, &m)| m).map(|(n, _)| n.as_str()).collect();
                format!("{{{}}}", items.join(", "))
            }
        }
    }
}

/// Affine form `coef·$ + cst`, per asset.
struct Lin {
    coef: Vec<f64>,
    cst: Vec<f64>,
    linear: bool,
}

struct Ctx<'a> {
    env: &'a Env,
    known: Option<&'a MomentSet>,
    line: usize,
}

impl Ctx<'_> {
    fn n(&self) -> usize {
        self.env.universe.len()
    }

    fn full(&self) -> Vec<bool> {
        vec![true; self.n()]
    }

    fn mismatch(&self, what: &'static str) -> MdlError {
        MdlError::TypeMismatch { line: self.line, what }
    }

    fn asset(&self, name: &str) -> Result<usize, MdlError> {
        if let Some(i) = self.env.universe.iter().position(|u| u == name) {
            return Ok(i);
        }
        if self.known.is_some_and(|m| m.index_of(name).is_some()) {
            return Err(MdlError::UniverseViolation { line: self.line, name: name.to_string() });
        }
        Err(MdlError::UnknownName { line: self.line, name: name.to_string() })
    }

    fn list(&self, items: &[ListItem]) -> Result<Value, MdlError> {
        let n = self.n();
        let valued = items.iter().any(|it| matches!(it, ListItem::Valued(..)));
        let mut vals = vec![0.0; n];
        for it in items {
            match it {
                ListItem::Name(a) => vals[self.asset(a)?] = 1.0,
                ListItem::Valued(v, a) => vals[self.asset(a)?] = *v,
                ListItem::Pair(..) => return Err(self.mismatch("NAME@NAME pairs are only valid in derivative files")),
            }
        }
        Ok(if valued { Value::Vector(vals) } else { Value::Set(vals.iter().map(|&v| v != 0.0).collect()) })
    }

    fn eval(&self, e: &Expr, mask: &[bool]) -> Result<Value, MdlError> {
        match e {
            Expr::Num(v) => Ok(Value::Scalar(*v)),
            Expr::Name(n) => match self.env.bindings.get(n) {
                Some(v) => Ok(v.clone()),
                None => {
                    let i = self.asset(n)?;
                    let mut s = vec![false; self.n()];
                    s[i] = true;
                    Ok(Value::Set(s))
                }
            },
            Expr::Dollar => Err(self.mismatch("$ is only valid in a constraint term")),
            Expr::List(items) => self.list(items),
            Expr::Unary(UnOp::Neg, a) => self.arith(BinOp::Mul, Value::Scalar(-1.0), self.eval(a, mask)?, mask),
            Expr::Unary(UnOp::Not, a) => Ok(match self.eval(a, mask)? {
                Value::Scalar(v) => Value::Scalar(f64::from(u8::from(v == 0.0))),
                v => Value::Set((0..self.n()).map(|i| !v.truth(i)).collect()),
            }),
            Expr::Binary(op, a, b) => {
                let (a, b) = (self.eval(a, mask)?, self.eval(b, mask)?);
                self.binary(*op, a, b, mask)
            }
            Expr::Call(f, args) => self.call(*f, args, mask),
        }
    }

    fn binary(&self, op: BinOp, a: Value, b: Value, mask: &[bool]) -> Result<Value, MdlError> {
        use BinOp::*;
        let logic = |f: fn(bool, bool) -> bool| -> Value {
            match (&a, &b) {
                (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(f64::from(u8::from(f(*x != 0.0, *y != 0.0)))),
                _ => Value::Set((0..self.n()).map(|i| f(a.truth(i), b.truth(i))).collect()),
            }
        };
        let compare = |f: fn(f64, f64) -> bool| -> Value {
            match (&a, &b) {
                (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(f64::from(u8::from(f(*x, *y)))),
                _ => Value::Set((0..self.n()).map(|i| f(a.at(i), b.at(i))).collect()),
            }
        };
        Ok(match op {
            Add | Sub | Mul | Div | Pow => return self.arith(op, a, b, mask),
            And => logic(|x, y| x && y),
            Or => logic(|x, y| x || y),
            Diff => logic(|x, y| x && !y),
            Eq => compare(|x, y| x == y),
            Ne => compare(|x, y| x != y),
            Lt => compare(|x, y| x < y),
            Le => compare(|x, y| x <= y),
            Gt => compare(|x, y| x > y),
            Ge => compare(|x, y| x >= y),
        })
    }

    fn scalar_op(&self, op: BinOp, x: f64, y: f64) -> Result<f64, MdlError> {
        Ok(match op {
            BinOp::Add => x + y,
            BinOp::Sub => x - y,
            BinOp::Mul => x * y,
            BinOp::Div if y == 0.0 => return Err(MdlError::DivisionByZero { line: self.line }),
            BinOp::Div => x / y,
            BinOp::Pow if x == 0.0 && y < 0.0 => return Err(MdlError::DivisionByZero { line: self.line }),
            BinOp::Pow if x < 0.0 && libm::trunc(y) != y => {
                return Err(MdlError::InvalidOperation {
                    line: self.line,
                    what: "negative base with a fractional exponent",
                })
            }
            BinOp::Pow => libm::pow(x, y),
            _ => unreachable!("not an arithmetic operator"),
        })
    }

    /// Pointwise arithmetic; domain errors count only inside `mask`.
    fn arith(&self, op: BinOp, a: Value, b: Value, mask: &[bool]) -> Result<Value, MdlError> {
        if let (Value::Scalar(x), Value::Scalar(y)) = (&a, &b) {
            return self.scalar_op(op, *x, *y).map(Value::Scalar);
        }
        (0..self.n())
            .map(|i| match self.scalar_op(op, a.at(i), b.at(i)) {
                Ok(v) => Ok(v),
                Err(e) if mask[i] => Err(e),
                Err(_) => Ok(f64::NAN),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Value::Vector)
    }

    fn map(&self, v: Value, mask: &[bool], f: impl Fn(f64) -> Result<f64, &'static str>) -> Result<Value, MdlError> {
        let err = |what| MdlError::InvalidOperation { line: self.line, what };
        match v {
            Value::Scalar(x) => f(x).map(Value::Scalar).map_err(err),
            v => (0..self.n())
                .map(|i| match f(v.at(i)) {
                    Ok(y) => Ok(y),
                    Err(w) if mask[i] => Err(err(w)),
                    Err(_) => Ok(f64::NAN),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Value::Vector),
        }
    }

    fn reduce(&self, v: Value, init: f64, f: fn(f64, f64) -> f64) -> Value {
        match v {
            Value::Scalar(x) => Value::Scalar(x),
            v => Value::Scalar((0..self.n()).map(|i| v.at(i)).fold(init, f)),
        }
    }

    fn call(&self, f: Func, args: &[Expr], mask: &[bool]) -> Result<Value, MdlError> {
        match f {
            Func::Maxe | Func::Mine | Func::Sum => {
                let v = self.eval(&args[0], &self.full())?;
                if self.n() == 0 && f != Func::Sum && !matches!(v, Value::Scalar(_)) {
                    return Err(MdlError::InvalidOperation { line: self.line, what: "extremum of an empty universe" });
                }
                Ok(match f {
                    Func::Maxe => self.reduce(v, f64::NEG_INFINITY, f64::max),
                    Func::Mine => self.reduce(v, f64::INFINITY, f64::min),
                    _ => self.reduce(v, 0.0, |a, b| a + b),
                })
            }
            Func::Max | Func::Min => {
                let (a, b) = (self.eval(&args[0], mask)?, self.eval(&args[1], mask)?);
                let pick = if f == Func::Max { f64::max } else { f64::min };
                Ok(match (&a, &b) {
                    (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(pick(*x, *y)),
                    _ => Value::Vector((0..self.n()).map(|i| pick(a.at(i), b.at(i))).collect()),
                })
            }
            Func::Ln => self.map(self.eval(&args[0], mask)?, mask, |x| {
                if x > 0.0 {
                    Ok(libm::log(x))
                } else {
                    Err("logarithm of a nonpositive value")
                }
            }),
            Func::Exp => self.map(self.eval(&args[0], mask)?, mask, |x| Ok(libm::exp(x))),
            Func::Abs => self.map(self.eval(&args[0], mask)?, mask, |x| Ok(libm::fabs(x))),
            Func::Sign => self.map(self.eval(&args[0], mask)?, mask, |x| {
                Ok(if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                })
            }),
        }
    }

    fn as_mask(&self, v: &Value) -> Result<Vec<bool>, MdlError> {
        match v {
            Value::Set(s) => Ok(s.clone()),
            _ => Err(self.mismatch("expected a set")),
        }
    }

    fn lin(&self, e: &Expr, mask: &[bool]) -> Result<Lin, MdlError> {
        let n = self.n();
        if !e.contains_dollar() {
            let v = self.eval(e, mask)?;
            return Ok(Lin { coef: vec![0.0; n], cst: (0..n).map(|i| v.at(i)).collect(), linear: false });
        }
        match e {
            Expr::Dollar => Ok(Lin { coef: vec![1.0; n], cst: vec![0.0; n], linear: true }),
            Expr::Unary(UnOp::Neg, a) => {
                let a = self.lin(a, mask)?;
                Ok(Lin { coef: a.coef.iter().map(|c| -c).collect(), cst: a.cst.iter().map(|c| -c).collect(), linear: true })
            }
            Expr::Binary(op @ (BinOp::Add | BinOp::Sub), a, b) => {
                let (a, b) = (self.lin(a, mask)?, self.lin(b, mask)?);
                let s = if *op == BinOp::Add { 1.0 } else { -1.0 };
                Ok(Lin {
                    coef: a.coef.iter().zip(&b.coef).map(|(x, y)| x + s * y).collect(),
                    cst: a.cst.iter().zip(&b.cst).map(|(x, y)| x + s * y).collect(),
                    linear: true,
                })
            }
            Expr::Binary(BinOp::Mul, a, b) => {
                let (a, b) = (self.lin(a, mask)?, self.lin(b, mask)?);
                let (l, k) = match (a.linear, b.linear) {
                    (true, false) => (a, b.cst),
                    (false, true) => (b, a.cst),
                    _ => return Err(self.mismatch("product of two terms in $")),
                };
                Ok(Lin {
                    coef: l.coef.iter().zip(&k).map(|(c, k)| c * k).collect(),
                    cst: l.cst.iter().zip(&k).map(|(c, k)| c * k).collect(),
                    linear: true,
                })
            }
            Expr::Binary(BinOp::Div, a, b) if !b.contains_dollar() => {
                let (a, b) = (self.lin(a, mask)?, self.lin(b, mask)?);
                if b.cst.iter().zip(mask).any(|(&d, &m)| m && d == 0.0) {
                    return Err(MdlError::DivisionByZero { line: self.line });
                }
                Ok(Lin {
                    coef: a.coef.iter().zip(&b.cst).map(|(c, d)| c / d).collect(),
                    cst: a.cst.iter().zip(&b.cst).map(|(c, d)| c / d).collect(),
                    linear: true,
                })
            }
            _ => Err(self.mismatch("$ must enter the constraint linearly")),
        }
    }

    fn constraint(&self, name: &str, c: &Constraint) -> Result<(Vec<ConstraintRow>, bool), MdlError> {
        let n = self.n();
        let set = match &c.pattern {
            Pattern::Sum(s) | Pattern::ForEach(s) => {
                let v = self.eval(s, &self.full())?;
                self.as_mask(&v)?
            }
            Pattern::Single(a) => {
                let mut s = vec![false; n];
                s[self.asset(a)?] = true;
                s
            }
        };
        let lhs = self.lin(&c.lhs, &set)?;
        if !lhs.linear {
            return Err(self.mismatch("the left-hand side of a constraint must contain $"));
        }
        if c.rhs.contains_dollar() {
            return Err(self.mismatch("$ may appear only on the left-hand side"));
        }
        let rhs = self.eval(&c.rhs, &set)?;
        let members = (0..n).filter(|&i| set[i]);
        match &c.pattern {
            Pattern::Sum(_) => {
                let Value::Scalar(r) = rhs else {
                    return Err(self.mismatch("a sum constraint needs a scalar right-hand side"));
                };
                let coef = (0..n).map(|i| if set[i] { lhs.coef[i] } else { 0.0 }).collect();
                let rhs = r - members.map(|i| lhs.cst[i]).sum::<f64>();
                let normal = c.rel == Relation::Eq && set.iter().all(|&m| m);
                Ok((vec![ConstraintRow { name: name.to_string(), rel: c.rel, coef, rhs }], normal))
            }
            Pattern::ForEach(_) | Pattern::Single(_) => {
                let single = matches!(c.pattern, Pattern::Single(_));
                let rows = members
                    .map(|i| {
                        let mut coef = vec![0.0; n];
                        coef[i] = lhs.coef[i];
                        let name = if single { name.to_string() } else { format!("{name}[{}]", self.env.universe[i]) };
                        ConstraintRow { name, rel: c.rel, coef, rhs: rhs.at(i) - lhs.cst[i] }
                    })
                    .collect();
                Ok((rows, false))
            }
        }
    }
}

fn universe_of(program: &Program, known: Option<&MomentSet>) -> Result<Vec<String>, MdlError> {
    let Some(Statement { kind: StatementKind::Assign { name, domain: None, value: Expr::List(items) }, line }) =
        program.statements.first()
    else {
        return Err(MdlError::MissingUniverse);
    };
    if name != "all" {
        return Err(MdlError::MissingUniverse);
    }
    let mut listed: Vec<&str> = Vec::new();
    for it in items {
        let ListItem::Name(a) = it else {
            return Err(MdlError::TypeMismatch { line: *line, what: "the universe lists asset names only" });
        };
        if listed.contains(&a.as_str()) {
            return Err(MdlError::DuplicateName { line: *line, name: a.clone() });
        }
        if known.is_some_and(|m| m.index_of(a).is_none()) {
            return Err(MdlError::UnknownName { line: *line, name: a.clone() });
        }
        listed.push(a);
    }
    Ok(match known {
        Some(m) => m.names.iter().filter(|n| listed.contains(&n.as_str())).cloned().collect(),
        None => listed.into_iter().map(String::from).collect(),
    })
}

/// Runs a program. With a moment set, the universe follows its asset order and
/// `er` and `std` start out as its (restricted) vectors.
pub fn evaluate(program: &Program, known: Option<&MomentSet>) -> Result<Env, MdlError> {
    let universe = universe_of(program, known)?;
    let mut env = Env { universe, ..Env::default() };
    env.bindings.insert("all".into(), Value::Set(vec![true; env.universe.len()]));
    env.defined_at.insert("all".into(), program.statements[0].line);
    if let Some(m) = known {
        let sub = m.subset(&env.universe)?;
        env.bindings.insert("er".into(), Value::Vector(sub.er));
        env.bindings.insert("std".into(), Value::Vector(sub.std));
        env.defined_at.insert("er".into(), 0);
        env.defined_at.insert("std".into(), 0);
    }
    for st in &program.statements[1..] {
        let ctx = Ctx { env: &env, known, line: st.line };
        match &st.kind {
            StatementKind::Print(e) => {
                let v = ctx.eval(e, &ctx.full())?;
                let text = format!("{e} = {}", env.render(&v));
                env.print_log.push(text);
            }
            StatementKind::Constraint { name, constraint } => {
                let (rows, normal) = ctx.constraint(name, constraint)?;
                env.rows.extend(rows);
                env.has_normal |= normal;
            }
            StatementKind::Assign { name, domain, value } => {
                let v = assign(&ctx, name, domain.as_ref(), value)?;
                env.defined_at.entry(name.clone()).or_insert(st.line);
                env.bindings.insert(name.clone(), v);
            }
        }
    }
    Ok(env)
}

fn assign(ctx: &Ctx<'_>, name: &str, domain: Option<&Expr>, value: &Expr) -> Result<Value, MdlError> {
    let n = ctx.n();
    let duplicate = || MdlError::DuplicateName { line: ctx.line, name: name.to_string() };
    if ctx.env.universe.iter().any(|a| a == name) || name == "all" {
        return Err(duplicate());
    }
    let existing = ctx.env.bindings.get(name);
    let dom = match domain {
        Some(d) => {
            let v = ctx.eval(d, &ctx.full())?;
            ctx.as_mask(&v)?
        }
        None => match existing {
            None => return ctx.eval(value, &ctx.full()),
            Some(Value::Vector(_)) => ctx.full(),
            Some(_) => return Err(duplicate()),
        },
    };
    if let Expr::List(items) = value {
        for it in items {
            let a = match it {
                ListItem::Name(a) | ListItem::Valued(_, a) | ListItem::Pair(_, a) => a,
            };
            if !dom[ctx.asset(a)?] {
                return Err(MdlError::UniverseViolation { line: ctx.line, name: a.clone() });
            }
        }
    }
    let v = ctx.eval(value, &dom)?;
    Ok(match existing {
        Some(Value::Vector(old)) => Value::Vector((0..n).map(|i| if dom[i] { v.at(i) } else { old[i] }).collect()),
        Some(Value::Set(old)) => Value::Set((0..n).map(|i| if dom[i] { v.truth(i) } else { old[i] }).collect()),
        Some(other) => {
            return Err(MdlError::TypeMismatch {
                line: ctx.line,
                what: if other.kind() == "scalar" { "a scalar has no domain" } else { "incompatible assignment" },
            })
        }
        None => match v {
            Value::Set(s) => Value::Set((0..n).map(|i| dom[i] && s[i]).collect()),
            v => Value::Vector((0..n).map(|i| if dom[i] { v.at(i) } else { 0.0 }).collect()),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdl::parse;

    fn run(src: &str) -> Result<Env, MdlError> {
        evaluate(&parse(src).unwrap(), None)
    }

    #[test]
    fn pairwise_max() {
        let env = run("all = {AA,BB,CC,DD};\na1={1@AA, 2@BB, 3@DD};\nb1={5@BB, 1@DD};\nc1=max(a1, b1);").unwrap();
        assert_eq!(env.vector("c1").unwrap(), &[1.0, 5.0, 0.0, 3.0]);
    }

    #[test]
    fn set_algebra_and_names() {
        let env = run("all={A,B,C,D};\ns={A,B};\nt=~s;\nu=s&{B,C};\nv=s|C;\nw=all\\s\\{C};\nk=sum(s)+sum({});").unwrap();
        assert_eq!(env.members("t").unwrap(), ["C", "D"]);
        assert_eq!(env.members("u").unwrap(), ["B"]);
        assert_eq!(env.members("v").unwrap(), ["A", "B", "C"]);
        assert_eq!(env.members("w").unwrap(), ["D"]);
        assert_eq!(env.scalar("k"), Some(2.0));
    }

    #[test]
    fn domain_assignments() {
        let env = run(concat!(
            "all={A,B,C};\n",
            "p={A,B};\n",
            "x[p]=2;\n",
            "x[C]=7;\n",
            "x[A]=x*10;\n",
            "y=x;\n",
            "y=y+1;\n",
            "r[p]=(x>5)|C;\n",
            "m[all]={0.5@A,1@C};\n"
        ))
        .unwrap();
        assert_eq!(env.vector("x").unwrap(), &[20.0, 2.0, 7.0]);
        assert_eq!(env.vector("y").unwrap(), &[21.0, 3.0, 8.0]);
        assert_eq!(env.members("r").unwrap(), ["A"]);
        assert_eq!(env.vector("m").unwrap(), &[0.5, 0.0, 1.0]);
    }

    #[test]
    fn masked_errors() {
        let env = run("all={A,B};\nz={0@A,2@B};\nq[B]=1/z;\nl[B]=ln(z);").unwrap();
        assert_eq!(env.vector("q").unwrap(), &[0.0, 0.5]);
        assert_eq!(env.vector("l").unwrap()[1], libm::log(2.0));
        assert_eq!(run("all={A,B};\nz={0@A,2@B};\nq=1/z;").unwrap_err(), MdlError::DivisionByZero { line: 3 });
        assert!(matches!(run("all={A};\nq=ln(0);"), Err(MdlError::InvalidOperation { line: 2, .. })));
        assert!(matches!(run("all={A};\nq=(-8)^0.5;"), Err(MdlError::InvalidOperation { .. })));
        assert_eq!(run("all={A};\nq=(-2)^3;").unwrap().scalar("q"), Some(-8.0));
    }

    #[test]
    fn name_errors() {
        assert_eq!(run("x={A};").unwrap_err(), MdlError::MissingUniverse);
        assert!(matches!(run("all={A};\nx=y;"), Err(MdlError::UnknownName { line: 2, .. })));
        assert!(matches!(run("all={A};\nx={B};"), Err(MdlError::UnknownName { .. })));
        assert!(matches!(run("all={A,B};\nx[A]={1@B};"), Err(MdlError::UniverseViolation { line: 2, .. })));
        assert!(matches!(run("all={A};\ns={A};\ns={A};"), Err(MdlError::DuplicateName { line: 3, .. })));
        assert!(matches!(run("all={A};\nA=1;"), Err(MdlError::DuplicateName { .. })));
        assert!(matches!(run("all={A,A};"), Err(MdlError::DuplicateName { .. })));
    }

    #[test]
    fn constraint_rows() {
        let env = run(concat!(
            "all={A,B,C};\n",
            "g={A,C};\n",
            "liq={1@A,0.4@B,0.2@C};\n",
            "normal: sum[all] $ == 1;\n",
            "floor: sum[g] 2*$ - 0.1 >= 0.2;\n",
            "cap: for[g] $ <= 0.5*liq;\n",
            "one: $[B] <= 0.3;\n"
        ))
        .unwrap();
        assert!(env.has_normal);
        let r = &env.rows;
        assert_eq!(r.len(), 5);
        assert_eq!((r[1].coef.as_slice(), r[1].rhs, r[1].rel), (&[2.0, 0.0, 2.0][..], 0.2 + 0.2, Relation::Ge));
        assert_eq!((r[2].name.as_str(), r[2].coef.as_slice(), r[2].rhs), ("cap[A]", &[1.0, 0.0, 0.0][..], 0.5));
        assert_eq!((r[3].name.as_str(), r[3].rhs), ("cap[C]", 0.1));
        assert_eq!((r[4].name.as_str(), r[4].coef.as_slice()), ("one", &[0.0, 1.0, 0.0][..]));
        assert!(matches!(run("all={A};\nc: sum[all] $*$ <= 1;"), Err(MdlError::TypeMismatch { .. })));
        assert!(matches!(run("all={A};\nc: sum[all] $ <= {1@A};"), Err(MdlError::TypeMismatch { .. })));
        assert!(matches!(run("all={A};\nc: sum[all] 1 <= 1;"), Err(MdlError::TypeMismatch { .. })));
    }

    #[test]
    fn print_log() {
        let env = run("all={A,B};\nv={1@A,0.25@B};\nprint v;\nprint sum(v);\nprint v>0.5;").unwrap();
        assert_eq!(env.print_log, ["v = {1.00000e0@A, 2.50000e-1@B}", "sum(v) = 1.25000e0", "(v > 5e-1) = {A}"]);
    }
}

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::lexer::Keyword;

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub statements: Vec<Statement>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub kind: StatementKind,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StatementKind {
    Assign { name: String, domain: Option<Expr>, value: Expr },
    Constraint { name: String, constraint: Constraint },
    Print(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Pattern {
    Sum(Expr),
    ForEach(Expr),
    Single(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub pattern: Pattern,
    pub lhs: Expr,
    pub rel: Relation,
    pub rhs: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ListItem {
    Name(String),
    Valued(f64, String),
    /// `NAME@NAME`, used by derivative declarations.
    Pair(String, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    And,
    Or,
    Diff,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Ln,
    Exp,
    Abs,
    Sign,
    Maxe,
    Mine,
    Sum,
    Max,
    Min,
}

impl Func {
    pub fn from_keyword(k: Keyword) -> Option<Func> {
        Some(match k {
            Keyword::Ln => Func::Ln,
            Keyword::Exp => Func::Exp,
            Keyword::Abs => Func::Abs,
            Keyword::Sign => Func::Sign,
            Keyword::Maxe => Func::Maxe,
            Keyword::Mine => Func::Mine,
            Keyword::Sum => Func::Sum,
            Keyword::Max => Func::Max,
            Keyword::Min => Func::Min,
            Keyword::For | Keyword::Print => return None,
        })
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Max | Func::Min => 2,
            _ => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Func::Ln => "ln",
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Sign => "sign",
            Func::Maxe => "maxe",
            Func::Mine => "mine",
            Func::Sum => "sum",
            Func::Max => "max",
            Func::Min => "min",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Name(String),
    /// The decision vector.
    Dollar,
    List(Vec<ListItem>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn contains_dollar(&self) -> bool {
        match self {
            Expr::Dollar => true,
            Expr::Num(_) | Expr::Name(_) | Expr::List(_) => false,
            Expr::Unary(_, e) => e.contains_dollar(),
            Expr::Binary(_, a, b) => a.contains_dollar() || b.contains_dollar(),
            Expr::Call(_, args) => args.iter().any(Expr::contains_dollar),
        }
    }
}

impl BinOp {
    pub fn as_str(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Diff => "\\",
            BinOp::Eq => "==",
            BinOp::Ne => "~=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
        }
    }
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Eq => "==",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        }
    }
}

// Canonical text: fully parenthesized, reparses to the same tree.

impl fmt::Display for ListItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ListItem::Name(n) => f.write_str(n),
            ListItem::Valued(v, n) => write!(f, "{v:e}@{n}"),
            ListItem::Pair(a, b) => write!(f, "{a}@{b}"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:e}"),
            Expr::Name(n) => f.write_str(n),
            Expr::Dollar => f.write_str("$"),
            Expr::List(items) => {
                f.write_str("{")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str("}")
            }
            Expr::Unary(UnOp::Neg, e) => write!(f, "(- {e})"),
            Expr::Unary(UnOp::Not, e) => write!(f, "(~ {e})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.as_str()),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.as_str())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.pattern {
            Pattern::Sum(s) => write!(f, "sum[{s}] {}", self.lhs)?,
            Pattern::ForEach(s) => write!(f, "for[{s}] {}", self.lhs)?,
            Pattern::Single(a) => write!(f, "$[{a}]")?,
        }
        write!(f, " {} {}", self.rel.as_str(), self.rhs)
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            StatementKind::Assign { name, domain: Some(d), value } => write!(f, "{name}[{d}] = {value};"),
            StatementKind::Assign { name, domain: None, value } => write!(f, "{name} = {value};"),
            StatementKind::Constraint { name, constraint } => write!(f, "{name}: {constraint};"),
            StatementKind::Print(e) => write!(f, "print {e};"),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

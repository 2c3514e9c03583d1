//! The model description language: sets and associative vectors over an
//! asset universe, linear constraints on the decision vector `$`, and the
//! compiler that turns a model into a [`QpModel`](crate::qp::QpModel).

mod ast;
mod compile;
mod eval;
mod inputs;
mod lexer;
mod parser;

use alloc::string::String;

use crate::moments::MomentsError;
use crate::qp::QpError;

pub use ast::{BinOp, Constraint, Expr, Func, ListItem, Pattern, Program, Relation, Statement, StatementKind, UnOp};
pub use compile::{compile, compile_source, extend_universe_decl, CompiledModel};
pub use eval::{evaluate, ConstraintRow, Env, Value};
pub use inputs::{parse_moment_vectors, parse_options, MomentVectors};
pub use lexer::{tokenize, Keyword, Tok, Token, MAX_NAME_LEN};
pub use parser::{parse, parse_expr};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MdlError {
    #[error("line {line}, column {col}: invalid text '{text}'")]
    Lex { line: usize, col: usize, text: String },
    #[error("line {line}, column {col}: expected {expected}, found '{found}'")]
    Parse { line: usize, col: usize, expected: String, found: String },
    #[error("line {line}: unknown name '{name}'")]
    UnknownName { line: usize, name: String },
    #[error("line {line}: '{name}' is outside the assignment domain or the universe")]
    UniverseViolation { line: usize, name: String },
    #[error("line {line}: division by zero")]
    DivisionByZero { line: usize },
    #[error("line {line}: {what}")]
    InvalidOperation { line: usize, what: &'static str },
    #[error("line {line}: '{name}' is already defined")]
    DuplicateName { line: usize, name: String },
    #[error("line {line}: type mismatch: {what}")]
    TypeMismatch { line: usize, what: &'static str },
    #[error("the first statement must define the universe 'all' as a list of assets")]
    MissingUniverse,
    #[error("no equality constraint sums $ over the whole universe")]
    MissingNormalConstraint,
    #[error("option {option} has no '{field}' entry")]
    MissingOptionField { option: String, field: &'static str },
    #[error(transparent)]
    Moments(#[from] MomentsError),
    #[error(transparent)]
    Qp(#[from] QpError),
}

impl MdlError {
    /// Source line the error refers to, when there is one.
    pub fn line(&self) -> Option<usize> {
        use MdlError::*;
        match self {
            Lex { line, .. }
            | Parse { line, .. }
            | UnknownName { line, .. }
            | UniverseViolation { line, .. }
            | DivisionByZero { line }
            | InvalidOperation { line, .. }
            | DuplicateName { line, .. }
            | TypeMismatch { line, .. } => Some(*line),
            _ => None,
        }
    }

    /// Column, for lexical and syntax errors.
    pub fn col(&self) -> Option<usize> {
        match self {
            MdlError::Lex { col, .. } | MdlError::Parse { col, .. } => Some(*col),
            _ => None,
        }
    }
}

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::*;
use super::lexer::{tokenize, Keyword, Tok, Token};
use super::MdlError;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    in_constraint: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> MdlError {
        let t = &self.toks[self.pos];
        MdlError::Parse { line: t.line, col: t.col, expected: expected.to_string(), found: t.tok.to_string() }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), MdlError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("'{tok}'")))
        }
    }

    fn ident(&mut self) -> Result<String, MdlError> {
        match self.peek() {
            Tok::Ident(n) => {
                let n = n.clone();
                self.bump();
                Ok(n)
            }
            _ => Err(self.error("name")),
        }
    }

    fn program(&mut self) -> Result<Program, MdlError> {
        let mut statements = Vec::new();
        while *self.peek() != Tok::Eof {
            statements.push(self.statement()?);
        }
        Ok(Program { statements })
    }

    fn statement(&mut self) -> Result<Statement, MdlError> {
        let line = self.toks[self.pos].line;
        let kind = match self.peek() {
            Tok::Kw(Keyword::Print) => {
                self.bump();
                StatementKind::Print(self.expr()?)
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                match self.peek() {
                    Tok::Colon => {
                        self.bump();
                        self.in_constraint = true;
                        let constraint = self.constraint();
                        self.in_constraint = false;
                        StatementKind::Constraint { name, constraint: constraint? }
                    }
                    Tok::LBracket => {
                        self.bump();
                        let domain = self.expr()?;
                        self.expect(Tok::RBracket)?;
                        self.expect(Tok::Assign)?;
                        StatementKind::Assign { name, domain: Some(domain), value: self.expr()? }
                    }
                    Tok::Assign => {
                        self.bump();
                        StatementKind::Assign { name, domain: None, value: self.expr()? }
                    }
                    _ => return Err(self.error("'=', '[' or ':'")),
                }
            }
            _ => return Err(self.error("statement")),
        };
        self.expect(Tok::Semi)?;
        Ok(Statement { kind, line })
    }

    fn constraint(&mut self) -> Result<Constraint, MdlError> {
        let pattern = match self.peek() {
            Tok::Kw(k @ (Keyword::Sum | Keyword::For)) => {
                let k = *k;
                self.bump();
                self.expect(Tok::LBracket)?;
                let set = self.expr()?;
                self.expect(Tok::RBracket)?;
                if k == Keyword::Sum {
                    Pattern::Sum(set)
                } else {
                    Pattern::ForEach(set)
                }
            }
            Tok::Dollar => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let asset = self.ident()?;
                self.expect(Tok::RBracket)?;
                Pattern::Single(asset)
            }
            _ => return Err(self.error("'sum', 'for' or '$'")),
        };
        let lhs = match pattern {
            Pattern::Single(_) => Expr::Dollar,
            _ => self.additive()?,
        };
        let rel = match self.peek() {
            Tok::Eq => Relation::Eq,
            Tok::Le => Relation::Le,
            Tok::Ge => Relation::Ge,
            _ => return Err(self.error("'==', '<=' or '>='")),
        };
        self.bump();
        let rhs = self.additive()?;
        Ok(Constraint { pattern, lhs, rel, rhs })
    }

    fn expr(&mut self) -> Result<Expr, MdlError> {
        let mut lhs = self.intersection()?;
        loop {
            let op = match self.peek() {
                Tok::Pipe => BinOp::Or,
                Tok::Backslash => BinOp::Diff,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.intersection()?));
        }
    }

    fn intersection(&mut self) -> Result<Expr, MdlError> {
        let mut lhs = self.comparison()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = Expr::Binary(BinOp::And, Box::new(lhs), Box::new(self.comparison()?));
        }
        Ok(lhs)
    }

    fn comparison(&mut self) -> Result<Expr, MdlError> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        Ok(Expr::Binary(op, Box::new(lhs), Box::new(self.additive()?)))
    }

    /// A signed literal in operator position is a binary `+`/`-` followed by
    /// its magnitude.
    fn split_signed(&mut self) -> Option<BinOp> {
        match self.peek() {
            Tok::Plus => Some(BinOp::Add),
            Tok::Minus => Some(BinOp::Sub),
            Tok::Num { value, signed: true } => {
                let value = *value;
                let op = if value.is_sign_negative() { BinOp::Sub } else { BinOp::Add };
                self.toks[self.pos].tok = Tok::Num { value: value.abs(), signed: false };
                return Some(op);
            }
            _ => None,
        }
        .inspect(|_| {
            self.bump();
        })
    }

    fn additive(&mut self) -> Result<Expr, MdlError> {
        let mut lhs = self.multiplicative()?;
        while let Some(op) = self.split_signed() {
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.multiplicative()?));
        }
        Ok(lhs)
    }

    fn multiplicative(&mut self) -> Result<Expr, MdlError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, MdlError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Unary(UnOp::Neg, Box::new(self.unary()?)))
            }
            Tok::Tilde => {
                self.bump();
                Ok(Expr::Unary(UnOp::Not, Box::new(self.unary()?)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, MdlError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, MdlError> {
        match self.peek().clone() {
            Tok::Num { value, .. } => {
                self.bump();
                Ok(Expr::Num(value))
            }
            Tok::Ident(n) => {
                self.bump();
                Ok(Expr::Name(n))
            }
            Tok::Dollar if self.in_constraint => {
                self.bump();
                Ok(Expr::Dollar)
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::LBrace => {
                self.bump();
                self.list()
            }
            Tok::Kw(k) => {
                let Some(func) = Func::from_keyword(k) else {
                    return Err(self.error("expression"));
                };
                self.bump();
                self.expect(Tok::LParen)?;
                let mut args = Vec::new();
                for i in 0..func.arity() {
                    if i > 0 {
                        self.expect(Tok::Comma)?;
                    }
                    args.push(self.expr()?);
                }
                self.expect(Tok::RParen)?;
                Ok(Expr::Call(func, args))
            }
            _ => Err(self.error("expression")),
        }
    }

    fn list(&mut self) -> Result<Expr, MdlError> {
        let mut items = Vec::new();
        if *self.peek() == Tok::RBrace {
            self.bump();
            return Ok(Expr::List(items));
        }
        loop {
            let item = match self.peek().clone() {
                Tok::Num { value, .. } => {
                    self.bump();
                    self.expect(Tok::At)?;
                    ListItem::Valued(value, self.ident()?)
                }
                Tok::Ident(n) => {
                    self.bump();
                    if *self.peek() == Tok::At {
                        self.bump();
                        ListItem::Pair(n, self.ident()?)
                    } else {
                        ListItem::Name(n)
                    }
                }
                _ => return Err(self.error("list item")),
            };
            items.push(item);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RBrace => {
                    self.bump();
                    return Ok(Expr::List(items));
                }
                _ => return Err(self.error("',' or '}'")),
            }
        }
    }
}

/// Parses MDL source into a statement list.
pub fn parse(source: &str) -> Result<Program, MdlError> {
    let toks = tokenize(source)?;
    Parser { toks, pos: 0, in_constraint: false }.program()
}

/// Parses a single expression, as used by `print`.
pub fn parse_expr(source: &str) -> Result<Expr, MdlError> {
    let toks = tokenize(source)?;
    let mut p = Parser { toks, pos: 0, in_constraint: false };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of input"));
    }
    Ok(e)
}

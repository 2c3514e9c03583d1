use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::MdlError;

/// Longest admissible identifier.
pub const MAX_NAME_LEN: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Abs,
    Exp,
    For,
    Ln,
    Max,
    Min,
    Maxe,
    Mine,
    Print,
    Sign,
    Sum,
}

impl Keyword {
    pub fn from_word(w: &str) -> Option<Keyword> {
        Some(match w {
            "abs" => Keyword::Abs,
            "exp" => Keyword::Exp,
            "for" => Keyword::For,
            "ln" => Keyword::Ln,
            "max" => Keyword::Max,
            "min" => Keyword::Min,
            "maxe" => Keyword::Maxe,
            "mine" => Keyword::Mine,
            "print" => Keyword::Print,
            "sign" => Keyword::Sign,
            "sum" => Keyword::Sum,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Abs => "abs",
            Keyword::Exp => "exp",
            Keyword::For => "for",
            Keyword::Ln => "ln",
            Keyword::Max => "max",
            Keyword::Min => "min",
            Keyword::Maxe => "maxe",
            Keyword::Mine => "mine",
            Keyword::Print => "print",
            Keyword::Sign => "sign",
            Keyword::Sum => "sum",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Kw(Keyword),
    /// `signed` is set when the literal carried its own `+`/`-`.
    Num { value: f64, signed: bool },
    Dollar,
    Assign,
    Eq,
    Ne,
    Le,
    Ge,
    Lt,
    Gt,
    Tilde,
    Amp,
    Pipe,
    Backslash,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    At,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(n) => return f.write_str(n),
            Tok::Kw(k) => k.as_str(),
            Tok::Num { value, .. } => return write!(f, "{value}"),
            Tok::Dollar => "$",
            Tok::Assign => "=",
            Tok::Eq => "==",
            Tok::Ne => "~=",
            Tok::Le => "<=",
            Tok::Ge => ">=",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Tilde => "~",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Backslash => "\\",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Caret => "^",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::At => "@",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

struct Lexer<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
    line: usize,
    line_start: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&self, ahead: usize) -> Option<u8> {
        self.src.get(self.pos + ahead).copied()
    }

    fn col(&self) -> usize {
        self.text[self.line_start..self.pos].chars().count() + 1
    }

    fn error(&self, start: usize, col: usize, end: usize) -> MdlError {
        let end = end.clamp(start + 1, self.src.len()).max(start);
        MdlError::Lex {
            line: self.line,
            col,
            text: self.text.get(start..end).unwrap_or("").to_string(),
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek(0) {
            match c {
                b'\n' => {
                    self.pos += 1;
                    self.line += 1;
                    self.line_start = self.pos;
                }
                b'#' => {
                    while self.peek(0).is_some_and(|c| c != b'\n') {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.peek(0).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn number(&mut self, col: usize) -> Result<Tok, MdlError> {
        let start = self.pos;
        let signed = matches!(self.peek(0), Some(b'+' | b'-'));
        if signed {
            self.pos += 1;
        }
        self.digits();
        if self.peek(0) == Some(b'.') {
            self.pos += 1;
            if self.digits() == 0 {
                return Err(self.error(start, col, self.pos));
            }
        }
        if matches!(self.peek(0), Some(b'e' | b'E')) {
            self.pos += 1;
            if matches!(self.peek(0), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                return Err(self.error(start, col, self.pos + 1));
            }
        }
        if self.peek(0).is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_' || c == b'.') {
            return Err(self.error(start, col, self.pos + 1));
        }
        let text = &self.text[start..self.pos];
        let value: f64 = text.parse().map_err(|_| self.error(start, col, self.pos))?;
        if !value.is_finite() {
            return Err(self.error(start, col, self.pos));
        }
        Ok(Tok::Num { value, signed })
    }

    /// Next significant byte after the current position, ignoring blanks and comments.
    fn next_significant(&self) -> (Option<u8>, Option<u8>) {
        let mut i = self.pos;
        while let Some(&c) = self.src.get(i) {
            if c == b'#' {
                while self.src.get(i).is_some_and(|&c| c != b'\n') {
                    i += 1;
                }
            } else if c.is_ascii_whitespace() {
                i += 1;
            } else {
                return (Some(c), self.src.get(i + 1).copied());
            }
        }
        (None, None)
    }

    fn word(&mut self, col: usize) -> Result<Tok, MdlError> {
        let start = self.pos;
        while self.peek(0).is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_' || c == b'.') {
            self.pos += 1;
        }
        let w = &self.text[start..self.pos];
        if w.len() > MAX_NAME_LEN {
            return Err(self.error(start, col, self.pos));
        }
        if let Some(k) = Keyword::from_word(w) {
            // A reserved word in definition position.
            match self.next_significant() {
                (Some(b'='), second) if second != Some(b'=') => return Err(self.error(start, col, self.pos)),
                (Some(b':'), _) => return Err(self.error(start, col, self.pos)),
                _ => return Ok(Tok::Kw(k)),
            }
        }
        Ok(Tok::Ident(w.to_string()))
    }

    fn next(&mut self) -> Result<Token, MdlError> {
        self.skip_trivia();
        let (line, col) = (self.line, self.col());
        let Some(c) = self.peek(0) else {
            return Ok(Token { tok: Tok::Eof, line, col });
        };
        let two = |a: u8| self.peek(1) == Some(a);
        let (tok, len) = match c {
            b'0'..=b'9' => return self.number(col).map(|tok| Token { tok, line, col }),
            b'+' | b'-' if self.peek(1).is_some_and(|d| d.is_ascii_digit()) => {
                return self.number(col).map(|tok| Token { tok, line, col });
            }
            c if c.is_ascii_alphabetic() => return self.word(col).map(|tok| Token { tok, line, col }),
            b'=' if two(b'=') => (Tok::Eq, 2),
            b'=' => (Tok::Assign, 1),
            b'~' if two(b'=') => (Tok::Ne, 2),
            b'~' => (Tok::Tilde, 1),
            b'<' if two(b'=') => (Tok::Le, 2),
            b'<' => (Tok::Lt, 1),
            b'>' if two(b'=') => (Tok::Ge, 2),
            b'>' => (Tok::Gt, 1),
            b'$' => (Tok::Dollar, 1),
            b'&' => (Tok::Amp, 1),
            b'|' => (Tok::Pipe, 1),
            b'\\' => (Tok::Backslash, 1),
            b'+' => (Tok::Plus, 1),
            b'-' => (Tok::Minus, 1),
            b'*' => (Tok::Star, 1),
            b'/' => (Tok::Slash, 1),
            b'^' => (Tok::Caret, 1),
            b'(' => (Tok::LParen, 1),
            b')' => (Tok::RParen, 1),
            b'[' => (Tok::LBracket, 1),
            b']' => (Tok::RBracket, 1),
            b'{' => (Tok::LBrace, 1),
            b'}' => (Tok::RBrace, 1),
            b',' => (Tok::Comma, 1),
            b';' => (Tok::Semi, 1),
            b':' => (Tok::Colon, 1),
            b'@' => (Tok::At, 1),
            _ => {
                let width = self.text[self.pos..].chars().next().map_or(1, char::len_utf8);
                return Err(self.error(self.pos, col, self.pos + width));
            }
        };
        self.pos += len;
        Ok(Token { tok, line, col })
    }
}

/// Splits MDL source into tokens, ending with [`Tok::Eof`].
pub fn tokenize(source: &str) -> Result<Vec<Token>, MdlError> {
    let mut lx = Lexer { src: source.as_bytes(), text: source, pos: 0, line: 1, line_start: 0 };
    let mut out = Vec::new();
    loop {
        let t = lx.next()?;
        let end = t.tok == Tok::Eof;
        out.push(t);
        if end {
            return Ok(out);
        }
    }
}

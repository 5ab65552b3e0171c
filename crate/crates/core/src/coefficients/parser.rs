//! Recursive-descent parser for coefficient expressions.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := unary ('^' factor)?
//! unary  := '-'? atom
//! atom   := number | 'x' | func '(' expr ')' | '(' expr ')'
//! func   := 'sqrt' | 'exp' | 'log'
//! ```
//!
//! The exponent of `^` must be a nonnegative integer literal.

use thiserror::Error;

use super::expr::{Expr, Func};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEnd(&'static str),
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("malformed number `{0}`")]
    BadNumber(String),
    #[error("exponent must be a nonnegative integer literal")]
    BadExponent,
    #[error("trailing input")]
    Trailing,
}

/// Syntax error. `position` is the 1-based byte position in the input where
/// the problem was detected; end of input is `len + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {position}: {kind}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    p.skip_ws();
    if p.at_end() {
        return Err(p.error(ParseErrorKind::Empty));
    }
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error(ParseErrorKind::Trailing));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        self.error_at(self.pos, kind)
    }

    fn error_at(&self, pos: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { position: pos + 1, kind }
    }

    /// Consumes `c` (after whitespace) if it is next.
    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::add(lhs, self.term()?);
            } else if self.eat(b'-') {
                lhs = Expr::sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::mul(lhs, self.factor()?);
            } else if self.eat(b'/') {
                lhs = Expr::div(lhs, self.factor()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.unary()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let start = self.pos;
        match self.factor()? {
            Expr::Num(v) if v >= 0.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX) => {
                Ok(Expr::pow(base, v as u32))
            }
            _ => Err(self.error_at(start, ParseErrorKind::BadExponent)),
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            // A negated literal is a negative number, so printed constants re-parse exactly.
            match self.atom()? {
                Expr::Num(v) if v.is_sign_positive() => Ok(Expr::num(-v)),
                e => Ok(Expr::neg(e)),
            }
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error(ParseErrorKind::UnexpectedEnd("an operand"))),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.close_paren()?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                let ident = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                if ident == "x" {
                    return Ok(Expr::var());
                }
                let Some(func) = Func::from_name(ident) else {
                    return Err(
                        self.error_at(start, ParseErrorKind::UnknownIdentifier(ident.to_string()))
                    );
                };
                if !self.eat(b'(') {
                    return Err(self.error(ParseErrorKind::Expected("`(` after function name")));
                }
                let arg = self.expr()?;
                self.close_paren()?;
                Ok(Expr::call(func, arg))
            }
            Some(_) => {
                let ch = std::str::from_utf8(&self.src[start..])
                    .ok()
                    .and_then(|s| s.chars().next())
                    .unwrap_or('\u{fffd}');
                Err(self.error(ParseErrorKind::UnexpectedChar(ch)))
            }
        }
    }

    fn close_paren(&mut self) -> Result<(), ParseError> {
        if self.eat(b')') {
            return Ok(());
        }
        if self.at_end() {
            Err(self.error(ParseErrorKind::UnexpectedEnd("`)`")))
        } else {
            Err(self.error(ParseErrorKind::Expected("`)`")))
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'.') {
            self.pos += 1;
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                // Not an exponent; leave the `e` for the caller to reject.
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        text.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Expr::num)
            .ok_or_else(|| self.error_at(start, ParseErrorKind::BadNumber(text.to_string())))
    }
}

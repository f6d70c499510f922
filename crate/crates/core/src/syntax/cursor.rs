use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::term::{canonical_weight_literal, Param, Term, Var};
use crate::interp::WeightExpr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

/// Character cursor shared by the term, spec and PEPA parsers.
///
/// Whitespace and `#`/`//` line comments are skipped by every token method.
pub struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    pub fn error_at(&self, offset: usize, message: impl Into<String>) -> ParseError {
        let before = &self.src[..offset.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ParseError { offset, line, column, message: message.into() }
    }

    pub fn skip_ws(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') || trimmed.starts_with("//") {
                let end = trimmed.find('\n').unwrap_or(trimmed.len());
                self.pos += end;
            } else {
                break;
            }
        }
    }

    /// Skips spaces and tabs only (statement-separating newlines are kept).
    pub fn skip_inline_ws(&mut self) {
        let rest = self.rest();
        let trimmed = rest.trim_start_matches([' ', '\t', '\r']);
        self.pos += rest.len() - trimmed.len();
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    pub fn starts_with(&mut self, s: &str) -> bool {
        self.skip_ws();
        self.rest().starts_with(s)
    }

    pub fn eat(&mut self, s: &str) -> bool {
        if self.starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    /// Like [`Cursor::eat`] but only matches `s` as a whole word.
    pub fn eat_keyword(&mut self, s: &str) -> bool {
        self.skip_ws();
        let rest = self.rest();
        if rest.starts_with(s) && !rest[s.len()..].starts_with(is_ident_char) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            let found: String = self.rest().chars().take(12).collect();
            Err(self.error(format!("expected `{s}`, found `{found}`")))
        }
    }

    pub fn peek_ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let first = rest.chars().next()?;
        if !(first.is_alphabetic() || first == '_') {
            return None;
        }
        let len = rest.find(|c: char| !is_ident_char(c)).unwrap_or(rest.len());
        Some(&rest[..len])
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek_ident() {
            Some(id) => {
                self.pos += id.len();
                Ok(id.to_string())
            }
            None => Err(self.error("expected an identifier")),
        }
    }

    /// An unsigned numeric literal: `n`, `p/q` or `d.ddd`.
    pub fn number(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = self.rest();
        let mut len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected a number"));
        }
        let tail = &rest[len..];
        if let Some(after) = tail.strip_prefix('/') {
            let d = after.find(|c: char| !c.is_ascii_digit()).unwrap_or(after.len());
            if d > 0 {
                len += 1 + d;
            }
        } else if let Some(after) = tail.strip_prefix('.') {
            let d = after.find(|c: char| !c.is_ascii_digit()).unwrap_or(after.len());
            if d > 0 {
                len += 1 + d;
            }
        }
        self.pos += len;
        let lit = &self.src[start..self.pos];
        if crate::weights::parse_rational(lit).is_none() {
            return Err(self.error_at(start, format!("invalid number `{lit}`")));
        }
        Ok(canonical_weight_literal(lit))
    }

    /// A weight literal: a number, `inf`, `tt` or `ff`.
    pub fn weight_literal(&mut self) -> Result<String, ParseError> {
        for kw in ["inf", "tt", "ff"] {
            if self.eat_keyword(kw) {
                return Ok(kw.to_string());
            }
        }
        self.number()
    }

    pub fn meta(&mut self) -> Result<String, ParseError> {
        self.expect("?")?;
        self.ident()
    }

    pub fn label_set(&mut self) -> Result<BTreeSet<String>, ParseError> {
        self.expect("{")?;
        let mut out = BTreeSet::new();
        if self.eat("}") {
            return Ok(out);
        }
        loop {
            out.insert(self.ident()?);
            if self.eat("}") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    pub fn param(&mut self) -> Result<Param, ParseError> {
        match self.peek() {
            Some('{') => Ok(Param::Set(self.label_set()?)),
            Some('?') => Ok(Param::Meta(self.meta()?)),
            Some('[') => {
                self.expect("[")?;
                let e = self.expr()?;
                self.expect("]")?;
                Ok(Param::Expr(e))
            }
            Some(c) if c.is_ascii_digit() => Ok(Param::Weight(self.number()?)),
            Some(_) => {
                let id = self.ident()?;
                if matches!(id.as_str(), "inf" | "tt" | "ff") {
                    Ok(Param::Weight(id))
                } else {
                    Ok(Param::Name(id))
                }
            }
            None => Err(self.error("expected a parameter")),
        }
    }

    pub fn term(&mut self, is_var: &dyn Fn(&str) -> bool) -> Result<Term, ParseError> {
        if self.eat("%") {
            return Ok(Term::Var(Var::Fn(self.ident()?)));
        }
        let start = self.pos;
        let op = self.ident()?;
        let mut params = vec![];
        let mut args = vec![];
        let mut bare = true;
        if self.starts_with("{") {
            bare = false;
            self.expect("{")?;
            if !self.eat("}") {
                loop {
                    params.push(self.param()?);
                    if self.eat("}") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
        }
        if self.starts_with("(") {
            bare = false;
            self.expect("(")?;
            if !self.eat(")") {
                loop {
                    args.push(self.term(is_var)?);
                    if self.eat(")") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
        }
        if bare && is_var(&op) {
            return Ok(Term::Var(Var::Proc(op)));
        }
        if op.is_empty() {
            return Err(self.error_at(start, "empty operator name"));
        }
        Ok(Term::app(op, params, args))
    }

    pub fn expr(&mut self) -> Result<WeightExpr, ParseError> {
        let mut lhs = self.expr_product()?;
        while self.eat("+") {
            let rhs = self.expr_product()?;
            lhs = WeightExpr::Add(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn expr_product(&mut self) -> Result<WeightExpr, ParseError> {
        let mut lhs = self.expr_atom()?;
        loop {
            if self.eat("*") {
                let rhs = self.expr_atom()?;
                lhs = WeightExpr::Mul(Box::new(lhs), Box::new(rhs));
            } else if self.eat("/") {
                let rhs = self.expr_atom()?;
                lhs = WeightExpr::Div(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn expr_atom(&mut self) -> Result<WeightExpr, ParseError> {
        match self.peek() {
            Some('(') => {
                self.expect("(")?;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Some('?') => Ok(WeightExpr::Meta(self.meta()?)),
            Some(c) if c.is_ascii_digit() => {
                // literals inside expressions never use the p/q form; `/` is division
                let start = self.pos;
                let rest = self.rest();
                let mut len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
                if let Some(after) = rest[len..].strip_prefix('.') {
                    let d = after.find(|c: char| !c.is_ascii_digit()).unwrap_or(after.len());
                    if d > 0 {
                        len += 1 + d;
                    }
                }
                self.pos += len;
                Ok(WeightExpr::Lit(canonical_weight_literal(&self.src[start..self.pos])))
            }
            Some(_) => {
                let id = self.ident()?;
                match id.as_str() {
                    "inf" | "tt" | "ff" => Ok(WeightExpr::Lit(id)),
                    "min" | "max" => {
                        self.expect("(")?;
                        let a = self.expr()?;
                        self.expect(",")?;
                        let b = self.expr()?;
                        self.expect(")")?;
                        let (a, b) = (Box::new(a), Box::new(b));
                        Ok(if id == "min" { WeightExpr::Min(a, b) } else { WeightExpr::Max(a, b) })
                    }
                    "total" | "size" | "point" => {
                        self.expect("(")?;
                        let start = self.pos;
                        let k: usize = self
                            .number()?
                            .parse()
                            .map_err(|_| self.error_at(start, "expected a child index"))?;
                        self.expect(")")?;
                        Ok(match id.as_str() {
                            "total" => WeightExpr::Total(k),
                            "size" => WeightExpr::Size(k),
                            _ => WeightExpr::Point(k),
                        })
                    }
                    _ => Ok(WeightExpr::Var(id)),
                }
            }
            None => Err(self.error("expected an expression")),
        }
    }
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

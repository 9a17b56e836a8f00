//! Recursive-descent parser for the expression grammar. Positions in errors
//! are zero-based character offsets into the input.

use super::{Func, ScalarExpr};
use crate::error::ParseError;

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    dim: usize,
    text: &'a str,
}

pub fn parse(text: &str, n: usize) -> Result<ScalarExpr, ParseError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        dim: n,
        text,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(ParseError::Syntax {
            position: p.pos,
            message: format!("unexpected `{}`", p.chars[p.pos]),
        });
    }
    Ok(e)
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some('/') => {
                    self.pos += 1;
                    acc = acc.div(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    // factor := unary ("^" factor)?  — right associative, exponent must
    // fold to a constant.
    fn factor(&mut self) -> Result<ScalarExpr, ParseError> {
        let base = self.unary()?;
        self.skip_ws();
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let exp_pos = self.pos;
            let exponent = self.factor()?;
            let c = exponent
                .simplify()
                .as_const()
                .ok_or(ParseError::NonConstantExponent { position: exp_pos })?;
            return Ok(base.pow(c));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<ScalarExpr, ParseError> {
        self.skip_ws();
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<ScalarExpr, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(ParseError::Syntax {
                position: self.pos,
                message: "unexpected end of input".into(),
            }),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(ParseError::Syntax {
                        position: self.pos,
                        message: "expected `)`".into(),
                    });
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(c) => Err(ParseError::Syntax {
                position: self.pos,
                message: format!("unexpected `{c}`"),
            }),
        }
    }

    fn number(&mut self) -> Result<ScalarExpr, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.peek() == Some('.') {
            self.pos += 1;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        // Exponent part only when followed by a digit (optionally signed), so
        // `2e` stays "number 2, identifier e".
        if matches!(self.peek(), Some('e') | Some('E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+') | Some('-')) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = mark;
            }
        }
        let slice: String = self.chars[start..self.pos].iter().collect();
        slice
            .parse::<f64>()
            .map(ScalarExpr::constant)
            .map_err(|_| ParseError::Syntax {
                position: start,
                message: format!("invalid number `{slice}`"),
            })
    }

    fn ident(&mut self) -> Result<ScalarExpr, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        if let Some(rest) = name.strip_prefix('x') {
            if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
                let index: usize = rest.parse().map_err(|_| ParseError::Syntax {
                    position: start,
                    message: format!("invalid coordinate `{name}`"),
                })?;
                if index == 0 || index > self.dim {
                    return Err(ParseError::CoordOutOfRange {
                        position: start,
                        index,
                        dim: self.dim,
                    });
                }
                return Ok(ScalarExpr::coord(index - 1));
            }
        }
        match name.as_str() {
            "pi" => Ok(ScalarExpr::pi()),
            "e" => Ok(ScalarExpr::euler()),
            _ => {
                if let Some(f) = Func::from_name(&name) {
                    self.skip_ws();
                    if !self.eat('(') {
                        return Err(ParseError::Syntax {
                            position: self.pos,
                            message: format!("expected `(` after `{}`", f.name()),
                        });
                    }
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return Err(ParseError::Syntax {
                            position: self.pos,
                            message: "expected `)`".into(),
                        });
                    }
                    return Ok(arg.func(f));
                }
                let _ = self.text;
                Err(ParseError::UnknownIdent {
                    position: start,
                    name,
                })
            }
        }
    }
}

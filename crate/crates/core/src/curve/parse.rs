//! Expression grammar for curve files.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('+' | '-') unary | power
//! power := atom ('^' exponent)?
//! exponent := ['+' | '-'] integer | '(' ['+' | '-'] integer ')'
//! atom  := integer | 'w' | 'z' | '(' expr ')'
//! ```
//!
//! Rationals are written as integer division, e.g. `(1/2)*z`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::algebra::{RationalFunction, Scalar};
use crate::error::{Error, Result};

type Rf = RationalFunction<Scalar>;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Gen,
    Var,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

/// Error position inside an expression, as a 0-based character offset.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprError {
    pub offset: usize,
    pub message: String,
}

fn lex(src: &str) -> std::result::Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                let st = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[st..i].iter().collect();
                out.push((st, Tok::Int(digits.parse().expect("digits"))));
                continue;
            }
            'w' => Tok::Gen,
            'z' => Tok::Var,
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => return Err(ExprError { offset: i, message: format!("unexpected character `{other}`") }),
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> std::result::Result<T, ExprError> {
        Err(ExprError { offset: self.offset(), message: message.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> std::result::Result<Rf, ExprError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = acc.plus(&self.term()?);
            } else if self.eat(&Tok::Minus) {
                acc = acc.minus(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> std::result::Result<Rf, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                acc = acc.times(&self.unary()?);
            } else if self.peek() == Some(&Tok::Slash) {
                let at = self.offset();
                self.pos += 1;
                let d = self.unary()?;
                acc = acc.divide(&d).map_err(|_| ExprError { offset: at, message: "division by zero".into() })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> std::result::Result<Rf, ExprError> {
        if self.eat(&Tok::Minus) {
            return Ok(self.unary()?.negate());
        }
        if self.eat(&Tok::Plus) {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> std::result::Result<Rf, ExprError> {
        let base = self.atom()?;
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        let at = self.offset();
        let e = self.exponent()?;
        base.pow(e).map_err(|_| ExprError { offset: at, message: "negative power of zero".into() })
    }

    fn exponent(&mut self) -> std::result::Result<i64, ExprError> {
        let paren = self.eat(&Tok::LParen);
        let neg = if self.eat(&Tok::Minus) {
            true
        } else {
            self.eat(&Tok::Plus);
            false
        };
        let e = match self.peek() {
            Some(Tok::Int(n)) => {
                let n: i64 = n.try_into().or_else(|_| self.err("exponent too large"))?;
                if n > 4096 {
                    return self.err("exponent too large");
                }
                self.pos += 1;
                n
            }
            _ => return self.err("expected integer exponent"),
        };
        if paren && !self.eat(&Tok::RParen) {
            return self.err("expected `)`");
        }
        Ok(if neg { -e } else { e })
    }

    fn atom(&mut self) -> std::result::Result<Rf, ExprError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Rf::constant(Scalar::rational(BigRational::from_integer(n))))
            }
            Some(Tok::Gen) => {
                self.pos += 1;
                Ok(Rf::constant(Scalar::theta()))
            }
            Some(Tok::Var) => {
                self.pos += 1;
                Ok(Rf::var())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(_) => self.err("expected a number, `w`, `z` or `(`"),
            None => self.err("unexpected end of expression"),
        }
    }
}

/// Parse an expression into a rational function of `z` over ℚ(θ).
pub fn parse_expr(src: &str) -> std::result::Result<Rf, ExprError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: src.chars().count() };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// Parse a standalone expression, reporting errors at line 1.
pub fn parse_expression(src: &str) -> Result<Rf> {
    parse_expr(src).map_err(|e| Error::Parse { line: 1, column: e.offset + 1, message: e.message })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laurent_and_generator() {
        let y = parse_expr("z^-2 + (1/2)*z").unwrap();
        let expect = Rf::laurent_monomial(Scalar::int(1), -2).plus(&Rf::laurent_monomial(Scalar::frac(1, 2), 1));
        assert_eq!(y, expect);
        let s = parse_expr("w^2 * z").unwrap();
        assert_eq!(s, Rf::laurent_monomial(Scalar::theta_pow(2), 1));
        assert_eq!(parse_expr("-z^2").unwrap(), Rf::laurent_monomial(Scalar::int(-1), 2));
        assert_eq!(parse_expr("z^(-1)").unwrap(), parse_expr("1/z").unwrap());
    }

    #[test]
    fn errors_have_offsets() {
        let e = parse_expr("z + * 2").unwrap_err();
        assert_eq!(e.offset, 4);
        let e = parse_expr("z + x").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(parse_expr("1/(z-z)").is_err());
        assert!(parse_expr("(z + 1").is_err());
    }
}

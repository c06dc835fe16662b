//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' exponent)?
//! exponent := ['-'] integer | '(' ['-'] integer ')'
//! atom   := number | identifier | func '(' expr ')' | '(' expr ')'
//! func   := exp | ln | sin | cos
//! ```

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Pow};

use super::expr::{normalize, Expr, Node, Rational};
use crate::error::Error;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, Error> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit()) {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let int_part = &text[start..i];
            let mut frac_part = "";
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                let fs = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                frac_part = &text[fs..i];
            }
            let digits = format!("{int_part}{frac_part}");
            let numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
                .map_err(|e| Error::Parse { pos: start, message: e.to_string() })?;
            let denom: BigInt = BigInt::from(10u32).pow(frac_part.len() as u32);
            out.push((start, Tok::Num(Rational::new(numer, denom))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(Error::Parse {
                        pos: i,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            out.push((i, tok));
            i += c.len_utf8();
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    coords: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, Error> {
        Err(Error::Parse {
            pos: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), Error> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {tok:?}"))
        }
    }

    fn expr(&mut self) -> Result<Expr, Error> {
        let mut terms = vec![self.term()?];
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let t = self.term()?;
            terms.push(if op == '-' { Expr::raw(Node::Neg(t)) } else { t });
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::raw(Node::Sum(terms))
        })
    }

    fn term(&mut self) -> Result<Expr, Error> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' {
                Expr::raw(Node::Product(vec![acc, rhs]))
            } else {
                Expr::raw(Node::Quotient(acc, rhs))
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, Error> {
        if self.peek() == Some(&Tok::Op('-')) {
            self.pos += 1;
            return Ok(Expr::raw(Node::Neg(self.unary()?)));
        }
        self.power()
    }

    fn integer_exponent(&mut self) -> Result<i32, Error> {
        let negative = if self.peek() == Some(&Tok::Op('-')) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.peek().cloned() {
            Some(Tok::Num(q)) if q.denom().is_one() => {
                self.pos += 1;
                let k: i32 = q
                    .numer()
                    .try_into()
                    .map_err(|_| Error::Parse { pos: self.offset(), message: "exponent too large".into() })?;
                Ok(if negative { -k } else { k })
            }
            _ => self.err("exponent must be an integer literal"),
        }
    }

    fn power(&mut self) -> Result<Expr, Error> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Op('^')) {
            self.pos += 1;
            let k = if self.peek() == Some(&Tok::LParen) {
                self.pos += 1;
                let k = self.integer_exponent()?;
                self.expect(Tok::RParen)?;
                k
            } else {
                self.integer_exponent()?
            };
            return Ok(Expr::raw(Node::IntegerPower(base, k)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, Error> {
        match self.peek().cloned() {
            Some(Tok::Num(q)) => {
                self.pos += 1;
                Ok(Expr::constant(q))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if self.toks.get(self.pos + 1).map(|(_, t)| t) == Some(&Tok::LParen) {
                    let start = self.offset();
                    self.pos += 2;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen)?;
                    let node = match name.as_str() {
                        "exp" => Node::Exp(arg),
                        "ln" => Node::Ln(arg),
                        "sin" => Node::Sin(arg),
                        "cos" => Node::Cos(arg),
                        _ => {
                            return Err(Error::Parse {
                                pos: start,
                                message: format!("unknown function `{name}`"),
                            })
                        }
                    };
                    return Ok(Expr::raw(node));
                }
                if !self.coords.contains(&name.as_str()) {
                    return Err(Error::UnknownSymbol(name));
                }
                self.pos += 1;
                Ok(Expr::coord(&name))
            }
            Some(tok) => self.err(format!("unexpected token {tok:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses `text` over the given coordinate names and returns the normalized expression.
pub fn parse(text: &str, coords: &[&str]) -> Result<Expr, Error> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        coords,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(normalize(&e))
}

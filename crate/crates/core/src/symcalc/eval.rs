use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use super::expr::{Expr, Node, Rational};

/// Failure while evaluating an expression at a point.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("coordinate `{0}` has no value at this point")]
    Unbound(String),
}

/// Result of evaluation: exact while every operation stays rational.
#[derive(Debug, Clone, PartialEq)]
pub enum Number {
    Exact(Rational),
    Float(f64),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Number::Float(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Number::Exact(_))
    }

    fn is_zero(&self) -> bool {
        match self {
            Number::Exact(q) => q.is_zero(),
            Number::Float(x) => *x == 0.0,
        }
    }

    fn add(self, other: Number) -> Number {
        match (self, other) {
            (Number::Exact(a), Number::Exact(b)) => Number::Exact(a + b),
            (a, b) => Number::Float(a.to_f64() + b.to_f64()),
        }
    }

    fn mul(self, other: Number) -> Number {
        match (self, other) {
            (Number::Exact(a), Number::Exact(b)) => Number::Exact(a * b),
            (a, b) => Number::Float(a.to_f64() * b.to_f64()),
        }
    }

    fn recip(self) -> Result<Number, EvalError> {
        if self.is_zero() {
            return Err(EvalError::DivisionByZero);
        }
        Ok(match self {
            Number::Exact(a) => Number::Exact(a.recip()),
            Number::Float(x) => Number::Float(1.0 / x),
        })
    }

    fn powi(self, k: i32) -> Result<Number, EvalError> {
        let base = if k < 0 { self.recip()? } else { self };
        let n = k.unsigned_abs();
        Ok(match base {
            Number::Exact(a) => {
                let mut acc = Rational::one();
                for _ in 0..n {
                    acc *= &a;
                }
                Number::Exact(acc)
            }
            Number::Float(x) => Number::Float(x.powi(n as i32)),
        })
    }
}

impl Expr {
    /// Evaluates with exact rational arithmetic where possible.
    pub fn evaluate<F>(&self, lookup: &F) -> Result<Number, EvalError>
    where
        F: Fn(&str) -> Option<Number>,
    {
        Ok(match self.node() {
            Node::Constant(q) => Number::Exact(q.clone()),
            Node::Coordinate(c) => lookup(c).ok_or_else(|| EvalError::Unbound(c.to_string()))?,
            Node::Sum(v) => {
                let mut acc = Number::Exact(Rational::zero());
                for t in v {
                    acc = acc.add(t.evaluate(lookup)?);
                }
                acc
            }
            Node::Product(v) => {
                let mut acc = Number::Exact(Rational::one());
                for t in v {
                    acc = acc.mul(t.evaluate(lookup)?);
                }
                acc
            }
            Node::Quotient(a, b) => {
                let den = b.evaluate(lookup)?.recip()?;
                a.evaluate(lookup)?.mul(den)
            }
            Node::IntegerPower(a, k) => a.evaluate(lookup)?.powi(*k)?,
            Node::Neg(a) => a.evaluate(lookup)?.mul(Number::Exact(-Rational::one())),
            Node::Exp(a) => match a.evaluate(lookup)? {
                n if n.is_zero() => Number::Exact(Rational::one()),
                n => Number::Float(n.to_f64().exp()),
            },
            Node::Ln(a) => match a.evaluate(lookup)? {
                Number::Exact(q) if q.is_one() => Number::Exact(Rational::zero()),
                Number::Exact(q) if !q.is_positive() => {
                    return Err(EvalError::Domain(format!("ln of non-positive value {q}")))
                }
                n => {
                    let x = n.to_f64();
                    if x <= 0.0 {
                        return Err(EvalError::Domain(format!("ln of non-positive value {x}")));
                    }
                    Number::Float(x.ln())
                }
            },
            Node::Sin(a) => match a.evaluate(lookup)? {
                n if n.is_zero() => Number::Exact(Rational::zero()),
                n => Number::Float(n.to_f64().sin()),
            },
            Node::Cos(a) => match a.evaluate(lookup)? {
                n if n.is_zero() => Number::Exact(Rational::one()),
                n => Number::Float(n.to_f64().cos()),
            },
        })
    }

    /// Floating-point evaluation; the hot path of every sampled check.
    pub fn eval_f64<F>(&self, lookup: &F) -> Result<f64, EvalError>
    where
        F: Fn(&str) -> Option<f64>,
    {
        Ok(match self.node() {
            Node::Constant(q) => q.to_f64().unwrap_or(f64::NAN),
            Node::Coordinate(c) => lookup(c).ok_or_else(|| EvalError::Unbound(c.to_string()))?,
            Node::Sum(v) => {
                let mut acc = 0.0;
                for t in v {
                    acc += t.eval_f64(lookup)?;
                }
                acc
            }
            Node::Product(v) => {
                let mut acc = 1.0;
                for t in v {
                    acc *= t.eval_f64(lookup)?;
                }
                acc
            }
            Node::Quotient(a, b) => {
                let den = b.eval_f64(lookup)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                a.eval_f64(lookup)? / den
            }
            Node::IntegerPower(a, k) => {
                let x = a.eval_f64(lookup)?;
                if *k < 0 && x == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                x.powi(*k)
            }
            Node::Neg(a) => -a.eval_f64(lookup)?,
            Node::Exp(a) => a.eval_f64(lookup)?.exp(),
            Node::Ln(a) => {
                let x = a.eval_f64(lookup)?;
                if x <= 0.0 {
                    return Err(EvalError::Domain(format!("ln of non-positive value {x}")));
                }
                x.ln()
            }
            Node::Sin(a) => a.eval_f64(lookup)?.sin(),
            Node::Cos(a) => a.eval_f64(lookup)?.cos(),
        })
    }
}

use std::fmt;

use num_traits::{One, Signed};

use super::expr::{Expr, Node, Rational};
use super::poly::has_negative_coefficient;

// Binding strength of the rendered node: sum < product/quotient < unary < power < atom.
fn precedence(e: &Expr) -> u8 {
    match e.node() {
        Node::Sum(_) => 1,
        Node::Product(_) | Node::Quotient(_, _) => 2,
        Node::Neg(_) => 3,
        Node::Constant(q) if q.is_negative() => 3,
        Node::Constant(q) if !q.denom().is_one() => 2,
        Node::IntegerPower(_, _) => 4,
        _ => 5,
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, q: &Rational) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Constant(q) => write_rational(f, q),
            Node::Coordinate(c) => write!(f, "{c}"),
            Node::Sum(v) => {
                for (i, t) in v.iter().enumerate() {
                    if i == 0 {
                        write_wrapped(f, t, 1)?;
                    } else if has_negative_coefficient(t) {
                        write!(f, " - ")?;
                        write_wrapped(f, &-t, 2)?;
                    } else {
                        write!(f, " + ")?;
                        write_wrapped(f, t, 2)?;
                    }
                }
                Ok(())
            }
            Node::Product(v) => {
                for (i, t) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    // A leading negative constant reads as unary minus; later ones need parentheses.
                    let min = if i == 0 { 2 } else { 4 };
                    match t.node() {
                        Node::Constant(q) if i == 0 && q.denom().is_one() => write_rational(f, q)?,
                        _ => write_wrapped(f, t, min)?,
                    }
                }
                Ok(())
            }
            Node::Quotient(a, b) => {
                write_wrapped(f, a, 2)?;
                write!(f, "/")?;
                write_wrapped(f, b, 4)
            }
            Node::IntegerPower(b, k) => {
                write_wrapped(f, b, 5)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Node::Exp(a) => write!(f, "exp({a})"),
            Node::Ln(a) => write!(f, "ln({a})"),
            Node::Sin(a) => write!(f, "sin({a})"),
            Node::Cos(a) => write!(f, "cos({a})"),
            Node::Neg(a) => {
                write!(f, "-")?;
                write_wrapped(f, a, 4)
            }
        }
    }
}

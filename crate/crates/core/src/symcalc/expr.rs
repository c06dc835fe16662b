use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly;

/// Exact rational constant used throughout the expression engine.
pub type Rational = BigRational;

/// Node of an expression tree.
///
/// Trees produced by the public constructors are always normalized; raw trees
/// only exist transiently inside the parser and the differentiator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Node {
    Constant(Rational),
    Coordinate(Arc<str>),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Quotient(Expr, Expr),
    IntegerPower(Expr, i32),
    Exp(Expr),
    Ln(Expr),
    Sin(Expr),
    Cos(Expr),
    Neg(Expr),
}

/// Immutable, cheaply clonable symbolic scalar expression.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl Expr {
    /// Wraps a node without normalizing it.
    pub(crate) fn raw(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(q: Rational) -> Expr {
        Expr::raw(Node::Constant(q))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Rational::from_integer(BigInt::from(n)))
    }

    /// The rational `num/den`. Panics if `den == 0`.
    pub fn rational(num: i64, den: i64) -> Expr {
        assert!(den != 0, "zero denominator");
        Expr::constant(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn coord(name: &str) -> Expr {
        Expr::raw(Node::Coordinate(Arc::from(name)))
    }

    pub(crate) fn coord_arc(name: Arc<str>) -> Expr {
        Expr::raw(Node::Coordinate(name))
    }

    pub fn exp(&self) -> Expr {
        normalize(&Expr::raw(Node::Exp(self.clone())))
    }

    pub fn ln(&self) -> Expr {
        normalize(&Expr::raw(Node::Ln(self.clone())))
    }

    pub fn sin(&self) -> Expr {
        normalize(&Expr::raw(Node::Sin(self.clone())))
    }

    pub fn cos(&self) -> Expr {
        normalize(&Expr::raw(Node::Cos(self.clone())))
    }

    pub fn powi(&self, k: i32) -> Expr {
        normalize(&Expr::raw(Node::IntegerPower(self.clone(), k)))
    }

    /// Sum of an arbitrary collection of expressions.
    pub fn sum<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        let mut acc = poly::Poly::zero();
        for e in items {
            acc = acc.add(&poly::to_poly(&e));
        }
        poly::from_poly(&acc)
    }

    pub fn product<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        let mut acc = poly::Poly::one();
        for e in items {
            acc = acc.mul(&poly::to_poly(&e));
            if acc.is_zero() {
                break;
            }
        }
        poly::from_poly(&acc)
    }

    pub fn scale(&self, q: &Rational) -> Expr {
        poly::from_poly(&poly::to_poly(self).scale(q))
    }

    /// True iff the expression is the literal constant zero.
    pub fn is_zero_literal(&self) -> bool {
        matches!(self.node(), Node::Constant(q) if q.is_zero())
    }

    pub fn is_one_literal(&self) -> bool {
        matches!(self.node(), Node::Constant(q) if q.is_one())
    }

    pub fn as_constant(&self) -> Option<&Rational> {
        match self.node() {
            Node::Constant(q) => Some(q),
            _ => None,
        }
    }

    /// True if no transcendental function occurs anywhere in the tree.
    pub fn is_rational_function(&self) -> bool {
        match self.node() {
            Node::Constant(_) | Node::Coordinate(_) => true,
            Node::Sum(v) | Node::Product(v) => v.iter().all(Expr::is_rational_function),
            Node::Quotient(a, b) => a.is_rational_function() && b.is_rational_function(),
            Node::IntegerPower(a, _) | Node::Neg(a) => a.is_rational_function(),
            Node::Exp(_) | Node::Ln(_) | Node::Sin(_) | Node::Cos(_) => false,
        }
    }

    pub fn free_symbols(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    pub(crate) fn collect_symbols(&self, out: &mut BTreeSet<Arc<str>>) {
        match self.node() {
            Node::Constant(_) => {}
            Node::Coordinate(c) => {
                out.insert(c.clone());
            }
            Node::Sum(v) | Node::Product(v) => v.iter().for_each(|e| e.collect_symbols(out)),
            Node::Quotient(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Node::IntegerPower(a, _)
            | Node::Neg(a)
            | Node::Exp(a)
            | Node::Ln(a)
            | Node::Sin(a)
            | Node::Cos(a) => a.collect_symbols(out),
        }
    }

    pub fn depends_on(&self, name: &str) -> bool {
        match self.node() {
            Node::Constant(_) => false,
            Node::Coordinate(c) => &**c == name,
            Node::Sum(v) | Node::Product(v) => v.iter().any(|e| e.depends_on(name)),
            Node::Quotient(a, b) => a.depends_on(name) || b.depends_on(name),
            Node::IntegerPower(a, _)
            | Node::Neg(a)
            | Node::Exp(a)
            | Node::Ln(a)
            | Node::Sin(a)
            | Node::Cos(a) => a.depends_on(name),
        }
    }

    /// Simultaneous substitution of coordinates by expressions; the result is normalized.
    pub fn substitute<F>(&self, lookup: &F) -> Expr
    where
        F: Fn(&str) -> Option<Expr>,
    {
        normalize(&self.substitute_raw(lookup))
    }

    fn substitute_raw<F>(&self, lookup: &F) -> Expr
    where
        F: Fn(&str) -> Option<Expr>,
    {
        let map1 = |a: &Expr| a.substitute_raw(lookup);
        let node = match self.node() {
            Node::Constant(_) => return self.clone(),
            Node::Coordinate(c) => return lookup(c).unwrap_or_else(|| self.clone()),
            Node::Sum(v) => Node::Sum(v.iter().map(map1).collect()),
            Node::Product(v) => Node::Product(v.iter().map(map1).collect()),
            Node::Quotient(a, b) => Node::Quotient(map1(a), map1(b)),
            Node::IntegerPower(a, k) => Node::IntegerPower(map1(a), *k),
            Node::Exp(a) => Node::Exp(map1(a)),
            Node::Ln(a) => Node::Ln(map1(a)),
            Node::Sin(a) => Node::Sin(map1(a)),
            Node::Cos(a) => Node::Cos(map1(a)),
            Node::Neg(a) => Node::Neg(map1(a)),
        };
        Expr::raw(node)
    }

    /// Top-level additive terms of a normalized expression.
    pub fn terms(&self) -> Vec<Expr> {
        match self.node() {
            Node::Sum(v) => v.clone(),
            _ if self.is_zero_literal() => Vec::new(),
            _ => vec![self.clone()],
        }
    }
}

/// Structural normalization: flattens sums and products, folds constants,
/// expands products over sums and collects identical monomials.
pub fn normalize(e: &Expr) -> Expr {
    poly::from_poly(&poly::to_poly(e))
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                (&self).$method(rhs)
            }
        }
        impl $trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| poly::from_poly(
    &poly::to_poly(a).add(&poly::to_poly(b))
));
binop!(Sub, sub, |a, b| poly::from_poly(
    &poly::to_poly(a).sub(&poly::to_poly(b))
));
binop!(Mul, mul, |a, b| poly::from_poly(
    &poly::to_poly(a).mul(&poly::to_poly(b))
));
binop!(Div, div, |a, b| normalize(&Expr::raw(Node::Quotient(
    a.clone(),
    b.clone()
))));

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(&-Rational::one())
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

//! Internal sum-of-monomials representation backing structural normalization.
//!
//! A monomial is a product of atoms raised to integer powers times a single
//! merged exponential. Atoms are coordinates, transcendental function
//! applications with normalized arguments, and reciprocals of normalized
//! multi-term sums. Positive powers of sums are always expanded.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::expr::{normalize, Expr, Node, Rational};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub(crate) enum Atom {
    Coord(Arc<str>),
    Ln(Expr),
    Sin(Expr),
    Cos(Expr),
    /// `Recip(s)` raised to `k > 0` stands for `s^(-k)`.
    Recip(Expr),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub(crate) struct Mono {
    factors: BTreeMap<Atom, i32>,
    exp: Poly,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub(crate) struct Poly {
    terms: BTreeMap<Mono, Rational>,
}

impl Mono {
    fn is_unit(&self) -> bool {
        self.factors.is_empty() && self.exp.is_zero()
    }

    fn atom(a: Atom, k: i32) -> Mono {
        let mut factors = BTreeMap::new();
        if k != 0 {
            factors.insert(a, k);
        }
        Mono {
            factors,
            exp: Poly::zero(),
        }
    }

    fn mul(&self, other: &Mono) -> Mono {
        let mut factors = self.factors.clone();
        for (a, k) in &other.factors {
            let e = factors.entry(a.clone()).or_insert(0);
            *e += *k;
            if *e == 0 {
                factors.remove(a);
            }
        }
        Mono {
            factors,
            exp: self.exp.add(&other.exp),
        }
    }

    fn inverse(&self) -> Poly {
        let mut factors = BTreeMap::new();
        let mut expanded = Poly::one();
        for (a, k) in &self.factors {
            match a {
                Atom::Recip(s) => expanded = expanded.mul(&to_poly(s).pow(*k as u32)),
                _ => {
                    factors.insert(a.clone(), -*k);
                }
            }
        }
        let m = Mono {
            factors,
            exp: self.exp.scale(&-Rational::one()),
        };
        expanded.mul(&Poly::mono(m, Rational::one()))
    }
}

impl Poly {
    pub(crate) fn zero() -> Poly {
        Poly::default()
    }

    pub(crate) fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub(crate) fn constant(q: Rational) -> Poly {
        Poly::mono(Mono::default(), q)
    }

    fn mono(m: Mono, q: Rational) -> Poly {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(m, q);
        }
        Poly { terms }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add(&self, other: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        for (m, q) in &other.terms {
            add_term(&mut terms, m.clone(), q.clone());
        }
        Poly { terms }
    }

    pub(crate) fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub(crate) fn scale(&self, q: &Rational) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * q))
                .collect(),
        }
    }

    pub(crate) fn mul(&self, other: &Poly) -> Poly {
        let mut terms = BTreeMap::new();
        for (m1, q1) in &self.terms {
            for (m2, q2) in &other.terms {
                add_term(&mut terms, m1.mul(m2), q1 * q2);
            }
        }
        Poly { terms }
    }

    fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    fn single_term(&self) -> Option<(&Mono, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }
}

fn add_term(terms: &mut BTreeMap<Mono, Rational>, m: Mono, q: Rational) {
    if q.is_zero() {
        return;
    }
    match terms.get_mut(&m) {
        Some(c) => {
            *c += q;
            if c.is_zero() {
                terms.remove(&m);
            }
        }
        None => {
            terms.insert(m, q);
        }
    }
}

/// Multiplicative inverse of an arbitrary expression as a polynomial.
fn inverse_poly(e: &Expr) -> Poly {
    match e.node() {
        Node::Product(fs) => fs
            .iter()
            .fold(Poly::one(), |acc, f| acc.mul(&inverse_poly(f))),
        Node::IntegerPower(b, k) if *k >= 0 => inverse_poly(b).pow(*k as u32),
        Node::IntegerPower(b, k) => to_poly(b).pow(k.unsigned_abs()),
        Node::Quotient(a, b) => to_poly(b).mul(&inverse_poly(a)),
        Node::Neg(a) => inverse_poly(a).scale(&-Rational::one()),
        Node::Exp(a) => {
            let m = Mono {
                factors: BTreeMap::new(),
                exp: to_poly(a).scale(&-Rational::one()),
            };
            Poly::mono(m, Rational::one())
        }
        _ => {
            let p = to_poly(e);
            if let Some((m, q)) = p.single_term() {
                return m.inverse().scale(&q.recip());
            }
            if p.is_zero() {
                return Poly::mono(Mono::atom(Atom::Recip(Expr::zero()), 1), Rational::one());
            }
            // Canonical representative: leading coefficient 1.
            let lead = p.terms.values().next().cloned().unwrap_or_else(Rational::one);
            let monic = p.scale(&lead.recip());
            Poly::mono(
                Mono::atom(Atom::Recip(from_poly(&monic)), 1),
                lead.recip(),
            )
        }
    }
}

pub(crate) fn to_poly(e: &Expr) -> Poly {
    match e.node() {
        Node::Constant(q) => Poly::constant(q.clone()),
        Node::Coordinate(c) => Poly::mono(Mono::atom(Atom::Coord(c.clone()), 1), Rational::one()),
        Node::Sum(v) => v.iter().fold(Poly::zero(), |acc, t| acc.add(&to_poly(t))),
        Node::Product(v) => {
            let mut acc = Poly::one();
            for f in v {
                acc = acc.mul(&to_poly(f));
                if acc.is_zero() {
                    break;
                }
            }
            acc
        }
        Node::Quotient(a, b) => {
            let num = to_poly(a);
            if num.is_zero() {
                return Poly::zero();
            }
            num.mul(&inverse_poly(b))
        }
        Node::IntegerPower(b, k) if *k >= 0 => to_poly(b).pow(*k as u32),
        Node::IntegerPower(b, k) => inverse_poly(b).pow(k.unsigned_abs()),
        Node::Neg(a) => to_poly(a).scale(&-Rational::one()),
        Node::Exp(a) => {
            let arg = to_poly(a);
            Poly::mono(
                Mono {
                    factors: BTreeMap::new(),
                    exp: arg,
                },
                Rational::one(),
            )
        }
        Node::Ln(a) => {
            let arg = normalize(a);
            if arg.is_one_literal() {
                Poly::zero()
            } else {
                Poly::mono(Mono::atom(Atom::Ln(arg), 1), Rational::one())
            }
        }
        Node::Sin(a) => {
            let arg = normalize(a);
            if arg.is_zero_literal() {
                Poly::zero()
            } else {
                Poly::mono(Mono::atom(Atom::Sin(arg), 1), Rational::one())
            }
        }
        Node::Cos(a) => {
            let arg = normalize(a);
            if arg.is_zero_literal() {
                Poly::one()
            } else {
                Poly::mono(Mono::atom(Atom::Cos(arg), 1), Rational::one())
            }
        }
    }
}

fn atom_expr(a: &Atom) -> Expr {
    match a {
        Atom::Coord(c) => Expr::coord_arc(c.clone()),
        Atom::Ln(x) => Expr::raw(Node::Ln(x.clone())),
        Atom::Sin(x) => Expr::raw(Node::Sin(x.clone())),
        Atom::Cos(x) => Expr::raw(Node::Cos(x.clone())),
        Atom::Recip(s) => s.clone(),
    }
}

fn power(base: Expr, k: i32) -> Expr {
    if k == 1 {
        base
    } else {
        Expr::raw(Node::IntegerPower(base, k))
    }
}

fn join_product(mut v: Vec<Expr>) -> Expr {
    if v.len() == 1 {
        v.pop().unwrap()
    } else {
        Expr::raw(Node::Product(v))
    }
}

fn term_expr(m: &Mono, q: &Rational) -> Expr {
    if m.is_unit() {
        return Expr::constant(q.clone());
    }
    let mut num = Vec::new();
    let mut den = Vec::new();
    for (a, &k) in &m.factors {
        match a {
            Atom::Recip(_) => den.push(power(atom_expr(a), k)),
            _ if k > 0 => num.push(power(atom_expr(a), k)),
            _ => den.push(power(atom_expr(a), -k)),
        }
    }
    if !m.exp.is_zero() {
        num.push(Expr::raw(Node::Exp(from_poly(&m.exp))));
    }
    let numer = q.numer();
    let denom = q.denom();
    if num.is_empty() || !numer.is_one() {
        num.insert(0, Expr::constant(Rational::from_integer(numer.clone())));
    }
    if !denom.is_one() {
        den.insert(0, Expr::constant(Rational::from_integer(denom.clone())));
    }
    let n = join_product(num);
    if den.is_empty() {
        n
    } else {
        Expr::raw(Node::Quotient(n, join_product(den)))
    }
}

pub(crate) fn from_poly(p: &Poly) -> Expr {
    let mut terms: Vec<Expr> = p.terms.iter().map(|(m, q)| term_expr(m, q)).collect();
    match terms.len() {
        0 => Expr::zero(),
        1 => terms.pop().unwrap(),
        _ => Expr::raw(Node::Sum(terms)),
    }
}

/// True when a normalized term carries a negative leading coefficient.
pub(crate) fn has_negative_coefficient(e: &Expr) -> bool {
    match e.node() {
        Node::Constant(q) => q.is_negative(),
        Node::Product(v) => v.first().map(has_negative_coefficient).unwrap_or(false),
        Node::Quotient(a, _) => has_negative_coefficient(a),
        _ => false,
    }
}

use super::expr::{normalize, Expr, Node};

impl Expr {
    /// Partial derivative with respect to the coordinate `v`; the result is normalized.
    pub fn differentiate(&self, v: &str) -> Expr {
        if !self.depends_on(v) {
            return Expr::zero();
        }
        normalize(&raw_derivative(self, v))
    }
}

pub fn differentiate(e: &Expr, v: &str) -> Expr {
    e.differentiate(v)
}

fn raw_derivative(e: &Expr, v: &str) -> Expr {
    if !e.depends_on(v) {
        return Expr::zero();
    }
    match e.node() {
        Node::Constant(_) => Expr::zero(),
        Node::Coordinate(c) => {
            if &**c == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Sum(terms) => Expr::raw(Node::Sum(
            terms.iter().map(|t| raw_derivative(t, v)).collect(),
        )),
        Node::Product(fs) => {
            let mut terms = Vec::new();
            for (i, f) in fs.iter().enumerate() {
                if !f.depends_on(v) {
                    continue;
                }
                let mut factors = fs.clone();
                factors[i] = raw_derivative(f, v);
                terms.push(Expr::raw(Node::Product(factors)));
            }
            Expr::raw(Node::Sum(terms))
        }
        Node::Quotient(a, b) => {
            // a'/b - (a b'/b)/b keeps the reciprocal of b as a single atom
            let da = raw_derivative(a, v);
            let db = raw_derivative(b, v);
            let second = Expr::raw(Node::Quotient(
                Expr::raw(Node::Quotient(Expr::raw(Node::Product(vec![a.clone(), db])), b.clone())),
                b.clone(),
            ));
            Expr::raw(Node::Sum(vec![
                Expr::raw(Node::Quotient(da, b.clone())),
                Expr::raw(Node::Neg(second)),
            ]))
        }
        Node::IntegerPower(b, k) => Expr::raw(Node::Product(vec![
            Expr::int(*k as i64),
            Expr::raw(Node::IntegerPower(b.clone(), k - 1)),
            raw_derivative(b, v),
        ])),
        Node::Exp(a) => Expr::raw(Node::Product(vec![e.clone(), raw_derivative(a, v)])),
        Node::Ln(a) => Expr::raw(Node::Quotient(raw_derivative(a, v), a.clone())),
        Node::Sin(a) => Expr::raw(Node::Product(vec![
            Expr::raw(Node::Cos(a.clone())),
            raw_derivative(a, v),
        ])),
        Node::Cos(a) => Expr::raw(Node::Neg(Expr::raw(Node::Product(vec![
            Expr::raw(Node::Sin(a.clone())),
            raw_derivative(a, v),
        ])))),
        Node::Neg(a) => Expr::raw(Node::Neg(raw_derivative(a, v))),
    }
}

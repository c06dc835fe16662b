//! Standard example objects, and random polynomial instances for property
//! checks and benchmarks.

use crate::structures::ConformalFactor;
use crate::symcalc::Expr;
use crate::tensor::{Chart, DifferentialForm, Multivector, VectorField};

pub fn plane() -> Chart {
    Chart::new("M", &["x", "y"]).expect("valid chart")
}

pub fn space() -> Chart {
    Chart::new("M", &["x", "y", "z"]).expect("valid chart")
}

/// `x dy` on the plane.
pub fn theta_x_dy() -> DifferentialForm {
    let c = plane();
    DifferentialForm::from_components(&c, vec![Expr::zero(), Expr::coord("x")]).expect("two components")
}

/// The contact form `dz - y dx` on `R^3`.
pub fn contact_theta() -> DifferentialForm {
    let c = space();
    DifferentialForm::from_components(&c, vec![-Expr::coord("y"), Expr::zero(), Expr::one()]).expect("three components")
}

/// `Lambda = (d/dx + y d/dz) ^ d/dy` and `E = d/dz` on `R^3`.
pub fn contact_jacobi() -> (Multivector, VectorField) {
    let c = space();
    let lambda = Multivector::from_terms(&c, 2, [(vec![0, 1], Expr::one()), (vec![2, 1], Expr::coord("y"))]).expect("valid terms");
    (lambda, VectorField::partial(&c, 2))
}

/// `d/dx ^ d/dy` on the plane.
pub fn poisson_plane() -> Multivector {
    Multivector::from_terms(&plane(), 2, [(vec![0, 1], Expr::one())]).expect("valid terms")
}

/// `dx ^ dy` on the plane.
pub fn area_form() -> DifferentialForm {
    DifferentialForm::from_terms(&plane(), 2, [(vec![0, 1], Expr::one())]).expect("valid terms")
}

/// `1 + x^2/4` on the plane.
pub fn conformal_bump() -> ConformalFactor {
    let c = plane();
    ConformalFactor::new(&c, Expr::one() + Expr::rational(1, 4) * Expr::coord("x").powi(2)).expect("nonzero factor")
}

/// Random instances with small integer coefficients.
pub mod random {
    use rand::Rng;

    use crate::symcalc::Expr;
    use crate::tensor::{Chart, DifferentialForm, SmoothMap, VectorField};

    /// A polynomial with at most `max_terms` monomials of total degree at most `max_degree`.
    pub fn polynomial<R: Rng>(rng: &mut R, chart: &Chart, max_degree: u32, max_terms: usize) -> Expr {
        let terms = rng.gen_range(1..=max_terms.max(1));
        Expr::sum((0..terms).map(|_| {
            let mut factors = vec![Expr::int(nonzero_int(rng))];
            let mut budget = rng.gen_range(0..=max_degree);
            while budget > 0 {
                let i = rng.gen_range(0..chart.dim());
                let k = rng.gen_range(1..=budget);
                factors.push(chart.coord_expr(i).powi(k as i32));
                budget -= k;
            }
            Expr::product(factors)
        }))
    }

    fn nonzero_int<R: Rng>(rng: &mut R) -> i64 {
        let v = rng.gen_range(1..=3);
        if rng.gen_bool(0.5) {
            v
        } else {
            -v
        }
    }

    pub fn vector_field<R: Rng>(rng: &mut R, chart: &Chart) -> VectorField {
        let comps = (0..chart.dim()).map(|_| polynomial(rng, chart, 2, 3)).collect();
        VectorField::new(chart, comps).expect("one component per coordinate")
    }

    /// A form of the given degree with random polynomial coefficients on every blade.
    pub fn form<R: Rng>(rng: &mut R, chart: &Chart, degree: usize) -> DifferentialForm {
        let terms: Vec<(Vec<usize>, Expr)> = blades(chart.dim(), degree)
            .into_iter()
            .map(|idx| (idx, polynomial(rng, chart, 2, 3)))
            .collect();
        DifferentialForm::from_terms(chart, degree, terms).expect("valid blades")
    }

    /// A polynomial map between charts.
    pub fn map<R: Rng>(rng: &mut R, source: &Chart, target: &Chart) -> SmoothMap {
        let comps = (0..target.dim()).map(|_| polynomial(rng, source, 2, 3)).collect();
        SmoothMap::new(source, target, comps).expect("one component per target coordinate")
    }

    /// A smooth expression mixing polynomials with `exp`, `sin`, `cos` and `ln(1 + p^2)`.
    pub fn expression<R: Rng>(rng: &mut R, chart: &Chart, depth: u32) -> Expr {
        let leaf = |rng: &mut R| polynomial(rng, chart, 2, 2);
        if depth == 0 {
            return leaf(rng);
        }
        let a = expression(rng, chart, depth - 1);
        match rng.gen_range(0..6) {
            0 => a + expression(rng, chart, depth - 1),
            1 => a * expression(rng, chart, depth - 1),
            2 => (Expr::rational(1, 4) * a).sin(),
            3 => (Expr::rational(1, 4) * a).cos(),
            4 => (Expr::one() + Expr::rational(1, 16) * a.powi(2)).ln(),
            _ => (Expr::rational(1, 8) * leaf(rng)).exp() * a,
        }
    }

    /// Increasing index tuples of length `k` from `0..n`.
    pub fn blades(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in 0..n {
            for mut rest in blades(n, k - 1) {
                if rest.first().is_none_or(|&r| r > first) {
                    rest.insert(0, first);
                    out.push(rest);
                }
            }
        }
        out
    }
}

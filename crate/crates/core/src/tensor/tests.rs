use super::*;
use crate::symcalc::{is_zero, Expr, Point, SamplingPolicy};

fn chart(names: &[&str]) -> Chart {
    Chart::new("C", names).unwrap()
}

fn form(c: &Chart, deg: usize, terms: &[(&[usize], &str)]) -> DifferentialForm {
    DifferentialForm::from_terms(c, deg, terms.iter().map(|(i, e)| (i.to_vec(), c.parse(e).unwrap())))
        .unwrap()
}

fn field(c: &Chart, comps: &[&str]) -> VectorField {
    VectorField::new(c, comps.iter().map(|e| c.parse(e).unwrap()).collect()).unwrap()
}

fn same(a: &DifferentialForm, b: &DifferentialForm) -> bool {
    let diff = a.sub(b).unwrap();
    diff.terms()
        .iter()
        .all(|(_, e)| is_zero(e, &SamplingPolicy::default()).holds())
}

#[test]
fn exterior_derivative_examples() {
    let r2 = chart(&["x", "y"]);
    assert_eq!(exterior_derivative(&form(&r2, 1, &[(&[1], "x")])), form(&r2, 2, &[(&[0, 1], "1")]));

    let r3 = chart(&["x", "y", "z"]);
    let theta = form(&r3, 1, &[(&[2], "1"), (&[0], "-y")]);
    // oracle: d(c dx^i) = sum_j dc/dx^j dx^j ^ dx^i, written out by hand
    assert_eq!(exterior_derivative(&theta), form(&r3, 2, &[(&[1, 0], "-1")]));
    assert_eq!(exterior_derivative(&theta).coeff(&[0, 1]), Expr::one());

    let f = DifferentialForm::scalar(&r2, r2.parse("x^2*y").unwrap());
    assert_eq!(exterior_derivative(&f), form(&r2, 1, &[(&[0], "2*x*y"), (&[1], "x^2")]));
}

fn fd_bracket(x: &VectorField, y: &VectorField, p: &Point) -> Vec<f64> {
    // central differences of the numeric components
    let n = x.chart().dim();
    let h = 1e-5;
    let xv = x.eval(p).unwrap();
    let yv = y.eval(p).unwrap();
    let mut out = vec![0.0; n];
    for j in 0..n {
        let name = x.chart().coords()[j].clone();
        let v = p.get(&name).unwrap();
        let plus = p.with(&[(name.clone(), v + h)]);
        let minus = p.with(&[(name, v - h)]);
        let (xp, xm) = (x.eval(&plus).unwrap(), x.eval(&minus).unwrap());
        let (yp, ym) = (y.eval(&plus).unwrap(), y.eval(&minus).unwrap());
        for i in 0..n {
            out[i] += xv[j] * (yp[i] - ym[i]) / (2.0 * h) - yv[j] * (xp[i] - xm[i]) / (2.0 * h);
        }
    }
    out
}

#[test]
fn lie_bracket_examples() {
    let r2 = chart(&["x", "y"]);
    let dx = VectorField::partial(&r2, 0);
    let dy = VectorField::partial(&r2, 1);
    assert!(lie_bracket(&dx, &dy).unwrap().is_zero_literal());

    let xdy = field(&r2, &["0", "x"]);
    let b = lie_bracket(&xdy, &dx).unwrap();
    assert_eq!(b, field(&r2, &["0", "-1"]));
    let p = Point::from_pairs(&[("x", 0.7), ("y", -1.3)]);
    let fd = fd_bracket(&xdy, &dx, &p);
    assert!((fd[0] - 0.0).abs() < 1e-8 && (fd[1] + 1.0).abs() < 1e-8);

    let x = field(&r2, &["x*y", "sin(x)"]);
    assert!(lie_bracket(&x, &x).unwrap().is_zero_literal());

    let other = chart(&["u", "v"]);
    assert!(lie_bracket(&dx, &VectorField::partial(&other, 0)).is_err());
}

#[test]
fn interior_product_examples() {
    let r2 = chart(&["x", "y"]);
    let dxdy = form(&r2, 2, &[(&[0, 1], "1")]);
    assert_eq!(
        interior_product(&VectorField::partial(&r2, 0), &dxdy).unwrap(),
        form(&r2, 1, &[(&[1], "1")])
    );
    let theta = form(&r2, 1, &[(&[1], "x")]);
    assert_eq!(
        interior_product(&VectorField::partial(&r2, 1), &theta).unwrap().as_scalar(),
        r2.parse("x").unwrap()
    );
    assert!(interior_product(&VectorField::partial(&r2, 1), &DifferentialForm::scalar(&r2, Expr::one())).is_err());

    // i_{dt} d(e^t eta) = e^t eta for t-independent eta
    let c = chart(&["x", "y", "t"]);
    let eta = form(&c, 1, &[(&[0], "y"), (&[1], "x^2")]);
    let et = c.parse("exp(t)").unwrap();
    let omega = exterior_derivative(&eta.scale(&et));
    let got = interior_product(&VectorField::partial(&c, 2), &omega).unwrap();
    // oracle: d(e^t eta) = e^t dt^eta + e^t d eta, and i_{dt} of the second term vanishes
    assert!(same(&got, &eta.scale(&et)));
}

#[test]
fn lie_derivative_examples() {
    let r1 = chart(&["x"]);
    let xdx = form(&r1, 1, &[(&[0], "x")]);
    assert_eq!(
        lie_derivative(&VectorField::partial(&r1, 0), &xdx).unwrap(),
        form(&r1, 1, &[(&[0], "1")])
    );

    let c = chart(&["x", "y", "t"]);
    let eta = form(&c, 1, &[(&[0], "y"), (&[1], "x^2")]);
    let omega = exterior_derivative(&eta.scale(&c.parse("exp(t)").unwrap()));
    assert!(same(&lie_derivative(&VectorField::partial(&c, 2), &omega).unwrap(), &omega));

    let r2 = chart(&["x", "y"]);
    let x = field(&r2, &["x*y", "y^2 + 1"]);
    let g = r2.parse("x^3 - y*x").unwrap();
    let lhs = lie_derivative(&x, &exterior_derivative(&DifferentialForm::scalar(&r2, g.clone()))).unwrap();
    let rhs = exterior_derivative(&DifferentialForm::scalar(&r2, x.apply(&g)));
    assert!(same(&lhs, &rhs));
}

#[test]
fn wedge_examples() {
    let r2 = chart(&["x", "y"]);
    let dx = DifferentialForm::dx(&r2, 0);
    let dy = DifferentialForm::dx(&r2, 1);
    assert_eq!(dx.wedge(&dy).unwrap().coeff(&[0, 1]), Expr::one());
    let dt = Multivector::partial(&r2, 1);
    assert!(dt.wedge(&dt).unwrap().is_zero_literal());
    let s = dx.add(&dy).unwrap();
    assert_eq!(wedge(&s, &dx).unwrap(), form(&r2, 2, &[(&[0, 1], "-1")]));
}

#[test]
fn pullback_examples() {
    let r1 = chart(&["x"]);
    let r2 = Chart::new("T", &["u", "v"]).unwrap();
    let f = SmoothMap::new(&r1, &r2, vec![r1.parse("x").unwrap(), r1.parse("x^2").unwrap()]).unwrap();
    assert_eq!(pullback(&f, &DifferentialForm::dx(&r2, 1)).unwrap(), form(&r1, 1, &[(&[0], "2*x")]));

    let g = Chart::new("G", &["x1", "x2", "t"]).unwrap();
    let m = Chart::new("M", &["x"]).unwrap();
    let pi1 = SmoothMap::new(&g, &m, vec![g.parse("x1").unwrap()]).unwrap();
    assert_eq!(
        pullback(&pi1, &DifferentialForm::dx(&m, 0)).unwrap(),
        DifferentialForm::dx(&g, 0)
    );
}

#[test]
fn pushforward_examples() {
    let r1 = chart(&["x"]);
    let r2 = Chart::new("T", &["u", "v"]).unwrap();
    let f = SmoothMap::new(&r1, &r2, vec![r1.parse("x").unwrap(), r1.parse("x^2").unwrap()]).unwrap();
    let p = Point::from_pairs(&[("x", 1.0)]);
    assert_eq!(pushforward_at_point(&f, &p, &[1.0]).unwrap(), vec![1.0, 2.0]);

    let id = SmoothMap::identity(&r2);
    let q = Point::from_pairs(&[("u", 0.3), ("v", 2.0)]);
    assert_eq!(pushforward_at_point(&id, &q, &[4.0, -1.5]).unwrap(), vec![4.0, -1.5]);

    let g = Chart::new("G", &["x", "y", "t"]).unwrap();
    let m = Chart::new("M", &["x"]).unwrap();
    let beta = SmoothMap::new(&g, &m, vec![g.parse("x").unwrap()]).unwrap();
    let p = Point::from_pairs(&[("x", 0.4), ("y", -0.2), ("t", 1.1)]);
    let v = [0.5, -2.0, 3.0];
    let got = pushforward_at_point(&beta, &p, &v).unwrap();
    // oracle: finite difference of beta along v
    let h = 1e-6;
    let shift = |s: f64| {
        let moved = Point::from_pairs(&[("x", 0.4 + s * v[0]), ("y", -0.2 + s * v[1]), ("t", 1.1 + s * v[2])]);
        beta.apply(&moved).unwrap().values()[0]
    };
    assert!((got[0] - (shift(h) - shift(-h)) / (2.0 * h)).abs() < 1e-8);
    assert_eq!(got, vec![0.5]);
}

#[test]
fn sharp_examples() {
    let r2 = chart(&["x", "y"]);
    let lambda = Multivector::from_terms(&r2, 2, [(vec![0, 1], Expr::one())]).unwrap();
    let dx = DifferentialForm::dx(&r2, 0);
    let dy = DifferentialForm::dx(&r2, 1);
    assert_eq!(sharp(&lambda, &dx).unwrap(), VectorField::partial(&r2, 1));
    assert_eq!(sharp(&lambda, &dy).unwrap(), VectorField::partial(&r2, 0).neg());
    // oracle: beta(sharp alpha) = Lambda(alpha, beta) by direct contraction of the table
    let got = sharp(&lambda, &dx).unwrap();
    assert_eq!(contract(&dy, &got).unwrap(), lambda.coeff(&[0, 1]));
    assert!(sharp(&Multivector::zero(&r2, 2), &dx).unwrap().is_zero_literal());
    assert!(sharp(&lambda, &lambda_as_form(&r2)).is_err());
}

fn lambda_as_form(c: &Chart) -> DifferentialForm {
    DifferentialForm::dx(c, 0).wedge(&DifferentialForm::dx(c, 1)).unwrap()
}

#[test]
fn compose_and_jacobian() {
    let a = chart(&["x", "y"]);
    let b = Chart::new("B", &["u"]).unwrap();
    let f = SmoothMap::new(&a, &b, vec![a.parse("x*y").unwrap()]).unwrap();
    let g = SmoothMap::new(&b, &a, vec![b.parse("u").unwrap(), b.parse("u^2").unwrap()]).unwrap();
    let gf = g.compose(&f).unwrap();
    assert_eq!(gf.component(1), &a.parse("x^2*y^2").unwrap());
    assert!(SmoothMap::new(&a, &b, vec![a.parse("x").unwrap(), a.parse("y").unwrap()]).is_err());
}

use super::*;
use crate::report::Verdict;
use crate::structures::{
    conformal_change, construct_l_jacobi, construct_l_theta, graph_of_two_form, lift_dirac, ConformalFactor,
};
use crate::tensor::Multivector;

fn pol() -> SamplingPolicy {
    SamplingPolicy::default().with_count(20)
}

fn chart(names: &[&str]) -> Chart {
    Chart::new("M", names).unwrap()
}

fn one_form(c: &Chart, comps: &[&str]) -> DifferentialForm {
    DifferentialForm::from_components(c, comps.iter().map(|e| c.parse(e).unwrap()).collect()).unwrap()
}

fn dxdy(c: &Chart) -> DifferentialForm {
    DifferentialForm::dx(c, 0).wedge(&DifferentialForm::dx(c, 1)).unwrap()
}

fn l_theta_xdy() -> FrameSubbundle {
    let c = chart(&["x", "y"]);
    construct_l_theta(&one_form(&c, &["0", "x"])).unwrap()
}

fn l_theta_contact() -> FrameSubbundle {
    let c = chart(&["x", "y", "z"]);
    construct_l_theta(&one_form(&c, &["-y", "0", "1"])).unwrap()
}

fn ints(v: &[i64]) -> Vec<Expr> {
    v.iter().map(|&k| Expr::int(k)).collect()
}

#[test]
fn extract_cocycle_examples() {
    for l in [l_theta_xdy(), l_theta_contact()] {
        let phi = extract_cocycle(&l).unwrap();
        let n = l.len();
        let mut want = vec![0; n];
        want[n - 1] = 1;
        assert_eq!(phi.values, ints(&want));
    }
    let r2 = chart(&["x", "y"]);
    let lift = lift_dirac(&graph_of_two_form(&dxdy(&r2)).unwrap()).unwrap();
    assert!(extract_cocycle(&lift).unwrap().values.iter().all(Expr::is_zero_literal));

    let r3 = chart(&["x", "y", "z"]);
    let lambda = Multivector::from_terms(&r3, 2, [(vec![0, 1], Expr::one())]).unwrap();
    let e = VectorField::new(&r3, vec![Expr::zero(), Expr::coord("x"), Expr::one()]).unwrap();
    let phi = extract_cocycle(&construct_l_jacobi(&lambda, &e).unwrap()).unwrap();
    assert_eq!(phi.values, vec![Expr::zero(), -Expr::coord("x"), Expr::int(-1), Expr::zero()]);
    assert!(extract_cocycle(&graph_of_two_form(&dxdy(&r2)).unwrap()).is_err());
}

#[test]
fn cocycle_checks() {
    let l = l_theta_xdy();
    let a = AlgebroidOnL::new(l.clone());
    assert!(check_cocycle(&a, &extract_cocycle(&l).unwrap(), &pol()).unwrap().passed());
    assert!(check_cocycle(&a, &Cocycle1::zero(3), &pol()).unwrap().passed());

    // the coordinate frame of L_theta commutes here, so any constant cochain is
    // closed; y on the first generator is not
    assert!(check_cocycle(&a, &Cocycle1 { values: ints(&[1, 0, 0]) }, &pol()).unwrap().passed());
    let bad = Cocycle1 {
        values: vec![Expr::coord("y"), Expr::zero(), Expr::zero()],
    };
    let r = check_cocycle(&a, &bad, &pol()).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    let w = &r.condition("cocycle identity").unwrap().witnesses[0];
    assert!(w.label.contains("(0,1)"));
    // oracle: rho(e1) phi(e0) = d/dy y = 1 and [[e0, e1]] = 0, so the defect is -1
    assert!((w.value - 1.0).abs() < 1e-12);

    let contact = l_theta_contact();
    let ac = AlgebroidOnL::new(contact.clone());
    assert!(check_cocycle(&ac, &extract_cocycle(&contact).unwrap(), &pol()).unwrap().passed());
}

#[test]
fn cocycle_check_against_finite_differences() {
    // independent oracle: rho(a) phi(b) by central differences of phi(b) along X_a
    let l = l_theta_contact();
    let phi = Cocycle1 {
        values: vec![Expr::coord("z"), Expr::coord("x") * Expr::coord("y"), Expr::zero(), Expr::one()],
    };
    let gens = l.generators();
    let p = crate::symcalc::Point::from_pairs(&[("x", 0.3), ("y", -0.8), ("z", 1.1)]);
    let h = 1e-5;
    let deriv = |x: &VectorField, f: &Expr| {
        let v = x.eval(&p).unwrap();
        let shifted = |s: f64| {
            let q = crate::symcalc::Point::from_pairs(&[
                ("x", 0.3 + s * v[0]),
                ("y", -0.8 + s * v[1]),
                ("z", 1.1 + s * v[2]),
            ]);
            q.eval(f).unwrap()
        };
        (shifted(h) - shifted(-h)) / (2.0 * h)
    };
    let a = AlgebroidOnL::new(l.clone());
    let sym = gens[0].x.apply(&phi.values[2]) - gens[2].x.apply(&phi.values[0]);
    let fd = deriv(&gens[0].x, &phi.values[2]) - deriv(&gens[2].x, &phi.values[0]);
    assert!((p.eval(&sym).unwrap() - fd).abs() < 1e-8);
    // -1 from d/dz z, and [[e0, e2]] has no component along the last generator
    assert!(!check_cocycle(&a, &phi, &pol()).unwrap().passed());
}

#[test]
fn differential_2_examples() {
    let r2 = chart(&["x", "y"]);
    let l0 = graph_of_two_form(&dxdy(&r2)).unwrap();
    let a0 = AlgebroidOnL::new(l0.clone());
    let om = omega_l0_cochain(&l0).unwrap();
    assert_eq!(om.get(0, 1), &Expr::one());
    assert!(algebroid_differential_2(&a0, &om, &pol()).unwrap().passed());
    assert!(algebroid_differential_2(&a0, &Cochain2::zero(2), &pol()).unwrap().passed());

    // a rank-2 algebroid has no triples, so the negative control lives on TM of R^3
    let r3 = chart(&["x", "y", "z"]);
    let tm3 = FrameSubbundle::from_tm(
        &r3,
        (0..3)
            .map(|i| SectionTM {
                x: VectorField::partial(&r3, i),
                xi: DifferentialForm::zero(&r3, 1),
            })
            .collect(),
        3,
    )
    .unwrap();
    let z = Expr::coord("z");
    let table = vec![
        vec![Expr::zero(), z.clone(), Expr::zero()],
        vec![-z, Expr::zero(), Expr::zero()],
        vec![Expr::zero(), Expr::zero(), Expr::zero()],
    ];
    let r = algebroid_differential_2(&AlgebroidOnL::new(tm3), &Cochain2::from_table(table).unwrap(), &pol()).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(r.condition("closedness").unwrap().witnesses[0].label.contains("(0,1,2)"));
    assert!(Cochain2::from_table(vec![vec![Expr::zero(), Expr::one()], vec![Expr::one(), Expr::zero()]]).is_err());
}

#[test]
fn central_extension_examples() {
    let r2 = chart(&["x", "y"]);
    let l0 = graph_of_two_form(&dxdy(&r2)).unwrap();
    let a0 = AlgebroidOnL::new(l0.clone());
    let g = l0.tm_generators();
    let zero = Expr::zero();
    let (s, f) = central_extension_bracket(&a0, |_, _| Ok(Expr::zero()), (&g[0], &zero), (&g[1], &zero)).unwrap();
    assert_eq!(s, courant_bracket(&g[0], &g[1]).unwrap());
    assert!(f.is_zero_literal());

    let (_, f) = central_extension_bracket(&a0, omega_l0, (&g[0], &zero), (&g[1], &zero)).unwrap();
    assert_eq!(f, Expr::one());
    let ext = crate::courant::extended_courant_bracket(&lift_pair(&g[0], &zero), &lift_pair(&g[1], &zero)).unwrap();
    assert_eq!(ext.g, Expr::one());

    // bilinearity over constants
    let two = Expr::int(2);
    let three = Expr::int(3);
    let (s2, f2) = central_extension_bracket(&a0, omega_l0, (&g[0].scale(&two), &Expr::coord("x")), (&g[1].scale(&three), &Expr::one())).unwrap();
    let (s1, f1) = central_extension_bracket(&a0, omega_l0, (&g[0], &(Expr::coord("x") / two.clone())), (&g[1], &(Expr::one() / three.clone()))).unwrap();
    assert_eq!(s2, s1.scale(&Expr::int(6)));
    assert_eq!(f2, f1 * Expr::int(6));

    assert!(check_central_extension(&l0, &pol()).unwrap().passed());
}

#[test]
fn action_algebroid_examples() {
    let r2 = chart(&["x", "y"]);
    let lift = lift_dirac(&graph_of_two_form(&dxdy(&r2)).unwrap()).unwrap();
    let a = AlgebroidOnL::new(lift.clone());
    let phi = extract_cocycle(&lift).unwrap();
    let e0 = TimeSection::basis(3, 0, Expr::one());
    let e1 = TimeSection::basis(3, 1, Expr::one());
    assert_eq!(
        action_algebroid_bracket(&a, &phi, "t", &e0, &e1).unwrap(),
        a.bracket(&lift.generators()[0], &lift.generators()[1]).unwrap()
    );
    let rho = action_algebroid_anchor(&a, &phi, "t", &e0).unwrap();
    assert!(rho.component(2).is_zero_literal());

    let l = l_theta_xdy();
    let a = AlgebroidOnL::new(l.clone());
    let phi = extract_cocycle(&l).unwrap();
    let t = Expr::coord("t");
    let te = TimeSection::basis(3, 2, t);
    let e = TimeSection::basis(3, 2, Expr::one());
    let got = action_algebroid_bracket(&a, &phi, "t", &te, &e).unwrap();
    assert_eq!(got, l.generators()[2].scale(&Expr::int(-1)));
    let rho = action_algebroid_anchor(&a, &phi, "t", &e).unwrap();
    assert_eq!(rho.components(), &[Expr::zero(), Expr::zero(), Expr::one()]);
}

#[test]
fn action_iso_checks() {
    let r2 = chart(&["x", "y"]);
    let lift = lift_dirac(&graph_of_two_form(&dxdy(&r2)).unwrap()).unwrap();
    let pol = pol();
    assert!(check_action_iso(&l_theta_xdy(), &pol).unwrap().passed());
    assert!(check_action_iso(&lift, &pol).unwrap().passed());
    assert!(check_action_iso(&l_theta_contact(), &pol).unwrap().passed());
    let r = check_action_iso_with(&l_theta_xdy(), &pol, IsoMap::WithoutExp).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(!r.conditions[0].witnesses.is_empty());
}

#[test]
fn conformal_cocycle() {
    let l = l_theta_xdy();
    let c = l.chart().clone();
    let phi = ConformalFactor::new(&c, c.parse("1 + x^2/4").unwrap()).unwrap();
    let lphi = conformal_change(&l, &phi).unwrap();
    let cocycle = extract_cocycle(&lphi).unwrap();
    for (v, g) in cocycle.values.iter().zip(l.generators()) {
        let want = &g.f - contract(phi.mu(), &g.x).unwrap();
        assert_eq!(v, &want);
    }
    assert!(check_cocycle(&AlgebroidOnL::new(lphi), &cocycle, &pol()).unwrap().passed());
}

#[test]
fn algebroid_axioms_on_fixtures() {
    let r2 = chart(&["x", "y"]);
    let lambda = Multivector::from_terms(&r2, 2, [(vec![0, 1], Expr::one())]).unwrap();
    let fixtures = [
        l_theta_xdy(),
        l_theta_contact(),
        lift_dirac(&graph_of_two_form(&dxdy(&r2)).unwrap()).unwrap(),
        construct_l_jacobi(&lambda, &VectorField::zero(&r2)).unwrap(),
        graph_of_two_form(&dxdy(&r2)).unwrap(),
    ];
    for l in fixtures {
        let a = AlgebroidOnL::new(l.clone());
        assert!(check_anchor_morphism(&a, &pol()).unwrap().passed());
        assert!(check_jacobi_identity(&a, &pol()).unwrap().passed());
        if l.ambient() == Ambient::E1 {
            assert!(check_cocycle(&a, &extract_cocycle(&l).unwrap(), &pol()).unwrap().passed());
        }
    }
}

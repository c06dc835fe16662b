use super::*;
use crate::courant::{pairing_e1, SectionE1, SectionTM};
use crate::report::Verdict;
use crate::tensor::{Multivector, SmoothMap, VectorField};

fn pol() -> SamplingPolicy {
    SamplingPolicy::default().with_count(20)
}

fn chart(names: &[&str]) -> Chart {
    Chart::new("M", names).unwrap()
}

fn one_form(c: &Chart, comps: &[&str]) -> DifferentialForm {
    DifferentialForm::from_components(c, comps.iter().map(|e| c.parse(e).unwrap()).collect()).unwrap()
}

fn vf(c: &Chart, comps: &[&str]) -> VectorField {
    VectorField::new(c, comps.iter().map(|e| c.parse(e).unwrap()).collect()).unwrap()
}

fn e1(c: &Chart, x: &[&str], f: &str, xi: &[&str], g: &str) -> SectionE1 {
    SectionE1::new(vf(c, x), c.parse(f).unwrap(), one_form(c, xi), c.parse(g).unwrap()).unwrap()
}

fn tm(c: &Chart, x: &[&str], xi: &[&str]) -> SectionTM {
    SectionTM::new(vf(c, x), one_form(c, xi)).unwrap()
}

fn bivector(c: &Chart, terms: &[(usize, usize, &str)]) -> Multivector {
    Multivector::from_terms(c, 2, terms.iter().map(|(i, j, e)| (vec![*i, *j], c.parse(e).unwrap()))).unwrap()
}

fn passes(r: Result<crate::report::CheckReport>) -> bool {
    r.unwrap().passed()
}

fn dxdy(c: &Chart) -> DifferentialForm {
    DifferentialForm::dx(c, 0).wedge(&DifferentialForm::dx(c, 1)).unwrap()
}

fn contact() -> (Chart, DifferentialForm, Multivector, VectorField) {
    let c = chart(&["x", "y", "z"]);
    let theta = one_form(&c, &["-y", "0", "1"]);
    // (d_x + y d_z) ^ d_y = d_x^d_y - y d_y^d_z
    let lambda = bivector(&c, &[(0, 1, "1"), (1, 2, "-y")]);
    let e = VectorField::partial(&c, 2);
    (c, theta, lambda, e)
}

#[test]
fn isotropy_examples() {
    let r2 = chart(&["x", "y"]);
    assert!(passes(check_maximal_isotropy(&graph_of_two_form(&dxdy(&r2)).unwrap(), &pol())));

    let lt = construct_l_theta(&one_form(&r2, &["0", "x"])).unwrap();
    let r = check_maximal_isotropy(&lt, &pol()).unwrap();
    assert!(r.passed() && lt.rank() == 3);
    // oracle: pairing of every generator pair, directly
    for a in lt.generators() {
        for b in lt.generators() {
            assert!(pairing_e1(a, b).unwrap().is_zero_literal());
        }
    }

    let r1 = chart(&["x"]);
    let bad = FrameSubbundle::from_tm(&r1, vec![tm(&r1, &["1"], &["1"])], 1).unwrap();
    let r = check_maximal_isotropy(&bad, &pol()).unwrap();
    assert_eq!(r.condition("isotropy").unwrap().verdict, Verdict::Fail);
    assert_eq!(r.condition("rank").unwrap().verdict, Verdict::Pass);
}

#[test]
fn involutivity_examples() {
    let r2 = chart(&["x", "y"]);
    let lt = construct_l_theta(&one_form(&r2, &["0", "x"])).unwrap();
    assert!(passes(check_involutivity(&lt, &pol())));

    let lj = construct_l_jacobi(&bivector(&r2, &[(0, 1, "1")]), &VectorField::zero(&r2)).unwrap();
    assert!(passes(check_involutivity(&lj, &pol())));

    let bad = FrameSubbundle::from_e1(
        &r2,
        vec![
            e1(&r2, &["1", "0"], "0", &["0", "0"], "0"),
            e1(&r2, &["0", "0"], "0", &["y", "0"], "0"),
            e1(&r2, &["0", "0"], "1", &["0", "0"], "0"),
        ],
        3,
    )
    .unwrap();
    let r = check_involutivity(&bad, &pol()).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(!r.conditions[0].witnesses.is_empty());
}

#[test]
fn l_theta_tables() {
    let r1 = chart(&["x"]);
    let l = construct_l_theta(&DifferentialForm::zero(&r1, 1)).unwrap();
    assert_eq!(
        l.generators(),
        &[e1(&r1, &["1"], "0", &["0"], "0"), e1(&r1, &["0"], "1", &["0"], "0")]
    );

    let r2 = chart(&["x", "y"]);
    let l = construct_l_theta(&one_form(&r2, &["0", "x"])).unwrap();
    // d theta = dx^dy; i_{d_x} = dy, i_{d_y} = -dx
    assert_eq!(
        l.generators(),
        &[
            e1(&r2, &["1", "0"], "0", &["0", "1"], "0"),
            e1(&r2, &["0", "1"], "0", &["-1", "0"], "-x"),
            e1(&r2, &["0", "0"], "1", &["0", "x"], "0"),
        ]
    );
    assert!(passes(check_dirac(&l, &pol())));

    let (_, theta, _, _) = contact();
    let l = construct_l_theta(&theta).unwrap();
    assert_eq!(l.len(), 4);
    assert!(passes(check_dirac(&l, &pol())));
}

#[test]
fn lift_examples() {
    let r1 = chart(&["x"]);
    let tm_r1 = FrameSubbundle::from_tm(&r1, vec![tm(&r1, &["1"], &["0"])], 1).unwrap();
    let l = lift_dirac(&tm_r1).unwrap();
    assert_eq!(
        l.generators(),
        &[e1(&r1, &["1"], "0", &["0"], "0"), e1(&r1, &["0"], "0", &["0"], "1")]
    );

    let r2 = chart(&["x", "y"]);
    let g = graph_of_two_form(&dxdy(&r2)).unwrap();
    let l = lift_dirac(&g).unwrap();
    assert_eq!(l.len(), 3);
    assert!(passes(check_dirac(&g, &pol())) && passes(check_dirac(&l, &pol())));

    // D = span{d_x, d_y + x d_z} plus its annihilator: isotropic, not involutive
    let r3 = chart(&["x", "y", "z"]);
    let l0 = FrameSubbundle::from_tm(
        &r3,
        vec![
            tm(&r3, &["1", "0", "0"], &["0", "0", "0"]),
            tm(&r3, &["0", "1", "x"], &["0", "0", "0"]),
            tm(&r3, &["0", "0", "0"], &["0", "-x", "1"]),
        ],
        3,
    )
    .unwrap();
    assert!(passes(check_maximal_isotropy(&l0, &pol())));
    assert!(!passes(check_involutivity(&l0, &pol())));
    let l = lift_dirac(&l0).unwrap();
    assert!(passes(check_maximal_isotropy(&l, &pol())));
    assert!(!passes(check_involutivity(&l, &pol())));
}

#[test]
fn jacobi_examples() {
    let r2 = chart(&["x", "y"]);
    let l = construct_l_jacobi(&Multivector::zero(&r2, 2), &VectorField::zero(&r2)).unwrap();
    assert_eq!(
        l.generators(),
        &[
            e1(&r2, &["0", "0"], "0", &["1", "0"], "0"),
            e1(&r2, &["0", "0"], "0", &["0", "1"], "0"),
            e1(&r2, &["0", "0"], "0", &["0", "0"], "1"),
        ]
    );
    let l = construct_l_jacobi(&bivector(&r2, &[(0, 1, "1")]), &VectorField::zero(&r2)).unwrap();
    assert_eq!(
        l.generators(),
        &[
            e1(&r2, &["0", "1"], "0", &["1", "0"], "0"),
            e1(&r2, &["-1", "0"], "0", &["0", "1"], "0"),
            e1(&r2, &["0", "0"], "0", &["0", "0"], "1"),
        ]
    );
    assert!(passes(check_dirac(&l, &pol())));

    let (_, _, lambda, e) = contact();
    assert!(passes(check_dirac(&construct_l_jacobi(&lambda, &e).unwrap(), &pol())));
}

#[test]
fn contact_l_theta_is_the_jacobi_pair_with_reversed_signs() {
    let (c, theta, lambda, e) = contact();
    let lt = construct_l_theta(&theta).unwrap();
    let flipped = construct_l_jacobi(&lambda.neg(), &e.neg()).unwrap();
    assert!(passes(check_same_subbundle(&lt, &flipped, &pol())));
    let as_given = construct_l_jacobi(&lambda, &e).unwrap();
    assert!(!passes(check_same_subbundle(&lt, &as_given, &pol())));
    assert_eq!(c.dim(), 3);
}

#[test]
fn conformal_examples() {
    let r2 = chart(&["x", "y"]);
    let theta = one_form(&r2, &["0", "x"]);
    let l = construct_l_theta(&theta).unwrap();
    let one = ConformalFactor::new(&r2, Expr::one()).unwrap();
    assert_eq!(conformal_change(&l, &one).unwrap(), l);

    let phi = ConformalFactor::new(&r2, r2.parse("1 + x^2/4").unwrap()).unwrap();
    assert!(phi.check_mu(&pol()).unwrap());
    let lphi = conformal_change(&l, &phi).unwrap();
    assert!(passes(check_dirac(&lphi, &pol())));
    let target = construct_l_theta(&theta.scale(phi.phi())).unwrap();
    assert!(passes(check_same_subbundle(&lphi, &target, &pol())));

    let back = conformal_change(&lphi, &phi.inverse()).unwrap();
    assert!(passes(check_same_subbundle(&back, &l, &pol())));

    let psi = ConformalFactor::new(&r2, r2.parse("exp(y)").unwrap()).unwrap();
    let twice = conformal_change(&lphi, &psi).unwrap();
    let once = conformal_change(&l, &phi.product(&psi).unwrap()).unwrap();
    assert!(passes(check_same_subbundle(&twice, &once, &pol())));

    let neg = ConformalFactor::new(&r2, r2.parse("-2 - y^2").unwrap()).unwrap();
    assert!(neg.check_mu(&pol()).unwrap());
    let vanishing = ConformalFactor::new(&r2, r2.parse("x").unwrap()).unwrap();
    assert!(matches!(vanishing.check_nonvanishing(&pol()), Err(Error::Vanishing(_))));
}

#[test]
fn induced_examples() {
    let r2 = chart(&["x", "y"]);
    let l0 = graph_of_two_form(&dxdy(&r2)).unwrap();
    let lt = induced_dirac_on_mxr(&lift_dirac(&l0).unwrap()).unwrap();
    let c = lt.chart().clone();
    assert_eq!(c.coord_names(), vec!["x", "y", "t"]);
    // oracle: X + e^t alpha for X + alpha in L0, and e^t dt
    let et = c.parse("exp(t)").unwrap();
    let mut gens: Vec<SectionTM> = l0
        .tm_generators()
        .iter()
        .map(|s| SectionTM::new(s.x.embed(&c).unwrap(), s.xi.embed(&c).unwrap().scale(&et)).unwrap())
        .collect();
    gens.push(SectionTM::new(VectorField::zero(&c), DifferentialForm::dx(&c, 2).scale(&et)).unwrap());
    let expected = FrameSubbundle::from_tm(&c, gens, 3).unwrap();
    assert!(passes(check_same_subbundle(&lt, &expected, &pol())));
    assert!(passes(check_dirac(&lt, &pol())));

    let lambda = bivector(&r2, &[(0, 1, "1")]);
    let lj = construct_l_jacobi(&lambda, &VectorField::zero(&r2)).unwrap();
    let ind = induced_dirac_on_mxr(&lj).unwrap();
    let pi = lambda.embed(ind.chart()).unwrap().scale(&ind.chart().parse("exp(-t)").unwrap());
    assert!(passes(check_same_subbundle(&ind, &graph_of_bivector(&pi).unwrap(), &pol())));

    let (_, theta, _, _) = contact();
    let ind = induced_dirac_on_mxr(&construct_l_theta(&theta).unwrap()).unwrap();
    let c = ind.chart().clone();
    let omega = exterior_derivative(&theta.embed(&c).unwrap().scale(&c.parse("exp(t)").unwrap()));
    assert!(passes(check_same_subbundle(&ind, &graph_of_two_form(&omega).unwrap(), &pol())));

    let taken = chart(&["t", "x"]);
    let l = construct_l_theta(&DifferentialForm::zero(&taken, 1)).unwrap();
    assert_eq!(induced_dirac_on_mxr(&l).unwrap().chart().coord(2), "t_");
}

#[test]
fn graph_examples() {
    let r2 = chart(&["x", "y"]);
    let g = graph_of_two_form(&DifferentialForm::zero(&r2, 2)).unwrap();
    assert_eq!(g.tm_generators(), vec![tm(&r2, &["1", "0"], &["0", "0"]), tm(&r2, &["0", "1"], &["0", "0"])]);
    let g = graph_of_bivector(&bivector(&r2, &[(0, 1, "1")])).unwrap();
    assert_eq!(g.tm_generators(), vec![tm(&r2, &["0", "1"], &["1", "0"]), tm(&r2, &["-1", "0"], &["0", "1"])]);
    let g = graph_of_two_form(&dxdy(&r2)).unwrap();
    assert_eq!(g.tm_generators(), vec![tm(&r2, &["1", "0"], &["0", "1"]), tm(&r2, &["0", "1"], &["-1", "0"])]);
}

#[test]
fn forward_map_examples() {
    let r2 = chart(&["x", "y"]);
    let l = construct_l_theta(&one_form(&r2, &["0", "x"])).unwrap();
    assert!(passes(check_forward_map(&SmoothMap::identity(&r2), &l, &l, &pol())));

    let r1 = Chart::new("N", &["u"]).unwrap();
    let proj = SmoothMap::new(&r2, &r1, vec![r2.parse("x").unwrap()]).unwrap();
    let tm2 = FrameSubbundle::from_tm(&r2, vec![tm(&r2, &["1", "0"], &["0", "0"]), tm(&r2, &["0", "1"], &["0", "0"])], 2).unwrap();
    let tm1 = FrameSubbundle::from_tm(&r1, vec![tm(&r1, &["1"], &["0"])], 1).unwrap();
    let cot1 = FrameSubbundle::from_tm(&r1, vec![tm(&r1, &["0"], &["1"])], 1).unwrap();
    assert!(passes(check_forward_map(&proj, &tm2, &tm1, &pol())));
    let r = check_forward_map(&proj, &tm2, &cot1, &pol()).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(!r.conditions[0].witnesses.is_empty());
    // a span of pure forms equals its own form flip; a graph does not
    assert!(passes(check_anti_map(&SmoothMap::identity(&r1), &cot1, &cot1, &pol())));
    assert!(!passes(check_anti_map(
        &SmoothMap::identity(&r2),
        &graph_of_two_form(&dxdy(&r2)).unwrap(),
        &graph_of_two_form(&dxdy(&r2)).unwrap(),
        &pol()
    )));
}

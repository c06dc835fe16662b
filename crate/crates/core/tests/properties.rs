use dirac_jacobi::fixtures::random;
use dirac_jacobi::symcalc::{is_zero, Expr, Point, SamplingPolicy};
use dirac_jacobi::tensor::{
    exterior_derivative, interior_product, lie_bracket, lie_derivative, pullback, wedge, AlternatingTensor, Chart,
    DifferentialForm,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn policy() -> SamplingPolicy {
    SamplingPolicy::default().with_count(12)
}

fn chart() -> Chart {
    Chart::new("M", &["x", "y", "z"]).unwrap()
}

fn vanishes(w: &DifferentialForm) -> bool {
    w.terms().iter().all(|(_, c)| is_zero(c, &policy()).holds())
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 100,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn d_squared_is_zero(seed in any::<u64>(), degree in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random::form(&mut rng, &chart(), degree);
        prop_assert!(vanishes(&exterior_derivative(&exterior_derivative(&w))));
    }

    #[test]
    fn cartan_formula(seed in any::<u64>(), degree in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = chart();
        let x = random::vector_field(&mut rng, &c);
        let w = random::form(&mut rng, &c, degree);
        let lhs = lie_derivative(&x, &w).unwrap();
        let rhs = interior_product(&x, &exterior_derivative(&w))
            .unwrap()
            .add(&exterior_derivative(&interior_product(&x, &w).unwrap()))
            .unwrap();
        prop_assert!(vanishes(&lhs.sub(&rhs).unwrap()));
    }

    #[test]
    fn interior_product_is_an_antiderivation(seed in any::<u64>(), k in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = chart();
        let x = random::vector_field(&mut rng, &c);
        let a = random::form(&mut rng, &c, k);
        let b = random::form(&mut rng, &c, 1);
        let lhs = interior_product(&x, &wedge(&a, &b).unwrap()).unwrap();
        let sign = if k % 2 == 0 { Expr::one() } else { Expr::int(-1) };
        let rhs = wedge(&interior_product(&x, &a).unwrap(), &b)
            .unwrap()
            .add(&wedge(&a, &interior_product(&x, &b).unwrap()).unwrap().scale(&sign))
            .unwrap();
        prop_assert!(vanishes(&lhs.sub(&rhs).unwrap()));
    }

    #[test]
    fn pullback_is_natural(seed in any::<u64>(), degree in 0usize..2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let src = Chart::new("S", &["u", "v"]).unwrap();
        let tgt = chart();
        let f = random::map(&mut rng, &src, &tgt);
        let w = random::form(&mut rng, &tgt, degree);
        let a = pullback(&f, &exterior_derivative(&w)).unwrap();
        let b = exterior_derivative(&pullback(&f, &w).unwrap());
        prop_assert!(vanishes(&a.sub(&b).unwrap()));
        let v = random::form(&mut rng, &tgt, 1);
        let lhs = pullback(&f, &wedge(&w, &v).unwrap()).unwrap();
        let rhs = wedge(&pullback(&f, &w).unwrap(), &pullback(&f, &v).unwrap()).unwrap();
        prop_assert!(vanishes(&lhs.sub(&rhs).unwrap()));
    }

    #[test]
    fn vector_fields_satisfy_jacobi(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = chart();
        let (x, y, z) = (random::vector_field(&mut rng, &c), random::vector_field(&mut rng, &c), random::vector_field(&mut rng, &c));
        let cyc = |a, b, d| lie_bracket(a, &lie_bracket(b, d).unwrap()).unwrap();
        let sum = cyc(&x, &y, &z).add(&cyc(&y, &z, &x)).unwrap().add(&cyc(&z, &x, &y)).unwrap();
        prop_assert!(sum.components().iter().all(|e| is_zero(e, &policy()).holds()));
    }

    #[test]
    fn derivatives_match_central_differences(seed in any::<u64>(), var in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = chart();
        let e = random::expression(&mut rng, &c, 3);
        let name = c.coord(var);
        let d = e.differentiate(name);
        let at = [0.3, -0.7, 0.45];
        let shifted = |h: f64| {
            let mut v = at;
            v[var] += h;
            Point::from_pairs(&[("x", v[0]), ("y", v[1]), ("z", v[2])]).eval(&e).unwrap()
        };
        let h = 1e-5;
        let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
        let sym = Point::from_pairs(&[("x", at[0]), ("y", at[1]), ("z", at[2])]).eval(&d).unwrap();
        prop_assert!((sym - fd).abs() <= 1e-6 * sym.abs().max(1.0), "{e}: {sym} vs {fd}");
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion.

use std::path::PathBuf;

use dirac_jacobi::algebroid::{
    algebroid_differential_2, check_action_iso, check_central_extension, check_cocycle, extract_cocycle, omega_l0_cochain,
    AlgebroidOnL,
};
use dirac_jacobi::fixtures::{self, random};
use dirac_jacobi::groupoid::{
    build_action_groupoid, check_groupoid, check_multiplicative_function, check_precontact, check_presymplectic,
    equivalence_transform, eta_to_omega, extract_lm, omega_to_eta, pair_theta_model, PrecontactData,
};
use dirac_jacobi::report::{CheckReport, Verdict};
use dirac_jacobi::structures::{
    check_involutivity, check_maximal_isotropy, check_same_subbundle, conformal_change, construct_l_jacobi,
    construct_l_theta, graph_of_bivector, graph_of_two_form, induced_dirac_on_mxr, lift_dirac, ConformalFactor,
    FrameSubbundle,
};
use dirac_jacobi::symcalc::{is_zero, random_point, Expr, Point, SamplingPolicy};
use dirac_jacobi::tensor::{
    exterior_derivative, interior_product, lie_bracket, lie_derivative, pullback, wedge, AlternatingTensor, Chart,
    DifferentialForm, Multivector, VectorField,
};
use djcheck::{run_scenario, Overrides};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const RESIDUAL_TOL: f64 = 1e-7;
const ROUND_TRIP_TOL: f64 = 1e-9;
const FD_TOL: f64 = 1e-6;
const INSTANCES: u64 = 100;

type Outcome = dirac_jacobi::Result<()>;
type Criterion = (&'static str, fn(&mut Log) -> Outcome);

struct Log(Vec<String>);

impl Log {
    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.0.push(what.into());
        }
    }

    fn passes(&mut self, r: &CheckReport, what: &str) {
        self.require(r.passed(), format!("{what} is {:?}", r.verdict));
    }

    fn within(&mut self, r: &CheckReport, tol: f64, what: &str) {
        self.passes(r, what);
        let m = r.max_residual();
        self.require(m <= tol, format!("{what}: residual {m:e} above {tol:e}"));
    }

    fn fails_on(&mut self, r: &CheckReport, condition: &str, what: &str) {
        match r.condition(condition) {
            Some(c) => {
                self.require(c.verdict == Verdict::Fail, format!("{what}: `{condition}` is {:?}", c.verdict));
                self.require(!c.witnesses.is_empty(), format!("{what}: `{condition}` has no witness"));
            }
            None => self.0.push(format!("{what}: no condition `{condition}`")),
        }
    }
}

fn policy() -> SamplingPolicy {
    SamplingPolicy::default()
}

fn theta_fixtures() -> [(&'static str, DifferentialForm); 2] {
    [("x dy", fixtures::theta_x_dy()), ("dz - y dx", fixtures::contact_theta())]
}

fn structure_checks(log: &mut Log, l: &FrameSubbundle, what: &str) -> Outcome {
    log.passes(&check_maximal_isotropy(l, &policy())?, &format!("{what} isotropy"));
    log.passes(&check_involutivity(l, &policy())?, &format!("{what} involutivity"));
    Ok(())
}

fn criterion_1(log: &mut Log) -> Outcome {
    for (name, theta) in theta_fixtures() {
        let l = construct_l_theta(&theta)?;
        structure_checks(log, &l, name)?;
        let phi = extract_cocycle(&l)?;
        let mut want = vec![Expr::zero(); l.len()];
        *want.last_mut().unwrap() = Expr::one();
        log.require(phi.values == want, format!("{name}: cocycle is {:?}", phi.values.iter().map(Expr::to_string).collect::<Vec<_>>()));
        log.within(&check_cocycle(&AlgebroidOnL::new(l), &phi, &policy())?, RESIDUAL_TOL, &format!("{name} cocycle"));
    }
    Ok(())
}

fn criterion_2(log: &mut Log) -> Outcome {
    for (name, theta) in theta_fixtures() {
        let (gm, pd) = pair_theta_model(&theta)?;
        log.passes(&check_groupoid(&gm, &policy())?, &format!("{name} groupoid"));
        log.passes(&check_multiplicative_function(&gm, &pd.sigma, &policy())?, &format!("{name} sigma"));
        log.passes(&check_precontact(&gm, &pd, &policy())?, &format!("{name} precontact"));
        let lt = construct_l_theta(&theta)?;
        let ex = extract_lm(&gm, &pd, Some(&lt), &policy())?;
        log.passes(&ex.report, &format!("{name} extraction"));
        log.require(ex.fibers.len() == policy().count, format!("{name}: {} fibers", ex.fibers.len()));
    }
    Ok(())
}

/// Largest `|a - b|` over sampled points, slot by slot.
fn sampled_gap(chart: &Chart, a: &[Expr], b: &[Expr]) -> f64 {
    let pol = policy();
    let mut rng = pol.rng(0x3a);
    let names = chart.coords().iter().cloned().collect();
    let mut worst = 0.0f64;
    for _ in 0..pol.count {
        let p = random_point(&mut rng, &names, pol.low, pol.high);
        for (x, y) in a.iter().zip(b) {
            let gap = match (p.eval(x), p.eval(y)) {
                (Ok(u), Ok(v)) => (u - v).abs(),
                _ => f64::INFINITY,
            };
            worst = worst.max(gap);
        }
    }
    worst
}

fn criterion_3(log: &mut Log) -> Outcome {
    for (name, theta) in theta_fixtures() {
        let (gm, pd) = pair_theta_model(&theta)?;
        let act = build_action_groupoid(&gm, &pd.sigma, &policy())?;
        let ps = eta_to_omega(&act, &pd)?;
        let total = act.total();
        let dt = VectorField::partial(total, total.dim() - 1);
        log.require(ps.z.as_ref() == Some(&dt), format!("{name}: Z is not the line direction"));
        let r = check_presymplectic(&act, &ps, &policy())?;
        log.require(r.conditions.len() == 4, format!("{name}: {} presymplectic conditions", r.conditions.len()));
        log.within(&r, RESIDUAL_TOL, &format!("{name} presymplectic"));

        let back = omega_to_eta(&act, &ps, &policy())?;
        let (a, b) = (full_components(&back.eta, &back.sigma), full_components(&pd.eta, &pd.sigma));
        let gap = sampled_gap(gm.total(), &a, &b);
        log.require(gap <= ROUND_TRIP_TOL, format!("{name}: round trip off by {gap:e}"));
    }

    let zero = DifferentialForm::zero(&fixtures::plane(), 1);
    let (gm, pd) = pair_theta_model(&zero)?;
    log.fails_on(&check_precontact(&gm, &pd, &policy())?, "non-degeneracy", "theta = 0");

    let theta = fixtures::theta_x_dy();
    let (gm, pd) = pair_theta_model(&theta)?;
    let eta = pullback(gm.beta(), &theta)?.sub(&pullback(gm.alpha(), &theta)?)?;
    let dropped = PrecontactData { eta, sigma: pd.sigma };
    log.fails_on(&check_precontact(&gm, &dropped, &policy())?, "multiplicativity", "dropped exponential");
    Ok(())
}

/// Every component of a 1-form followed by `sigma`.
fn full_components(eta: &DifferentialForm, sigma: &Expr) -> Vec<Expr> {
    let mut v = eta.components();
    v.push(sigma.clone());
    v
}

/// `e^{-t} (lambda + d/dt ^ e)` on the chart of `on`.
fn poissonization(lambda: &Multivector, e: &VectorField, on: &FrameSubbundle) -> dirac_jacobi::Result<Multivector> {
    let c = on.chart();
    let t = c.dim() - 1;
    let dt_e: Vec<(Vec<usize>, Expr)> = e.components().iter().enumerate().map(|(j, ej)| (vec![t, j], ej.clone())).collect();
    let pi = lambda.embed(c)?.add(&Multivector::from_terms(c, 2, dt_e)?)?;
    Ok(pi.scale(&(-c.coord_expr(t)).exp()))
}

fn criterion_4(log: &mut Log) -> Outcome {
    let lambda = fixtures::poisson_plane();
    let e = VectorField::zero(&fixtures::plane());
    let ind = induced_dirac_on_mxr(&construct_l_jacobi(&lambda, &e)?)?;
    let graph = graph_of_bivector(&poissonization(&lambda, &e, &ind)?)?;
    log.passes(&check_same_subbundle(&ind, &graph, &policy())?, "Poisson plane");

    let (lambda, e) = fixtures::contact_jacobi();
    let l = construct_l_jacobi(&lambda, &e)?;
    structure_checks(log, &l, "contact pair")?;
    let ind = induced_dirac_on_mxr(&l)?;
    let graph = graph_of_bivector(&poissonization(&lambda, &e, &ind)?)?;
    log.passes(&check_same_subbundle(&ind, &graph, &policy())?, "contact Poissonization");
    Ok(())
}

fn criterion_5(log: &mut Log) -> Outcome {
    let l0 = graph_of_two_form(&fixtures::area_form())?;
    let lift = lift_dirac(&l0)?;
    structure_checks(log, &lift, "lift")?;
    let omega = omega_l0_cochain(&l0)?;
    let closed = algebroid_differential_2(&AlgebroidOnL::new(l0.clone()), &omega, &policy())?;
    log.within(&closed, RESIDUAL_TOL, "Omega closedness");
    log.within(&check_central_extension(&l0, &policy())?, RESIDUAL_TOL, "central extension");
    let phi = extract_cocycle(&lift)?;
    log.require(phi.values.iter().all(Expr::is_zero_literal), "lift cocycle is not literally zero");
    Ok(())
}

fn criterion_6(log: &mut Log) -> Outcome {
    let lift = lift_dirac(&graph_of_two_form(&fixtures::area_form())?)?;
    let l_xdy = construct_l_theta(&fixtures::theta_x_dy())?;
    let l_contact = construct_l_theta(&fixtures::contact_theta())?;
    for (name, l) in [("x dy", &l_xdy), ("dz - y dx", &l_contact), ("lift", &lift)] {
        log.passes(&check_action_iso(l, &policy())?, &format!("{name} action isomorphism"));
    }

    let one = ConformalFactor::new(l_xdy.chart(), Expr::one())?;
    log.require(conformal_change(&l_xdy, &one)? == l_xdy, "phi = 1 is not the identity");
    let phi = fixtures::conformal_bump();
    let there = conformal_change(&l_xdy, &phi)?;
    let back = conformal_change(&there, &phi.inverse())?;
    log.passes(&check_same_subbundle(&back, &l_xdy, &policy())?, "phi then 1/phi");

    let (gm, pd) = pair_theta_model(&fixtures::theta_x_dy())?;
    let moved = equivalence_transform(&gm, &pd, &phi, &policy())?;
    let ex = extract_lm(&gm, &moved, Some(&there), &policy())?;
    log.passes(&ex.report, "extraction after the equivalence");
    Ok(())
}

fn vanishes(w: &DifferentialForm, pol: &SamplingPolicy) -> bool {
    w.terms().iter().all(|(_, c)| is_zero(c, pol).holds())
}

fn criterion_7(log: &mut Log) -> Outcome {
    let pol = policy().with_count(12);
    let m = fixtures::space();
    let s = Chart::new("S", &["u", "v"])?;
    let mut failed = |what: &str, seed: u64| log.0.push(format!("{what} fails at seed {seed}"));
    for seed in 0..INSTANCES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = (seed % 3) as usize;
        let w = random::form(&mut rng, &m, k);
        if !vanishes(&exterior_derivative(&exterior_derivative(&w)), &pol) {
            failed("d^2 = 0", seed);
        }

        let x = random::vector_field(&mut rng, &m);
        let w = random::form(&mut rng, &m, 1 + k % 2);
        let cartan = lie_derivative(&x, &w)?
            .sub(&interior_product(&x, &exterior_derivative(&w))?)?
            .sub(&exterior_derivative(&interior_product(&x, &w)?))?;
        if !vanishes(&cartan, &pol) {
            failed("Cartan formula", seed);
        }

        let a = random::form(&mut rng, &m, 1 + k % 2);
        let b = random::form(&mut rng, &m, 1);
        let sign = if a.degree() % 2 == 0 { Expr::one() } else { Expr::int(-1) };
        let anti = interior_product(&x, &wedge(&a, &b)?)?
            .sub(&wedge(&interior_product(&x, &a)?, &b)?)?
            .sub(&wedge(&a, &interior_product(&x, &b)?)?.scale(&sign))?;
        if !vanishes(&anti, &pol) {
            failed("interior antiderivation", seed);
        }

        let f = random::map(&mut rng, &s, &m);
        let w = random::form(&mut rng, &m, k % 2);
        let nat = pullback(&f, &exterior_derivative(&w))?.sub(&exterior_derivative(&pullback(&f, &w)?))?;
        if !vanishes(&nat, &pol) {
            failed("pullback naturality", seed);
        }

        let (x, y, z) = (random::vector_field(&mut rng, &m), random::vector_field(&mut rng, &m), random::vector_field(&mut rng, &m));
        let cyc = |a: &VectorField, b: &VectorField, c: &VectorField| lie_bracket(a, &lie_bracket(b, c)?);
        let jac = cyc(&x, &y, &z)?.add(&cyc(&y, &z, &x)?)?.add(&cyc(&z, &x, &y)?)?;
        if !jac.components().iter().all(|e| is_zero(e, &pol).holds()) {
            failed("vector-field Jacobi", seed);
        }

        let e = random::expression(&mut rng, &m, 3);
        let var = (seed % 3) as usize;
        let at = [0.3, -0.7, 0.45];
        let eval = |expr: &Expr, h: f64| {
            let mut v = at;
            v[var] += h;
            Point::from_pairs(&[("x", v[0]), ("y", v[1]), ("z", v[2])]).eval(expr)
        };
        let h = 1e-5;
        let fd = (eval(&e, h).unwrap_or(f64::NAN) - eval(&e, -h).unwrap_or(f64::NAN)) / (2.0 * h);
        let sym = eval(&e.differentiate(m.coord(var)), 0.0).unwrap_or(f64::NAN);
        let err = (sym - fd).abs();
        if err.is_nan() || err > FD_TOL * sym.abs().max(1.0) {
            failed("finite differences", seed);
        }
    }
    Ok(())
}

fn scenario_files() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .expect("fixtures directory")
        .map(|e| e.expect("directory entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "scn"))
        .collect();
    files.sort();
    files
}

fn criterion_8(log: &mut Log) -> Outcome {
    let files = scenario_files();
    log.require(!files.is_empty(), "no scenario files");
    let sequential = Overrides { sequential: true, ..Overrides::default() };
    for path in files {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let runs: Vec<String> = [Overrides::default(), Overrides::default(), sequential.clone()]
            .iter()
            .filter_map(|o| match run_scenario(&path, o, &[], false) {
                Ok(r) => Some(r.to_json()),
                Err(e) => {
                    log.0.push(format!("{name}: {e}"));
                    None
                }
            })
            .collect();
        log.require(runs.len() == 3 && runs.windows(2).all(|w| w[0] == w[1]), format!("{name}: reports differ"));
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("L_theta pipeline and cocycle", criterion_1),
        ("pair groupoid is precontact and integrates L_theta", criterion_2),
        ("precontact to presymplectic correspondence", criterion_3),
        ("Poissonization of Jacobi pairs", criterion_4),
        ("central extension of a Dirac structure", criterion_5),
        ("action isomorphism and conformal coherence", criterion_6),
        ("calculus kernel identities", criterion_7),
        ("deterministic reports", criterion_8),
    ];
    let mut failures = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let mut log = Log(Vec::new());
        if let Err(e) = run(&mut log) {
            log.0.push(format!("error: {e}"));
        }
        if log.0.is_empty() {
            println!("PASS criterion {}: {title}", i + 1);
        } else {
            failures += 1;
            println!("FAIL criterion {}: {title}: {}", i + 1, log.0.join("; "));
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}

use nalgebra::DMatrix;

use super::{tuple_map, GroupoidModel, PrecontactData, PresymplecticData};
use crate::error::{Error, Result};
use crate::linalg::{null_space, vstack};
use crate::report::{CheckReport, Condition, Witness};
use crate::symcalc::{EvalError, Expr, Point, SamplingPolicy};
use crate::tensor::{
    exterior_derivative, lie_derivative, pullback, AlternatingTensor, Chart, DifferentialForm, SmoothMap,
};
use crate::verify::{require_zero, sample_into};

/// Where the kernel conditions are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelPoints {
    /// At unit points `eps(x)` only.
    #[default]
    Units,
    /// At units, and additionally at sampled points of `G` (reported as a separate condition).
    Everywhere,
}

fn require_maps_equal(cond: &mut Condition, a: &SmoothMap, b: &SmoothMap, policy: &SamplingPolicy, what: &str) -> Result<()> {
    a.source().ensure_same(b.source())?;
    a.target().ensure_same(b.target())?;
    for (i, (x, y)) in a.components().iter().zip(b.components()).enumerate() {
        let label = format!("{what}, component {}", a.target().coord(i));
        require_zero(cond, &(x - y), policy, &label);
    }
    Ok(())
}

fn require_form_zero(cond: &mut Condition, w: &DifferentialForm, policy: &SamplingPolicy, what: &str) {
    let names = w.chart().coord_names();
    for (idx, c) in w.terms() {
        let blade: Vec<String> = idx.iter().map(|&i| format!("d{}", names[i])).collect();
        let label = format!("{what}, coefficient of {}", blade.join("^"));
        require_zero(cond, &c, policy, &label);
    }
}

/// `g`, `h` (and `k`) as maps from a parametrization chart.
struct Locus {
    parts: Vec<SmoothMap>,
}

impl Locus {
    fn new(gm: &GroupoidModel, param: &SmoothMap, copies: usize) -> Result<Locus> {
        let parts = (1..=copies)
            .map(|k| gm.projection(k, copies)?.compose(param))
            .collect::<Result<Vec<_>>>()?;
        Ok(Locus { parts })
    }

    /// `m(parts[i], parts[j])` as a map from the parametrization chart.
    fn product(gm: &GroupoidModel, a: &SmoothMap, b: &SmoothMap) -> Result<SmoothMap> {
        let pair = tuple_map(a.source(), gm.pair_chart_of(), &[a, b])?;
        gm.mult().compose(&pair)
    }
}

/// Groupoid axioms at samples under `alpha(g) = beta(h)`.
pub fn check_groupoid(gm: &GroupoidModel, policy: &SamplingPolicy) -> Result<CheckReport> {
    let (a, b, e, inv) = (gm.alpha(), gm.beta(), gm.unit(), gm.inverse());
    let id_g = SmoothMap::identity(gm.total());
    let id_m = SmoothMap::identity(gm.base());

    let mut param = Condition::new("parametrization");
    let pairs = Locus::new(gm, gm.pairs(), 2)?;
    let (g, h) = (&pairs.parts[0], &pairs.parts[1]);
    require_maps_equal(&mut param, &a.compose(g)?, &b.compose(h)?, policy, "alpha(g) - beta(h) on the pair locus")?;
    let triples = gm.triples().map(|t| Locus::new(gm, t, 3)).transpose()?;
    if let Some(t) = &triples {
        let [g3, h3, k3] = [&t.parts[0], &t.parts[1], &t.parts[2]];
        require_maps_equal(&mut param, &a.compose(g3)?, &b.compose(h3)?, policy, "alpha(g) - beta(h) on the triple locus")?;
        require_maps_equal(&mut param, &a.compose(h3)?, &b.compose(k3)?, policy, "alpha(h) - beta(k) on the triple locus")?;
    }
    if !param.verdict.is_pass() {
        param.note("model error: the composable-locus parametrization violates its own constraint");
    }

    let mut units = Condition::new("units");
    require_maps_equal(&mut units, &a.compose(e)?, &id_m, policy, "alpha(eps(x)) - x")?;
    require_maps_equal(&mut units, &b.compose(e)?, &id_m, policy, "beta(eps(x)) - x")?;

    let mut ends = Condition::new("source and target of products");
    let gh = Locus::product(gm, g, h)?;
    require_maps_equal(&mut ends, &a.compose(&gh)?, &a.compose(h)?, policy, "alpha(gh) - alpha(h)")?;
    require_maps_equal(&mut ends, &b.compose(&gh)?, &b.compose(g)?, policy, "beta(gh) - beta(g)")?;

    let mut assoc = Condition::new("associativity");
    match &triples {
        Some(t) => {
            let [g3, h3, k3] = [&t.parts[0], &t.parts[1], &t.parts[2]];
            let left = Locus::product(gm, &Locus::product(gm, g3, h3)?, k3)?;
            let right = Locus::product(gm, g3, &Locus::product(gm, h3, k3)?)?;
            require_maps_equal(&mut assoc, &left, &right, policy, "(gh)k - g(hk)")?;
        }
        None => assoc.inconclusive("no parametrization of composable triples supplied"),
    }

    let mut unit_laws = Condition::new("unit laws");
    let left_unit = Locus::product(gm, &e.compose(b)?, &id_g)?;
    let right_unit = Locus::product(gm, &id_g, &e.compose(a)?)?;
    require_maps_equal(&mut unit_laws, &left_unit, &id_g, policy, "eps(beta(g)) g - g")?;
    require_maps_equal(&mut unit_laws, &right_unit, &id_g, policy, "g eps(alpha(g)) - g")?;

    let mut inversion = Condition::new("inversion");
    require_maps_equal(&mut inversion, &a.compose(inv)?, b, policy, "alpha(g^-1) - beta(g)")?;
    require_maps_equal(&mut inversion, &b.compose(inv)?, a, policy, "beta(g^-1) - alpha(g)")?;
    let g_ginv = Locus::product(gm, &id_g, inv)?;
    let ginv_g = Locus::product(gm, inv, &id_g)?;
    require_maps_equal(&mut inversion, &g_ginv, &e.compose(b)?, policy, "g g^-1 - eps(beta(g))")?;
    require_maps_equal(&mut inversion, &ginv_g, &e.compose(a)?, policy, "g^-1 g - eps(alpha(g))")?;

    Ok(CheckReport::new(vec![param, units, ends, assoc, unit_laws, inversion]))
}

fn multiplicativity_condition(gm: &GroupoidModel, sigma: &Expr, policy: &SamplingPolicy, name: &str) -> Result<Condition> {
    let mut cond = Condition::new(name);
    let pairs = Locus::new(gm, gm.pairs(), 2)?;
    let (g, h) = (&pairs.parts[0], &pairs.parts[1]);
    let gh = Locus::product(gm, g, h)?;
    let e = gh.pull_function(sigma) - g.pull_function(sigma) - h.pull_function(sigma);
    require_zero(&mut cond, &e, policy, "sigma(gh) - sigma(g) - sigma(h)");
    Ok(cond)
}

/// `sigma(gh) = sigma(g) + sigma(h)` on the composable locus.
pub fn check_multiplicative_function(gm: &GroupoidModel, sigma: &Expr, policy: &SamplingPolicy) -> Result<CheckReport> {
    Ok(CheckReport::single(multiplicativity_condition(gm, sigma, policy, "multiplicativity")?))
}

fn ensure_on(w: &DifferentialForm, chart: &Chart, degree: usize, what: &str) -> Result<()> {
    w.chart().ensure_same(chart)?;
    if w.degree() != degree {
        return Err(Error::Degree(format!("{what} must have degree {degree}, got {}", w.degree())));
    }
    Ok(())
}

fn fmt_vector(names: &[&str], v: &[f64]) -> String {
    let terms: Vec<String> = names
        .iter()
        .zip(v)
        .filter(|(_, x)| x.abs() > 1e-9)
        .map(|(c, x)| format!("{x:.3} d/d{c}"))
        .collect();
    terms.join(" + ")
}

/// Joint null space of the stacked functionals at units (and optionally elsewhere).
fn kernel_conditions<F>(gm: &GroupoidModel, policy: &SamplingPolicy, points: KernelPoints, stream: u64, rows: F) -> Result<Vec<Condition>>
where
    F: Fn(&Point) -> std::result::Result<DMatrix<f64>, EvalError> + Sync + Send,
{
    let names = gm.total().coord_names();
    let record = |cond: &mut Condition, samples: Vec<(Point, DMatrix<f64>)>| {
        for (p, ker) in samples {
            let k = ker.ncols();
            cond.residuals.push(k as f64);
            if k > 0 {
                let v: Vec<f64> = ker.column(0).iter().cloned().collect();
                cond.fail_with(Witness::new(
                    format!("kernel intersection has dimension {k}, contains {}", fmt_vector(&names, &v)),
                    &p,
                    k as f64,
                ));
            }
        }
    };

    let mut at_units = Condition::new("non-degeneracy");
    let unit = gm.unit();
    let samples = sample_into(&mut at_units, policy, gm.base().coords(), stream, |x| {
        let u = unit.apply(x)?;
        Ok(null_space(&rows(&u)?, policy.rank_tol))
    });
    record(&mut at_units, samples);
    let mut out = vec![at_units];

    if points == KernelPoints::Everywhere {
        let mut all = Condition::new("non-degeneracy (all points)");
        let samples = sample_into(&mut all, policy, gm.total().coords(), stream + 1, |g| {
            Ok(null_space(&rows(g)?, policy.rank_tol))
        });
        record(&mut all, samples);
        out.push(all);
    }
    Ok(out)
}

fn anchor_rows(gm: &GroupoidModel, g: &Point) -> std::result::Result<DMatrix<f64>, EvalError> {
    Ok(vstack(&gm.alpha().jacobian_at(g)?, &gm.beta().jacobian_at(g)?))
}

pub fn check_precontact(gm: &GroupoidModel, pd: &PrecontactData, policy: &SamplingPolicy) -> Result<CheckReport> {
    check_precontact_with(gm, pd, policy, KernelPoints::Units)
}

/// Multiplicativity of `sigma`, the pullback identity `m^* eta = pr1^* eta + pr1^*(e^sigma) pr2^* eta`
/// on the composable locus, and triviality of `ker d eta ^ ker eta ^ ker d alpha ^ ker d beta`.
pub fn check_precontact_with(gm: &GroupoidModel, pd: &PrecontactData, policy: &SamplingPolicy, points: KernelPoints) -> Result<CheckReport> {
    let (n, dim) = (gm.base().dim(), gm.total().dim());
    if dim != 2 * n + 1 {
        return Err(Error::Model(format!(
            "a precontact groupoid needs dim G = 2 dim M + 1, got {dim} over {n}"
        )));
    }
    ensure_on(&pd.eta, gm.total(), 1, "eta")?;
    if let Some(s) = pd.sigma.free_symbols().iter().find(|s| gm.total().index_of(s).is_none()) {
        return Err(Error::UnknownSymbol(s.to_string()));
    }

    let sigma_mult = multiplicativity_condition(gm, &pd.sigma, policy, "sigma multiplicative")?;

    let mut mult = Condition::new("multiplicativity");
    let (pr1, pr2) = (gm.projection(1, 2)?, gm.projection(2, 2)?);
    let e_sigma = pr1.pull_function(&pd.sigma).exp();
    let defect = pullback(gm.mult(), &pd.eta)?
        .sub(&pullback(&pr1, &pd.eta)?)?
        .sub(&pullback(&pr2, &pd.eta)?.scale(&e_sigma))?;
    require_form_zero(&mut mult, &pullback(gm.pairs(), &defect)?, policy, "m^*eta - pr1^*eta - e^sigma pr2^*eta");

    let deta = exterior_derivative(&pd.eta);
    let kernels = kernel_conditions(gm, policy, points, 0x41, |g| {
        let omega = deta.eval_matrix(g)?.transpose();
        let eta = DMatrix::from_row_slice(1, dim, &pd.eta.eval_components(g)?);
        Ok(vstack(&vstack(&omega, &eta), &anchor_rows(gm, g)?))
    })?;

    let mut conds = vec![sigma_mult, mult];
    conds.extend(kernels);
    Ok(CheckReport::new(conds))
}

pub fn check_presymplectic(gm: &GroupoidModel, ps: &PresymplecticData, policy: &SamplingPolicy) -> Result<CheckReport> {
    check_presymplectic_with(gm, ps, policy, KernelPoints::Units)
}

/// Closedness, `m^* omega = pr1^* omega + pr2^* omega`, triviality of
/// `ker omega ^ ker d alpha ^ ker d beta`, and `L_Z omega = omega` when `Z` is given.
pub fn check_presymplectic_with(gm: &GroupoidModel, ps: &PresymplecticData, policy: &SamplingPolicy, points: KernelPoints) -> Result<CheckReport> {
    let (n, dim) = (gm.base().dim(), gm.total().dim());
    if dim != 2 * n {
        return Err(Error::Model(format!(
            "a presymplectic groupoid needs dim G = 2 dim M, got {dim} over {n}"
        )));
    }
    ensure_on(&ps.omega, gm.total(), 2, "omega")?;

    let mut closed = Condition::new("closed");
    require_form_zero(&mut closed, &exterior_derivative(&ps.omega), policy, "d omega");

    let mut mult = Condition::new("multiplicativity");
    let (pr1, pr2) = (gm.projection(1, 2)?, gm.projection(2, 2)?);
    let defect = pullback(gm.mult(), &ps.omega)?
        .sub(&pullback(&pr1, &ps.omega)?)?
        .sub(&pullback(&pr2, &ps.omega)?)?;
    require_form_zero(&mut mult, &pullback(gm.pairs(), &defect)?, policy, "m^*omega - pr1^*omega - pr2^*omega");

    let kernels = kernel_conditions(gm, policy, points, 0x43, |g| {
        Ok(vstack(&ps.omega.eval_matrix(g)?.transpose(), &anchor_rows(gm, g)?))
    })?;

    let mut conds = vec![closed, mult];
    conds.extend(kernels);
    if let Some(z) = &ps.z {
        z.chart().ensure_same(gm.total())?;
        let mut hom = Condition::new("homogeneity");
        require_form_zero(&mut hom, &lie_derivative(z, &ps.omega)?.sub(&ps.omega)?, policy, "L_Z omega - omega");
        conds.push(hom);
    }
    Ok(CheckReport::new(conds))
}

use super::checks::check_multiplicative_function;
use super::{Composability, Extension, GroupoidModel, PrecontactData, PresymplecticData};
use crate::error::{Error, Result};
use crate::report::{CheckReport, Condition, Witness};
use crate::structures::ConformalFactor;
use crate::symcalc::{is_zero, Expr, SamplingPolicy, ZeroVerdict};
use crate::tensor::{
    exterior_derivative, interior_product, lie_derivative, wedge, AlternatingTensor, Chart, DifferentialForm,
    SmoothMap, VectorField,
};
use crate::verify::sample_into;

fn first_failure(r: &CheckReport) -> String {
    r.conditions
        .iter()
        .flat_map(|c| c.witnesses.iter().map(|w| format!("{} at {:?}", w.label, w.point)).chain(c.notes.iter().cloned()))
        .next()
        .unwrap_or_else(|| format!("{:?}", r.verdict))
}

fn with_extra(m: &SmoothMap, source: &Chart, target: &Chart, extra: &[Expr]) -> Result<SmoothMap> {
    let mut comps = m.components().to_vec();
    comps.extend(extra.iter().cloned());
    SmoothMap::new(source, target, comps)
}

/// The action groupoid `G x_sigma R` over `M x R`:
///
/// ```text
/// alpha(g, s) = (alpha(g), sigma(g) + s)    beta(g, s) = (beta(g), s)
/// eps(x, s)   = (eps(x), s)                 inv(g, s)  = (inv(g), sigma(g) + s)
/// m((g, s), (h, sigma(g) + s)) = (gh, s)
/// ```
pub fn build_action_groupoid(gm: &GroupoidModel, sigma: &Expr, policy: &SamplingPolicy) -> Result<GroupoidModel> {
    let report = check_multiplicative_function(gm, sigma, policy)?;
    if !report.passed() {
        return Err(Error::NotMultiplicative(first_failure(&report)));
    }

    let mut charts: Vec<&Chart> = vec![gm.total(), gm.base(), gm.pairs().source()];
    charts.extend(gm.triples().map(|t| t.source()));
    charts.extend(gm.fibers().map(|f| f.source()));
    let mut s = "s".to_string();
    while charts.iter().any(|c| c.index_of(&s).is_some()) {
        s.push('_');
    }
    let sv = Expr::coord(&s);

    let g = gm.total().extend(&format!("{}xR", gm.total().name()), &[&s])?;
    let m = gm.base().extend(&format!("{}xR", gm.base().name()), &[&s])?;
    let g2 = GroupoidModel::pair_chart(&g)?;
    let n = gm.total().dim();

    let alpha = with_extra(gm.alpha(), &g, &m, &[sigma + &sv])?;
    let beta = with_extra(gm.beta(), &g, &m, std::slice::from_ref(&sv))?;
    let unit = with_extra(gm.unit(), &m, &g, std::slice::from_ref(&sv))?;
    let inverse = with_extra(gm.inverse(), &g, &g, &[sigma + &sv])?;
    let mult = with_extra(gm.mult(), &g2, &g, &[Expr::coord(&format!("{s}_1"))])?;

    // Interleave the R coordinate after each copy of G, accumulating sigma along the chain.
    let lift = |param: &SmoothMap, copies: usize| -> Result<SmoothMap> {
        let src = param.source().extend(&format!("{}xR", param.source().name()), &[&s])?;
        let mut comps = Vec::with_capacity(copies * (n + 1));
        let mut acc = sv.clone();
        for k in 0..copies {
            let part = &param.components()[k * n..(k + 1) * n];
            comps.extend(part.iter().cloned());
            comps.push(acc.clone());
            let at = |name: &str| gm.total().index_of(name).map(|i| part[i].clone());
            acc = acc + sigma.substitute(&at);
        }
        let tgt = super::copies_chart(&g, copies)?;
        SmoothMap::new(&src, &tgt, comps)
    };
    let pairs = lift(gm.pairs(), 2)?;

    let mut model = GroupoidModel::new(
        &format!("{}xR", gm.name()),
        Composability::AlphaBeta,
        alpha,
        beta,
        unit,
        inverse,
        mult,
        pairs,
    )?;
    if let Some(t) = gm.triples() {
        model = model.with_triples(lift(t, 3)?)?;
    }
    if let Some(f) = gm.fibers() {
        let k = gm.base().dim();
        let src = f.source();
        let mut coords: Vec<&str> = src.coord_names()[..k].to_vec();
        coords.push(&s);
        coords.extend(src.coord_names()[k..].iter());
        let fs = Chart::new(&format!("{}xR", src.name()), &coords)?;
        model = model.with_fibers(with_extra(f, &fs, &g, std::slice::from_ref(&sv))?)?;
    }
    model.convention = gm.convention;
    model.extension = Some(Extension {
        coord: s,
        base_total: gm.total().clone(),
        base_base: gm.base().clone(),
        sigma: sigma.clone(),
    });
    Ok(model)
}

fn extension(action: &GroupoidModel) -> Result<(&Extension, usize)> {
    let ext = action
        .extension()
        .ok_or_else(|| Error::Model(format!("`{}` is not an action groupoid G x_sigma R", action.name())))?;
    let i = action.total().index_of(&ext.coord).expect("the extension coordinate belongs to the total chart");
    Ok((ext, i))
}

/// `omega = d(e^s eta)` on `G x_sigma R`, with `Z = d/ds`.
pub fn eta_to_omega(action: &GroupoidModel, pd: &PrecontactData) -> Result<PresymplecticData> {
    let (ext, i) = extension(action)?;
    pd.eta.chart().ensure_same(&ext.base_total)?;
    let eta = pd.eta.embed(action.total())?;
    let omega = exterior_derivative(&eta.scale(&Expr::coord(&ext.coord).exp()));
    Ok(PresymplecticData {
        omega,
        z: Some(VectorField::partial(action.total(), i)),
    })
}

fn zero_or<F: FnOnce(String) -> Error>(e: &Expr, policy: &SamplingPolicy, err: F, what: &str) -> Result<()> {
    match is_zero(e, policy) {
        v if v.holds() => Ok(()),
        ZeroVerdict::NonZero { witness } => Err(err(format!("{what} is nonzero at {:?}", witness.point))),
        _ => Err(err(format!("{what} could not be decided"))),
    }
}

/// Inverse of [`eta_to_omega`]: `eta = e^{-s} i_{d/ds} omega`, read at `s = 0`.
///
/// Fails unless `L_{d/ds} omega = omega` and the result is independent of `s`.
pub fn omega_to_eta(action: &GroupoidModel, ps: &PresymplecticData, policy: &SamplingPolicy) -> Result<PrecontactData> {
    let (ext, i) = extension(action)?;
    let chart = action.total();
    ps.omega.chart().ensure_same(chart)?;
    if ps.omega.degree() != 2 {
        return Err(Error::Degree("omega must be a 2-form".into()));
    }
    let z = VectorField::partial(chart, i);
    let names = chart.coord_names();
    for (idx, c) in lie_derivative(&z, &ps.omega)?.sub(&ps.omega)?.terms() {
        let what = format!("coefficient d{}^d{} of L_Z omega - omega", names[idx[0]], names[idx[1]]);
        zero_or(&c, policy, Error::NotHomogeneous, &what)?;
    }

    let s = Expr::coord(&ext.coord);
    let eta_s = interior_product(&z, &ps.omega)?.scale(&(-&s).exp());
    zero_or(&eta_s.coeff(&[i]), policy, Error::NotHomogeneous, "the ds component of i_Z omega")?;
    let at_zero = |name: &str| (name == ext.coord).then(Expr::zero);
    let comps = ext
        .base_total
        .coord_names()
        .iter()
        .map(|c| {
            let coeff = eta_s.coeff(&[chart.index_of(c).expect("base coordinates embed")]);
            zero_or(&coeff.differentiate(&ext.coord), policy, Error::NotHomogeneous, &format!("d/ds of the d{c} component"))?;
            Ok(coeff.substitute(&at_zero))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PrecontactData {
        eta: DifferentialForm::from_components(&ext.base_total, comps)?,
        sigma: ext.sigma.clone(),
    })
}

/// `eta' = (phi o beta) eta`, `sigma' = sigma + ln(phi o beta / phi o alpha)`.
///
/// This is the form under which `(eta', sigma')` stays precontact with
/// composability `alpha(g) = beta(h)` and integrates the conformal change by `phi`.
pub fn equivalence_transform(gm: &GroupoidModel, pd: &PrecontactData, phi: &ConformalFactor, policy: &SamplingPolicy) -> Result<PrecontactData> {
    phi.chart().ensure_same(gm.base())?;
    phi.check_nonvanishing(policy)?;
    let at_beta = gm.beta().pull_function(phi.phi());
    let at_alpha = gm.alpha().pull_function(phi.phi());
    let sigma = if phi.phi().free_symbols().is_empty() {
        pd.sigma.clone()
    } else {
        &pd.sigma + (&at_beta / &at_alpha).ln()
    };
    Ok(PrecontactData {
        eta: pd.eta.scale(&at_beta),
        sigma,
    })
}

/// `eta ^ (d eta)^n` nowhere zero at sampled points of `G`.
pub fn check_contact_form(gm: &GroupoidModel, pd: &PrecontactData, policy: &SamplingPolicy) -> Result<CheckReport> {
    pd.eta.chart().ensure_same(gm.total())?;
    let dim = gm.total().dim();
    if dim.is_multiple_of(2) {
        return Err(Error::Model("contact forms live in odd dimension".into()));
    }
    let deta = exterior_derivative(&pd.eta);
    let mut top = pd.eta.clone();
    for _ in 0..dim / 2 {
        top = wedge(&top, &deta)?;
    }
    let c = top.coeff(&(0..dim).collect::<Vec<_>>());
    let mut cond = Condition::new("contact");
    let samples = sample_into(&mut cond, policy, gm.total().coords(), 0x45, |p| p.eval(&c));
    for (p, v) in &samples {
        if v.abs() <= policy.tol_abs {
            cond.fail_with(Witness::new("eta ^ (d eta)^n vanishes", p, *v));
        }
    }
    Ok(CheckReport::single(cond))
}

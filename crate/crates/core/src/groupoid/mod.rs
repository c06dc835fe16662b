//! Explicit Lie-groupoid models, precontact and presymplectic groupoid
//! structures, the action groupoid `G x_sigma R` and the extraction of the
//! Dirac-Jacobi structure on the base.
//!
//! Multiplication `m(g, h)` is defined when `alpha(g) = beta(h)`. The
//! composable locus is never solved for: every model carries an explicit
//! parametrization `K -> G2` of it, and optionally of the triple-composable
//! locus and of the beta-fibers.

mod checks;
mod correspond;
mod extract;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symcalc::Expr;
use crate::tensor::{AlternatingTensor, Chart, DifferentialForm, SmoothMap, VectorField};

pub use checks::{
    check_groupoid, check_multiplicative_function, check_precontact, check_precontact_with,
    check_presymplectic, check_presymplectic_with, KernelPoints,
};
pub use correspond::{
    build_action_groupoid, check_contact_form, equivalence_transform, eta_to_omega, omega_to_eta,
};
pub use extract::{check_beta_forward, extract_lm, ExtractedFibers, FIBER_SAMPLES};

/// Which endpoints must agree for `m(g, h)` to be defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Composability {
    /// `alpha(g) = beta(h)`.
    #[default]
    AlphaBeta,
    /// `beta(g) = alpha(h)`; the two maps are swapped on construction.
    BetaAlpha,
}

/// Data recorded by [`build_action_groupoid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    /// The appended `R` coordinate, on both the total and the base chart.
    pub coord: String,
    pub base_total: Chart,
    pub base_base: Chart,
    pub sigma: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupoidModel {
    name: String,
    total: Chart,
    base: Chart,
    alpha: SmoothMap,
    beta: SmoothMap,
    unit: SmoothMap,
    inverse: SmoothMap,
    mult: SmoothMap,
    pairs: SmoothMap,
    triples: Option<SmoothMap>,
    fibers: Option<SmoothMap>,
    convention: Composability,
    extension: Option<Extension>,
}

/// `(eta, sigma)` on the total chart.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecontactData {
    pub eta: DifferentialForm,
    pub sigma: Expr,
}

/// `omega` on the total chart, with an optional homogeneity field.
#[derive(Debug, Clone, PartialEq)]
pub struct PresymplecticData {
    pub omega: DifferentialForm,
    pub z: Option<VectorField>,
}

/// `k` copies of `g` with coordinates `c_1, ..., c_k`.
fn copies_chart(g: &Chart, k: usize) -> Result<Chart> {
    let mut coords = Vec::with_capacity(k * g.dim());
    for i in 1..=k {
        coords.extend(g.coord_names().iter().map(|c| format!("{c}_{i}")));
    }
    Chart::new(&format!("{}{k}", g.name()), &coords)
}

fn check_map(m: &SmoothMap, source: &Chart, target: &Chart, what: &str) -> Result<()> {
    if m.source() != source || m.target() != target {
        return Err(Error::Model(format!(
            "{what} must map `{}` to `{}`, got `{}` to `{}`",
            source.name(),
            target.name(),
            m.source().name(),
            m.target().name()
        )));
    }
    Ok(())
}

impl GroupoidModel {
    /// Chart of pairs `(g, h)`, coordinates `c_1` then `c_2`.
    pub fn pair_chart(g: &Chart) -> Result<Chart> {
        copies_chart(g, 2)
    }

    pub fn triple_chart(g: &Chart) -> Result<Chart> {
        copies_chart(g, 3)
    }

    /// Assembles and validates a model.
    ///
    /// `mult` is a map from [`GroupoidModel::pair_chart`] to `G`, and `pairs`
    /// parametrizes the composable locus inside the pair chart.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &str,
        convention: Composability,
        alpha: SmoothMap,
        beta: SmoothMap,
        unit: SmoothMap,
        inverse: SmoothMap,
        mult: SmoothMap,
        pairs: SmoothMap,
    ) -> Result<GroupoidModel> {
        let (alpha, beta) = match convention {
            Composability::AlphaBeta => (alpha, beta),
            Composability::BetaAlpha => (beta, alpha),
        };
        let total = alpha.source().clone();
        let base = alpha.target().clone();
        check_map(&beta, &total, &base, "beta")?;
        check_map(&unit, &base, &total, "the unit map")?;
        check_map(&inverse, &total, &total, "the inversion")?;
        let g2 = Self::pair_chart(&total)?;
        check_map(&mult, &g2, &total, "the multiplication")?;
        if pairs.target() != &g2 {
            return Err(Error::Model(format!(
                "the composable-pair parametrization must land in `{}`",
                g2.name()
            )));
        }
        Ok(GroupoidModel {
            name: name.to_string(),
            total,
            base,
            alpha,
            beta,
            unit,
            inverse,
            mult,
            pairs,
            triples: None,
            fibers: None,
            convention,
            extension: None,
        })
    }

    /// Adds a parametrization of composable triples, used for associativity.
    pub fn with_triples(mut self, triples: SmoothMap) -> Result<GroupoidModel> {
        let g3 = Self::triple_chart(&self.total)?;
        if triples.target() != &g3 {
            return Err(Error::Model(format!("the triple parametrization must land in `{}`", g3.name())));
        }
        self.triples = Some(triples);
        Ok(self)
    }

    /// Adds a parametrization of the beta-fibers.
    ///
    /// The source chart starts with the base coordinates `y`, followed by
    /// fiber parameters, and `beta(fibers(y, p)) = y` must hold.
    pub fn with_fibers(mut self, fibers: SmoothMap) -> Result<GroupoidModel> {
        if fibers.target() != &self.total {
            return Err(Error::Model("the fiber parametrization must land in the total chart".into()));
        }
        let src = fibers.source();
        let n = self.base.dim();
        if src.dim() < n || src.coords()[..n] != *self.base.coords() {
            return Err(Error::Model(
                "the fiber parametrization must start with the base coordinates".into(),
            ));
        }
        self.fibers = Some(fibers);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn total(&self) -> &Chart {
        &self.total
    }

    pub fn base(&self) -> &Chart {
        &self.base
    }

    pub fn alpha(&self) -> &SmoothMap {
        &self.alpha
    }

    pub fn beta(&self) -> &SmoothMap {
        &self.beta
    }

    pub fn unit(&self) -> &SmoothMap {
        &self.unit
    }

    pub fn inverse(&self) -> &SmoothMap {
        &self.inverse
    }

    pub fn mult(&self) -> &SmoothMap {
        &self.mult
    }

    pub fn pairs(&self) -> &SmoothMap {
        &self.pairs
    }

    pub fn triples(&self) -> Option<&SmoothMap> {
        self.triples.as_ref()
    }

    pub fn fibers(&self) -> Option<&SmoothMap> {
        self.fibers.as_ref()
    }

    pub fn convention(&self) -> Composability {
        self.convention
    }

    pub fn extension(&self) -> Option<&Extension> {
        self.extension.as_ref()
    }

    pub fn pair_chart_of(&self) -> &Chart {
        self.mult.source()
    }

    /// `pr_k` from the chart of `copies`-tuples to `G`.
    pub(crate) fn projection(&self, k: usize, copies: usize) -> Result<SmoothMap> {
        let src = copies_chart(&self.total, copies)?;
        let comps = self
            .total
            .coord_names()
            .iter()
            .map(|c| Expr::coord(&format!("{c}_{k}")))
            .collect();
        SmoothMap::new(&src, &self.total, comps)
    }
}

/// `(f_1, ..., f_k)` into `target`, whose coordinates are the concatenation of the parts' targets.
pub(crate) fn tuple_map(source: &Chart, target: &Chart, parts: &[&SmoothMap]) -> Result<SmoothMap> {
    let mut comps = Vec::with_capacity(target.dim());
    for p in parts {
        source.ensure_same(p.source())?;
        comps.extend(p.components().iter().cloned());
    }
    SmoothMap::new(source, target, comps)
}

fn coord_map(source: &Chart, target: &Chart, names: &[String]) -> Result<SmoothMap> {
    SmoothMap::new(source, target, names.iter().map(|c| Expr::coord(c)).collect())
}

fn renamed(m: &Chart, suffix: &str) -> Vec<String> {
    m.coord_names().iter().map(|c| format!("{c}{suffix}")).collect()
}

/// The pair groupoid `M x M`: `alpha(x, y) = y`, `beta(x, y) = x`, `m((x, y), (y, z)) = (x, z)`.
///
/// Coordinates of `G` are `c1, c2` for each base coordinate `c`.
pub fn pair_groupoid(m: &Chart) -> Result<GroupoidModel> {
    pair_model(m, false)
}

/// `M x M x R` with `m((x, y, t), (y, z, s)) = (x, z, t + s)`.
pub fn pair_groupoid_with_line(m: &Chart) -> Result<GroupoidModel> {
    pair_model(m, true)
}

fn pair_model(m: &Chart, line: bool) -> Result<GroupoidModel> {
    let c1 = renamed(m, "1");
    let c2 = renamed(m, "2");
    let mut coords: Vec<String> = c1.iter().chain(&c2).cloned().collect();
    let probe = Chart::new("probe", &coords)?;
    let t = probe.fresh_name("t");
    if line {
        coords.push(t.clone());
    }
    let name = if line { format!("{}^2xR", m.name()) } else { format!("{}^2", m.name()) };
    let g = Chart::new(&name, &coords)?;
    let n = m.dim();

    let alpha = coord_map(&g, m, &c2)?;
    let beta = coord_map(&g, m, &c1)?;
    let mut unit: Vec<Expr> = m.coord_names().iter().chain(m.coord_names().iter()).map(|c| Expr::coord(c)).collect();
    let mut inverse: Vec<Expr> = c2.iter().chain(&c1).map(|c| Expr::coord(c)).collect();
    let g2 = GroupoidModel::pair_chart(&g)?;
    let mut mult: Vec<Expr> = c1
        .iter()
        .map(|c| Expr::coord(&format!("{c}_1")))
        .chain(c2.iter().map(|c| Expr::coord(&format!("{c}_2"))))
        .collect();
    let c3 = renamed(m, "3");
    let c4 = renamed(m, "4");
    let lines: Vec<String> = (1..=3).map(|i| format!("{t}{i}")).collect();
    let mut k: Vec<String> = c1.iter().chain(&c2).chain(&c3).cloned().collect();
    let mut k3: Vec<String> = c1.iter().chain(&c2).chain(&c3).chain(&c4).cloned().collect();
    if line {
        unit.push(Expr::zero());
        inverse.push(-Expr::coord(&t));
        mult.push(Expr::coord(&format!("{t}_1")) + Expr::coord(&format!("{t}_2")));
        k.extend(lines[..2].iter().cloned());
        k3.extend(lines.iter().cloned());
    }
    let kc = Chart::new(&format!("{}_pairs", g.name()), &k)?;
    let k3c = Chart::new(&format!("{}_triples", g.name()), &k3)?;
    let arrow = |a: &[String], b: &[String], s: Option<&String>| -> Vec<Expr> {
        let mut v: Vec<Expr> = a.iter().chain(b).map(|c| Expr::coord(c)).collect();
        if let Some(s) = s {
            v.push(Expr::coord(s));
        }
        v
    };
    let lt = |i: usize| if line { Some(&lines[i]) } else { None };
    let pairs: Vec<Expr> = [arrow(&c1, &c2, lt(0)), arrow(&c2, &c3, lt(1))].concat();
    let triples: Vec<Expr> = [arrow(&c1, &c2, lt(0)), arrow(&c2, &c3, lt(1)), arrow(&c3, &c4, lt(2))].concat();

    // beta-fibre over y: (y, p[, t]) with free p.
    let mut fc: Vec<String> = m.coord_names().iter().map(|c| c.to_string()).collect();
    fc.extend(c2.iter().cloned());
    let mut fib: Vec<Expr> = fc.iter().map(|c| Expr::coord(c)).collect();
    if line {
        fc.push(t.clone());
        fib.push(Expr::coord(&t));
    }
    let fchart = Chart::new(&format!("{}_fibers", g.name()), &fc)?;
    debug_assert_eq!(fib.len(), 2 * n + usize::from(line));

    GroupoidModel::new(
        &name,
        Composability::AlphaBeta,
        alpha,
        beta,
        SmoothMap::new(m, &g, unit)?,
        SmoothMap::new(&g, &g, inverse)?,
        SmoothMap::new(&g2, &g, mult)?,
        SmoothMap::new(&kc, &g2, pairs)?,
    )?
    .with_triples(SmoothMap::new(&k3c, &GroupoidModel::triple_chart(&g)?, triples)?)?
    .with_fibers(SmoothMap::new(&fchart, &g, fib)?)
}

/// The precontact groupoid of a 1-form `theta` on `M`: `G = M x M x R`,
/// `sigma = t` and `eta = beta^* theta - e^t alpha^* theta`.
pub fn pair_theta_model(theta: &DifferentialForm) -> Result<(GroupoidModel, PrecontactData)> {
    if theta.degree() != 1 {
        return Err(Error::Degree("theta must be a 1-form".into()));
    }
    let gm = pair_groupoid_with_line(theta.chart())?;
    let t = Expr::coord(gm.total().coord(gm.total().dim() - 1));
    let eta = crate::tensor::pullback(gm.beta(), theta)?
        .sub(&crate::tensor::pullback(gm.alpha(), theta)?.scale(&t.exp()))?;
    Ok((gm, PrecontactData { eta, sigma: t }))
}

/// The trivial vector-group bundle `T*M = M x R^n` over `M`, fiber coordinates `p_c`:
/// `alpha = beta = x`, `m((x, p), (x, q)) = (x, p + q)`.
pub fn cotangent_group_bundle(m: &Chart) -> Result<GroupoidModel> {
    let n = m.dim();
    let xs: Vec<String> = m.coord_names().iter().map(|c| c.to_string()).collect();
    let ps: Vec<String> = xs.iter().map(|c| format!("p{c}")).collect();
    let g = Chart::new(&format!("T*{}", m.name()), &[xs.clone(), ps.clone()].concat())?;
    let proj = coord_map(&g, m, &xs)?;
    let unit: Vec<Expr> = xs.iter().map(|c| Expr::coord(c)).chain((0..n).map(|_| Expr::zero())).collect();
    let inverse: Vec<Expr> = xs.iter().map(|c| Expr::coord(c)).chain(ps.iter().map(|p| -Expr::coord(p))).collect();
    let g2 = GroupoidModel::pair_chart(&g)?;
    let mult: Vec<Expr> = xs
        .iter()
        .map(|c| Expr::coord(&format!("{c}_1")))
        .chain(ps.iter().map(|p| Expr::coord(&format!("{p}_1")) + Expr::coord(&format!("{p}_2"))))
        .collect();
    let qs: Vec<String> = xs.iter().map(|c| format!("q{c}")).collect();
    let rs: Vec<String> = xs.iter().map(|c| format!("r{c}")).collect();
    let kc = Chart::new("T*pairs", &[xs.clone(), ps.clone(), qs.clone()].concat())?;
    let k3c = Chart::new("T*triples", &[xs.clone(), ps.clone(), qs.clone(), rs.clone()].concat())?;
    let point = |fib: &[String]| -> Vec<Expr> { xs.iter().chain(fib).map(|c| Expr::coord(c)).collect() };
    let pairs = [point(&ps), point(&qs)].concat();
    let triples = [point(&ps), point(&qs), point(&rs)].concat();
    let fchart = Chart::new("T*fibers", &[xs.clone(), ps.clone()].concat())?;
    let fib = point(&ps);
    GroupoidModel::new(
        &format!("T*{}", m.name()),
        Composability::AlphaBeta,
        proj.clone(),
        proj,
        SmoothMap::new(m, &g, unit)?,
        SmoothMap::new(&g, &g, inverse)?,
        SmoothMap::new(&g2, &g, mult)?,
        SmoothMap::new(&kc, &g2, pairs)?,
    )?
    .with_triples(SmoothMap::new(&k3c, &GroupoidModel::triple_chart(&g)?, triples)?)?
    .with_fibers(SmoothMap::new(&fchart, &g, fib)?)
}

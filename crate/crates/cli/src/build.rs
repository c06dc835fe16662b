//! Validation: resolve every declaration of a scenario into library objects
//! and every check into an executable [`Task`], collecting all problems.

use std::collections::{BTreeMap, HashMap};

use dirac_jacobi::algebroid::IsoMap;
use dirac_jacobi::courant::SectionE1;
use dirac_jacobi::groupoid::{
    build_action_groupoid, cotangent_group_bundle, equivalence_transform, eta_to_omega, pair_groupoid,
    pair_groupoid_with_line, pair_theta_model, Composability, GroupoidModel, KernelPoints, PrecontactData,
    PresymplecticData,
};
use dirac_jacobi::structures::{
    conformal_change, construct_l_jacobi, construct_l_theta, graph_of_bivector, graph_of_two_form,
    induced_dirac_on_mxr, induced_dirac_with_coord, lift_dirac, ConformalFactor, FrameSubbundle,
};
use dirac_jacobi::symcalc::{Expr, SamplingPolicy};
use dirac_jacobi::tensor::{AlternatingTensor, Chart, DifferentialForm, Multivector, SmoothMap, VectorField};

use crate::scenario::{CheckDecl, GroupoidDecl, ParamDecl, Scenario, StructureDecl, TensorDecl};

/// A blade index list and its coefficient.
type Blade = (Vec<usize>, Expr);

/// Command-line overrides of the scenario's sampling section.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Pass,
    Fail,
    Inconclusive,
    Error,
}

/// A precontact or presymplectic groupoid, or a bare model.
#[derive(Debug, Clone)]
pub struct GroupoidEntry {
    pub model: GroupoidModel,
    pub precontact: Option<PrecontactData>,
    pub presymplectic: Option<PresymplecticData>,
}

#[derive(Debug, Clone)]
pub enum CochainSource {
    OmegaL0,
    Table(Vec<Vec<Expr>>),
}

#[derive(Debug, Clone)]
pub enum Task {
    Zero(Expr),
    Isotropy(FrameSubbundle),
    Involutivity(FrameSubbundle),
    Dirac(FrameSubbundle),
    Same(FrameSubbundle, FrameSubbundle),
    Identical(FrameSubbundle, FrameSubbundle),
    Forward(SmoothMap, FrameSubbundle, FrameSubbundle),
    Anti(SmoothMap, FrameSubbundle, FrameSubbundle),
    Mu(ConformalFactor),
    Nonvanishing(ConformalFactor),
    Cocycle(FrameSubbundle, Option<Vec<Expr>>),
    CocycleExact(FrameSubbundle, Vec<Expr>),
    Closed(FrameSubbundle, CochainSource),
    CentralExtension(FrameSubbundle),
    ActionIso(FrameSubbundle, IsoMap),
    AnchorMorphism(FrameSubbundle),
    JacobiIdentity(FrameSubbundle),
    Groupoid(GroupoidModel),
    Multiplicative(GroupoidModel, Expr),
    Precontact(GroupoidModel, PrecontactData, KernelPoints),
    Presymplectic(GroupoidModel, PresymplecticData, KernelPoints),
    RoundTrip(GroupoidModel, PrecontactData),
    Homogeneous(GroupoidModel, PresymplecticData),
    Extract(GroupoidModel, PrecontactData, Option<FrameSubbundle>),
    BetaForward(GroupoidModel, PrecontactData),
    Contact(GroupoidModel, PrecontactData),
}

#[derive(Debug, Clone)]
pub struct PlannedCheck {
    pub name: String,
    pub op: String,
    pub expect: Expect,
    pub condition: Option<String>,
    pub task: Task,
}

#[derive(Debug, Clone)]
pub struct Plan {
    pub name: String,
    pub policy: SamplingPolicy,
    pub checks: Vec<PlannedCheck>,
}

/// Operation names with their required and optional check arguments.
pub const OPERATIONS: &[(&str, &[&str], &[&str])] = &[
    ("zero", &["chart", "expr"], &[]),
    ("isotropy", &["structure"], &[]),
    ("involutivity", &["structure"], &[]),
    ("dirac", &["structure"], &[]),
    ("same", &["structure", "other"], &[]),
    ("identical", &["structure", "other"], &[]),
    ("forward", &["map", "source", "target"], &[]),
    ("anti", &["map", "source", "target"], &[]),
    ("mu", &["chart", "phi"], &[]),
    ("nonvanishing", &["chart", "phi"], &[]),
    ("cocycle", &["structure"], &["values"]),
    ("cocycle-exact", &["structure", "values"], &[]),
    ("closed", &["structure"], &["cochain", "table"]),
    ("central-extension", &["structure"], &[]),
    ("action-iso", &["structure"], &["iso"]),
    ("anchor-morphism", &["structure"], &[]),
    ("jacobi-identity", &["structure"], &[]),
    ("groupoid", &["groupoid"], &[]),
    ("multiplicative", &["groupoid"], &["function"]),
    ("precontact", &["groupoid"], &["kernel_points"]),
    ("presymplectic", &["groupoid"], &["kernel_points"]),
    ("round-trip", &["groupoid"], &[]),
    ("homogeneous", &["groupoid"], &[]),
    ("extract", &["groupoid"], &["expected"]),
    ("beta-forward", &["groupoid"], &[]),
    ("contact", &["groupoid"], &[]),
];

/// Declared objects of one kind. `None` marks a declaration that failed to
/// build; references to it are skipped silently since the failure is
/// already reported.
struct Table<T> {
    kind: &'static str,
    items: HashMap<String, Option<T>>,
}

impl<T> Table<T> {
    fn new(kind: &'static str) -> Self {
        Table {
            kind,
            items: HashMap::new(),
        }
    }

    fn insert(&mut self, errs: &mut Vec<String>, name: &str, value: Option<T>) {
        if self.items.contains_key(name) {
            errs.push(format!("{} `{name}` is declared twice", self.kind));
        } else {
            self.items.insert(name.to_string(), value);
        }
    }

    fn contains(&self, name: &str) -> bool {
        self.items.contains_key(name)
    }

    fn get(&self, errs: &mut Vec<String>, ctx: &str, name: &str) -> Option<&T> {
        match self.items.get(name) {
            Some(v) => v.as_ref(),
            None => {
                errs.push(format!("{ctx}: unknown {} `{name}`", self.kind));
                None
            }
        }
    }
}

struct Builder {
    errs: Vec<String>,
    policy: SamplingPolicy,
    charts: Table<Chart>,
    exprs: Table<(Chart, Expr)>,
    vectors: Table<VectorField>,
    forms: Table<DifferentialForm>,
    multivectors: Table<Multivector>,
    maps: Table<SmoothMap>,
    structures: Table<FrameSubbundle>,
    groupoids: Table<GroupoidEntry>,
}

fn ok<T>(errs: &mut Vec<String>, ctx: &str, r: dirac_jacobi::Result<T>) -> Option<T> {
    r.map_err(|e| errs.push(format!("{ctx}: {e}"))).ok()
}

/// Requires the keys in `required`, rejects any given key outside `required` and `optional`.
fn keys(errs: &mut Vec<String>, ctx: &str, given: &[&str], required: &[&str], optional: &[&str]) {
    for r in required {
        if !given.contains(r) {
            errs.push(format!("{ctx}: missing `{r}`"));
        }
    }
    for g in given {
        if !required.contains(g) && !optional.contains(g) {
            errs.push(format!("{ctx}: `{g}` does not apply here"));
        }
    }
}

impl Builder {
    fn parse(&mut self, chart: &Chart, text: &str, ctx: &str) -> Option<Expr> {
        ok(&mut self.errs, &format!("{ctx}: `{text}`"), chart.parse(text))
    }

    fn parse_all(&mut self, chart: &Chart, texts: &[String], ctx: &str) -> Option<Vec<Expr>> {
        let parsed: Vec<Option<Expr>> = texts.iter().map(|t| self.parse(chart, t, ctx)).collect();
        parsed.into_iter().collect()
    }

    fn parse_exact(&mut self, chart: &Chart, texts: &[String], ctx: &str, what: &str) -> Option<Vec<Expr>> {
        if texts.len() != chart.dim() {
            self.errs.push(format!(
                "{ctx}: {what} has {} entries, chart `{}` has dimension {}",
                texts.len(),
                chart.name(),
                chart.dim()
            ));
            return None;
        }
        self.parse_all(chart, texts, ctx)
    }

    /// A named expression on `chart`, or inline text parsed on `chart`.
    fn scalar(&mut self, chart: &Chart, text: &str, ctx: &str) -> Option<Expr> {
        if let Some(entry) = self.exprs.items.get(text) {
            let (c, e) = entry.as_ref()?;
            if c != chart {
                self.errs.push(format!("{ctx}: expression `{text}` lives on `{}`, not `{}`", c.name(), chart.name()));
                return None;
            }
            return Some(e.clone());
        }
        self.parse(chart, text, ctx)
    }

    fn chart(&mut self, name: &str, ctx: &str) -> Option<Chart> {
        self.charts.get(&mut self.errs, ctx, name).cloned()
    }

    /// `terms` keyed by space-separated coordinate names.
    fn terms(&mut self, chart: &Chart, terms: &BTreeMap<String, String>, ctx: &str) -> Option<(Option<usize>, Vec<Blade>)> {
        let mut degree = None;
        let mut out = Vec::new();
        let mut good = true;
        for (key, value) in terms {
            let mut idx = Vec::new();
            for c in key.split_whitespace() {
                match chart.index_of(c) {
                    Some(i) => idx.push(i),
                    None => {
                        self.errs.push(format!("{ctx}: `{c}` in term `{key}` is not a coordinate of `{}`", chart.name()));
                        good = false;
                    }
                }
            }
            match degree {
                None => degree = Some(key.split_whitespace().count()),
                Some(d) if d != key.split_whitespace().count() => {
                    self.errs.push(format!("{ctx}: term `{key}` has degree {}, expected {d}", key.split_whitespace().count()));
                    good = false;
                }
                _ => {}
            }
            match self.parse(chart, value, ctx) {
                Some(e) => out.push((idx, e)),
                None => good = false,
            }
        }
        good.then_some((degree, out))
    }

    fn tensor<T, F>(&mut self, d: &TensorDecl, ctx: &str, make: F) -> Option<T>
    where
        F: Fn(&Chart, usize, Vec<(Vec<usize>, Expr)>) -> dirac_jacobi::Result<T>,
    {
        let chart = self.chart(&d.chart, ctx)?;
        let (degree, terms) = match (&d.components, &d.terms) {
            (Some(c), None) => {
                let comps = self.parse_exact(&chart, c, ctx, "`components`")?;
                if d.degree.is_some_and(|k| k != 1) {
                    self.errs.push(format!("{ctx}: `components` declare a degree-1 object"));
                    return None;
                }
                (1, comps.into_iter().enumerate().map(|(i, e)| (vec![i], e)).collect())
            }
            (None, Some(t)) => {
                let (inferred, terms) = self.terms(&chart, t, ctx)?;
                let degree = match (d.degree, inferred) {
                    (Some(a), Some(b)) if a != b => {
                        self.errs.push(format!("{ctx}: `degree = {a}` but the terms have degree {b}"));
                        return None;
                    }
                    (Some(a), _) | (None, Some(a)) => a,
                    (None, None) => {
                        self.errs.push(format!("{ctx}: empty `terms` need an explicit `degree`"));
                        return None;
                    }
                };
                (degree, terms)
            }
            _ => {
                self.errs.push(format!("{ctx}: give exactly one of `components` or `terms`"));
                return None;
            }
        };
        ok(&mut self.errs, ctx, make(&chart, degree, terms))
    }

    fn structure(&mut self, d: &StructureDecl) -> Option<FrameSubbundle> {
        let ctx = format!("structure `{}`", d.name);
        let given = structure_keys(d);
        let allowed: (&[&str], &[&str]) = match d.kind.as_str() {
            "theta" => (&["form"], &[]),
            "jacobi" => (&["bivector"], &["vector"]),
            "dirac-graph" => (&[], &["form", "bivector"]),
            "lift" | "flip-forms" => (&["of"], &[]),
            "conformal-of" => (&["of", "phi"], &[]),
            "induced" => (&["of"], &["coord"]),
            "frame-literal" => (&["chart", "ambient", "generators"], &["rank"]),
            other => {
                self.errs.push(format!("{ctx}: unknown kind `{other}`"));
                return None;
            }
        };
        let before = self.errs.len();
        keys(&mut self.errs, &ctx, &given, allowed.0, allowed.1);
        if self.errs.len() > before {
            return None;
        }
        let of = |b: &mut Builder| -> Option<FrameSubbundle> {
            let name = d.of.as_deref().unwrap_or_default();
            b.structures.get(&mut b.errs, &ctx, name).cloned()
        };
        match d.kind.as_str() {
            "theta" => {
                let theta = self.forms.get(&mut self.errs, &ctx, d.form.as_deref()?)?.clone();
                ok(&mut self.errs, &ctx, construct_l_theta(&theta))
            }
            "jacobi" => {
                let lambda = self.multivectors.get(&mut self.errs, &ctx, d.bivector.as_deref()?)?.clone();
                let e = match &d.vector {
                    Some(v) => self.vectors.get(&mut self.errs, &ctx, v)?.clone(),
                    None => VectorField::zero(lambda.chart()),
                };
                ok(&mut self.errs, &ctx, construct_l_jacobi(&lambda, &e))
            }
            "dirac-graph" => match (&d.form, &d.bivector) {
                (Some(f), None) => {
                    let omega = self.forms.get(&mut self.errs, &ctx, f)?.clone();
                    ok(&mut self.errs, &ctx, graph_of_two_form(&omega))
                }
                (None, Some(b)) => {
                    let pi = self.multivectors.get(&mut self.errs, &ctx, b)?.clone();
                    ok(&mut self.errs, &ctx, graph_of_bivector(&pi))
                }
                _ => {
                    self.errs.push(format!("{ctx}: give exactly one of `form` or `bivector`"));
                    None
                }
            },
            "lift" => {
                let l = of(self)?;
                ok(&mut self.errs, &ctx, lift_dirac(&l))
            }
            "flip-forms" => Some(of(self)?.flip_forms()),
            "conformal-of" => {
                let l = of(self)?;
                let phi = self.scalar(l.chart(), d.phi.as_deref()?, &ctx)?;
                let phi = ok(&mut self.errs, &ctx, ConformalFactor::new(l.chart(), phi))?;
                ok(&mut self.errs, &ctx, conformal_change(&l, &phi))
            }
            "induced" => {
                let l = of(self)?;
                let r = match &d.coord {
                    Some(t) => induced_dirac_with_coord(&l, t),
                    None => induced_dirac_on_mxr(&l),
                };
                ok(&mut self.errs, &ctx, r)
            }
            _ => self.frame_literal(d, &ctx),
        }
    }

    fn frame_literal(&mut self, d: &StructureDecl, ctx: &str) -> Option<FrameSubbundle> {
        let chart = self.chart(d.chart.as_deref()?, ctx)?;
        let e1 = match d.ambient.as_deref() {
            Some("tm") => false,
            Some("e1") => true,
            Some(other) => {
                self.errs.push(format!("{ctx}: ambient must be `tm` or `e1`, not `{other}`"));
                return None;
            }
            None => return None,
        };
        let mut gens = Vec::with_capacity(d.generators.len());
        let mut good = true;
        for (k, g) in d.generators.iter().enumerate() {
            let gctx = format!("{ctx}, generator {k}");
            if !e1 && (g.f.is_some() || g.g.is_some()) {
                self.errs.push(format!("{gctx}: scalar slots `f`, `g` need ambient `e1`"));
                good = false;
                continue;
            }
            let x = match &g.x {
                Some(x) => self.parse_exact(&chart, x, &gctx, "`x`").map(|c| VectorField::new(&chart, c)),
                None => Some(Ok(VectorField::zero(&chart))),
            };
            let xi = match &g.xi {
                Some(xi) => self.parse_exact(&chart, xi, &gctx, "`xi`").map(|c| DifferentialForm::from_components(&chart, c)),
                None => Some(Ok(DifferentialForm::zero(&chart, 1))),
            };
            let f = g.f.as_ref().map_or(Some(Expr::zero()), |t| self.parse(&chart, t, &gctx));
            let gg = g.g.as_ref().map_or(Some(Expr::zero()), |t| self.parse(&chart, t, &gctx));
            let built = match (x, xi, f, gg) {
                (Some(x), Some(xi), Some(f), Some(gg)) => ok(
                    &mut self.errs,
                    &gctx,
                    x.and_then(|x| xi.and_then(|xi| SectionE1::new(x, f, xi, gg))),
                ),
                _ => None,
            };
            match built {
                Some(s) => gens.push(s),
                None => good = false,
            }
        }
        if !good {
            return None;
        }
        let n = chart.dim();
        let rank = d.rank.unwrap_or(if e1 { n + 1 } else { n });
        let r = if e1 {
            FrameSubbundle::from_e1(&chart, gens, rank)
        } else {
            FrameSubbundle::from_tm(&chart, gens.iter().map(SectionE1::tm_part).collect(), rank)
        };
        ok(&mut self.errs, ctx, r)
    }

    fn param(&mut self, p: &ParamDecl, name: &str, target: &Chart, ctx: &str) -> Option<SmoothMap> {
        let chart = ok(&mut self.errs, ctx, Chart::new(name, &p.coords))?;
        if p.components.len() != target.dim() {
            self.errs.push(format!("{ctx}: `{name}` needs {} components, got {}", target.dim(), p.components.len()));
            return None;
        }
        let comps = self.parse_all(&chart, &p.components, ctx)?;
        ok(&mut self.errs, ctx, SmoothMap::new(&chart, target, comps))
    }

    fn map_on(&mut self, source: &Chart, target: &Chart, texts: Option<&Vec<String>>, ctx: &str, what: &str) -> Option<SmoothMap> {
        let texts = texts?;
        if texts.len() != target.dim() {
            self.errs.push(format!("{ctx}: `{what}` needs {} components, got {}", target.dim(), texts.len()));
            return None;
        }
        let comps = self.parse_all(source, texts, ctx)?;
        ok(&mut self.errs, ctx, SmoothMap::new(source, target, comps))
    }

    fn literal_groupoid(&mut self, d: &GroupoidDecl, ctx: &str) -> Option<GroupoidModel> {
        let g = self.chart(d.total.as_deref()?, ctx);
        let m = self.chart(d.base.as_deref()?, ctx);
        let (g, m) = (g?, m?);
        let convention = match d.convention.as_deref() {
            None | Some("alpha-beta") => Composability::AlphaBeta,
            Some("beta-alpha") => Composability::BetaAlpha,
            Some(other) => {
                self.errs.push(format!("{ctx}: convention must be `alpha-beta` or `beta-alpha`, not `{other}`"));
                return None;
            }
        };
        let g2 = ok(&mut self.errs, ctx, GroupoidModel::pair_chart(&g))?;
        let g3 = ok(&mut self.errs, ctx, GroupoidModel::triple_chart(&g))?;
        let alpha = self.map_on(&g, &m, d.alpha.as_ref(), ctx, "alpha");
        let beta = self.map_on(&g, &m, d.beta.as_ref(), ctx, "beta");
        let unit = self.map_on(&m, &g, d.unit.as_ref(), ctx, "unit");
        let inverse = self.map_on(&g, &g, d.inverse.as_ref(), ctx, "inverse");
        let mult = self.map_on(&g2, &g, d.mult.as_ref(), ctx, "mult");
        let pairs = self.param(d.pairs.as_ref()?, &format!("{}_pairs", g.name()), &g2, ctx);
        let triples = d.triples.as_ref().map(|t| self.param(t, &format!("{}_triples", g.name()), &g3, ctx));
        let fibers = d.fibers.as_ref().map(|f| self.param(f, &format!("{}_fibers", g.name()), &g, ctx));
        let mut model = ok(
            &mut self.errs,
            ctx,
            GroupoidModel::new(&d.name, convention, alpha?, beta?, unit?, inverse?, mult?, pairs?),
        )?;
        if let Some(t) = triples {
            model = ok(&mut self.errs, ctx, model.with_triples(t?))?;
        }
        if let Some(f) = fibers {
            model = ok(&mut self.errs, ctx, model.with_fibers(f?))?;
        }
        Some(model)
    }

    fn groupoid(&mut self, d: &GroupoidDecl) -> Option<GroupoidEntry> {
        let ctx = format!("groupoid `{}`", d.name);
        let given = groupoid_keys(d);
        let overrides = ["eta", "sigma", "omega", "z"];
        let allowed: (&[&str], &[&str]) = match d.kind.as_str() {
            "pair" | "pair-line" | "cotangent" => (&["base"], &[]),
            "pair-theta" => (&["form"], &[]),
            "literal" => (
                &["total", "base", "alpha", "beta", "unit", "inverse", "mult", "pairs"],
                &["convention", "triples", "fibers"],
            ),
            "action" => (&["of"], &[]),
            "equivalence" => (&["of", "phi"], &[]),
            other => {
                self.errs.push(format!("{ctx}: unknown kind `{other}`"));
                return None;
            }
        };
        let optional: Vec<&str> = allowed.1.iter().chain(overrides.iter()).copied().collect();
        let before = self.errs.len();
        keys(&mut self.errs, &ctx, &given, allowed.0, &optional);
        if self.errs.len() > before {
            return None;
        }
        let bare = |model| GroupoidEntry {
            model,
            precontact: None,
            presymplectic: None,
        };
        let mut entry = match d.kind.as_str() {
            "pair" | "pair-line" | "cotangent" => {
                let m = self.chart(d.base.as_deref()?, &ctx)?;
                let r = match d.kind.as_str() {
                    "pair" => pair_groupoid(&m),
                    "pair-line" => pair_groupoid_with_line(&m),
                    _ => cotangent_group_bundle(&m),
                };
                bare(ok(&mut self.errs, &ctx, r)?)
            }
            "pair-theta" => {
                let theta = self.forms.get(&mut self.errs, &ctx, d.form.as_deref()?)?.clone();
                let (model, pd) = ok(&mut self.errs, &ctx, pair_theta_model(&theta))?;
                GroupoidEntry {
                    model,
                    precontact: Some(pd),
                    presymplectic: None,
                }
            }
            "literal" => bare(self.literal_groupoid(d, &ctx)?),
            "action" => {
                let of = self.groupoids.get(&mut self.errs, &ctx, d.of.as_deref()?)?.clone();
                let Some(pd) = of.precontact else {
                    self.errs.push(format!("{ctx}: `{}` carries no precontact data to act by", of.model.name()));
                    return None;
                };
                let model = ok(&mut self.errs, &ctx, build_action_groupoid(&of.model, &pd.sigma, &self.policy))?;
                let ps = ok(&mut self.errs, &ctx, eta_to_omega(&model, &pd))?;
                GroupoidEntry {
                    model,
                    precontact: None,
                    presymplectic: Some(ps),
                }
            }
            _ => {
                let of = self.groupoids.get(&mut self.errs, &ctx, d.of.as_deref()?)?.clone();
                let Some(pd) = of.precontact else {
                    self.errs.push(format!("{ctx}: `{}` carries no precontact data to transform", of.model.name()));
                    return None;
                };
                let base = of.model.base().clone();
                let phi = self.scalar(&base, d.phi.as_deref()?, &ctx)?;
                let phi = ok(&mut self.errs, &ctx, ConformalFactor::new(&base, phi))?;
                let pd = ok(&mut self.errs, &ctx, equivalence_transform(&of.model, &pd, &phi, &self.policy))?;
                GroupoidEntry {
                    model: of.model,
                    precontact: Some(pd),
                    presymplectic: None,
                }
            }
        };
        self.apply_overrides(d, &ctx, &mut entry)?;
        Some(entry)
    }

    fn apply_overrides(&mut self, d: &GroupoidDecl, ctx: &str, entry: &mut GroupoidEntry) -> Option<()> {
        let g = entry.model.total().clone();
        let sigma = match &d.sigma {
            Some(s) => Some(self.parse(&g, s, ctx)?),
            None => None,
        };
        match (&d.eta, sigma) {
            (Some(eta), sigma) => {
                let comps = self.parse_exact(&g, eta, ctx, "`eta`")?;
                let eta = ok(&mut self.errs, ctx, DifferentialForm::from_components(&g, comps))?;
                let Some(sigma) = sigma.or_else(|| entry.precontact.as_ref().map(|p| p.sigma.clone())) else {
                    self.errs.push(format!("{ctx}: `eta` needs a `sigma`"));
                    return None;
                };
                entry.precontact = Some(PrecontactData { eta, sigma });
            }
            (None, Some(sigma)) => match entry.precontact.as_mut() {
                Some(pd) => pd.sigma = sigma,
                None => {
                    self.errs.push(format!("{ctx}: `sigma` without `eta`"));
                    return None;
                }
            },
            (None, None) => {}
        }
        if let Some(terms) = &d.omega {
            let (degree, terms) = self.terms(&g, terms, ctx)?;
            if degree.is_some_and(|k| k != 2) {
                self.errs.push(format!("{ctx}: `omega` must be a 2-form"));
                return None;
            }
            let omega = ok(&mut self.errs, ctx, DifferentialForm::from_terms(&g, 2, terms))?;
            let z = entry.presymplectic.as_ref().and_then(|p| p.z.clone());
            entry.presymplectic = Some(PresymplecticData { omega, z });
        }
        if let Some(z) = &d.z {
            let comps = self.parse_exact(&g, z, ctx, "`z`")?;
            let z = ok(&mut self.errs, ctx, VectorField::new(&g, comps))?;
            match entry.presymplectic.as_mut() {
                Some(ps) => ps.z = Some(z),
                None => {
                    self.errs.push(format!("{ctx}: `z` without `omega`"));
                    return None;
                }
            }
        }
        Some(())
    }

    fn check(&mut self, c: &CheckDecl) -> Option<PlannedCheck> {
        let ctx = format!("check `{}`", c.name);
        let expect = match c.expect.as_deref() {
            None | Some("pass") => Expect::Pass,
            Some("fail") => Expect::Fail,
            Some("inconclusive") => Expect::Inconclusive,
            Some("error") => Expect::Error,
            Some(other) => {
                self.errs.push(format!("{ctx}: expect must be pass, fail, inconclusive or error, not `{other}`"));
                return None;
            }
        };
        let Some((_, required, optional)) = OPERATIONS.iter().find(|(op, _, _)| *op == c.op) else {
            self.errs.push(format!("{ctx}: unknown op `{}`", c.op));
            return None;
        };
        let mut optional = optional.to_vec();
        optional.push("condition");
        if c.condition.is_some() && expect != Expect::Fail {
            self.errs.push(format!("{ctx}: `condition` names an expected failure and needs `expect = \"fail\"`"));
        }
        let before = self.errs.len();
        keys(&mut self.errs, &ctx, &c.given(), required, &optional);
        if self.errs.len() > before {
            return None;
        }
        let task = self.task(c, &ctx)?;
        Some(PlannedCheck {
            name: c.name.clone(),
            op: c.op.clone(),
            expect,
            condition: c.condition.clone(),
            task,
        })
    }

    fn l(&mut self, name: &Option<String>, ctx: &str) -> Option<FrameSubbundle> {
        self.structures.get(&mut self.errs, ctx, name.as_deref()?).cloned()
    }

    fn g(&mut self, c: &CheckDecl, ctx: &str) -> Option<GroupoidEntry> {
        self.groupoids.get(&mut self.errs, ctx, c.groupoid.as_deref()?).cloned()
    }

    fn precontact(&mut self, c: &CheckDecl, ctx: &str) -> Option<(GroupoidModel, PrecontactData)> {
        let e = self.g(c, ctx)?;
        match e.precontact {
            Some(pd) => Some((e.model, pd)),
            None => {
                self.errs.push(format!("{ctx}: `{}` has no precontact data", c.groupoid.as_deref().unwrap_or_default()));
                None
            }
        }
    }

    fn presymplectic(&mut self, c: &CheckDecl, ctx: &str) -> Option<(GroupoidModel, PresymplecticData)> {
        let e = self.g(c, ctx)?;
        match e.presymplectic {
            Some(ps) => Some((e.model, ps)),
            None => {
                self.errs.push(format!("{ctx}: `{}` has no presymplectic data", c.groupoid.as_deref().unwrap_or_default()));
                None
            }
        }
    }

    fn kernel_points(&mut self, c: &CheckDecl, ctx: &str) -> Option<KernelPoints> {
        match c.kernel_points.as_deref() {
            None | Some("units") => Some(KernelPoints::Units),
            Some("everywhere") => Some(KernelPoints::Everywhere),
            Some(other) => {
                self.errs.push(format!("{ctx}: kernel_points must be `units` or `everywhere`, not `{other}`"));
                None
            }
        }
    }

    fn task(&mut self, c: &CheckDecl, ctx: &str) -> Option<Task> {
        let task = match c.op.as_str() {
            "zero" => {
                let chart = self.chart(c.chart.as_deref()?, ctx)?;
                Task::Zero(self.scalar(&chart, c.expr.as_deref()?, ctx)?)
            }
            "isotropy" => Task::Isotropy(self.l(&c.structure, ctx)?),
            "involutivity" => Task::Involutivity(self.l(&c.structure, ctx)?),
            "dirac" => Task::Dirac(self.l(&c.structure, ctx)?),
            "central-extension" => Task::CentralExtension(self.l(&c.structure, ctx)?),
            "anchor-morphism" => Task::AnchorMorphism(self.l(&c.structure, ctx)?),
            "jacobi-identity" => Task::JacobiIdentity(self.l(&c.structure, ctx)?),
            "same" | "identical" => {
                let a = self.l(&c.structure, ctx);
                let b = self.l(&c.other, ctx);
                let (a, b) = (a?, b?);
                if c.op == "same" {
                    Task::Same(a, b)
                } else {
                    Task::Identical(a, b)
                }
            }
            "forward" | "anti" => {
                let f = self.maps.get(&mut self.errs, ctx, c.map.as_deref()?).cloned();
                let a = self.l(&c.source, ctx);
                let b = self.l(&c.target, ctx);
                let (f, a, b) = (f?, a?, b?);
                if c.op == "forward" {
                    Task::Forward(f, a, b)
                } else {
                    Task::Anti(f, a, b)
                }
            }
            "mu" | "nonvanishing" => {
                let chart = self.chart(c.chart.as_deref()?, ctx)?;
                let phi = self.scalar(&chart, c.phi.as_deref()?, ctx)?;
                let phi = ok(&mut self.errs, ctx, ConformalFactor::new(&chart, phi))?;
                if c.op == "mu" {
                    Task::Mu(phi)
                } else {
                    Task::Nonvanishing(phi)
                }
            }
            "cocycle" | "cocycle-exact" => {
                let l = self.l(&c.structure, ctx)?;
                let values = match &c.values {
                    Some(v) => Some(self.parse_all(&l.chart().clone(), v, ctx)?),
                    None => None,
                };
                match (c.op.as_str(), values) {
                    ("cocycle", values) => Task::Cocycle(l, values),
                    (_, Some(values)) => Task::CocycleExact(l, values),
                    _ => return None,
                }
            }
            "closed" => {
                let l = self.l(&c.structure, ctx)?;
                let source = match (c.cochain.as_deref(), &c.table) {
                    (Some("omega-l0"), None) => CochainSource::OmegaL0,
                    (None, Some(rows)) => {
                        let chart = l.chart().clone();
                        let parsed: Vec<Option<Vec<Expr>>> = rows.iter().map(|r| self.parse_all(&chart, r, ctx)).collect();
                        CochainSource::Table(parsed.into_iter().collect::<Option<_>>()?)
                    }
                    (Some(other), None) => {
                        self.errs.push(format!("{ctx}: unknown cochain `{other}` (known: omega-l0)"));
                        return None;
                    }
                    _ => {
                        self.errs.push(format!("{ctx}: give exactly one of `cochain` or `table`"));
                        return None;
                    }
                };
                Task::Closed(l, source)
            }
            "action-iso" => {
                let l = self.l(&c.structure, ctx)?;
                let map = match c.iso.as_deref() {
                    None | Some("standard") => IsoMap::Standard,
                    Some("without-exp") => IsoMap::WithoutExp,
                    Some(other) => {
                        self.errs.push(format!("{ctx}: iso must be `standard` or `without-exp`, not `{other}`"));
                        return None;
                    }
                };
                Task::ActionIso(l, map)
            }
            "groupoid" => Task::Groupoid(self.g(c, ctx)?.model),
            "multiplicative" => {
                let e = self.g(c, ctx)?;
                let f = match (&c.function, &e.precontact) {
                    (Some(text), _) => self.scalar(&e.model.total().clone(), text, ctx)?,
                    (None, Some(pd)) => pd.sigma.clone(),
                    (None, None) => {
                        self.errs.push(format!("{ctx}: no `function` given and no sigma to default to"));
                        return None;
                    }
                };
                Task::Multiplicative(e.model, f)
            }
            "precontact" => {
                let kp = self.kernel_points(c, ctx);
                let (gm, pd) = self.precontact(c, ctx)?;
                Task::Precontact(gm, pd, kp?)
            }
            "presymplectic" => {
                let kp = self.kernel_points(c, ctx);
                let (gm, ps) = self.presymplectic(c, ctx)?;
                Task::Presymplectic(gm, ps, kp?)
            }
            "round-trip" => {
                let (gm, pd) = self.precontact(c, ctx)?;
                Task::RoundTrip(gm, pd)
            }
            "homogeneous" => {
                let (gm, ps) = self.presymplectic(c, ctx)?;
                Task::Homogeneous(gm, ps)
            }
            "extract" => {
                let expected = match &c.expected {
                    Some(_) => Some(self.l(&c.expected, ctx)?),
                    None => None,
                };
                let (gm, pd) = self.precontact(c, ctx)?;
                Task::Extract(gm, pd, expected)
            }
            "beta-forward" => {
                let (gm, pd) = self.precontact(c, ctx)?;
                Task::BetaForward(gm, pd)
            }
            _ => {
                let (gm, pd) = self.precontact(c, ctx)?;
                Task::Contact(gm, pd)
            }
        };
        Some(task)
    }
}

fn structure_keys(d: &StructureDecl) -> Vec<&'static str> {
    [
        ("form", d.form.is_some()),
        ("bivector", d.bivector.is_some()),
        ("vector", d.vector.is_some()),
        ("of", d.of.is_some()),
        ("phi", d.phi.is_some()),
        ("coord", d.coord.is_some()),
        ("chart", d.chart.is_some()),
        ("ambient", d.ambient.is_some()),
        ("rank", d.rank.is_some()),
        ("generators", !d.generators.is_empty()),
    ]
    .iter()
    .filter(|(_, on)| *on)
    .map(|(k, _)| *k)
    .collect()
}

fn groupoid_keys(d: &GroupoidDecl) -> Vec<&'static str> {
    [
        ("base", d.base.is_some()),
        ("total", d.total.is_some()),
        ("form", d.form.is_some()),
        ("of", d.of.is_some()),
        ("phi", d.phi.is_some()),
        ("convention", d.convention.is_some()),
        ("alpha", d.alpha.is_some()),
        ("beta", d.beta.is_some()),
        ("unit", d.unit.is_some()),
        ("inverse", d.inverse.is_some()),
        ("mult", d.mult.is_some()),
        ("pairs", d.pairs.is_some()),
        ("triples", d.triples.is_some()),
        ("fibers", d.fibers.is_some()),
        ("eta", d.eta.is_some()),
        ("sigma", d.sigma.is_some()),
        ("omega", d.omega.is_some()),
        ("z", d.z.is_some()),
    ]
    .iter()
    .filter(|(_, on)| *on)
    .map(|(k, _)| *k)
    .collect()
}

fn policy_for(s: &Scenario, o: &Overrides, errs: &mut Vec<String>) -> SamplingPolicy {
    let sec = &s.sampling;
    let mut p = SamplingPolicy::default();
    if let Some(seed) = o.seed.or(sec.seed) {
        p.seed = seed;
    }
    if let Some(n) = o.samples.or(sec.samples) {
        if n == 0 {
            errs.push("sampling: the sample count must be positive".into());
        }
        p.count = n;
    }
    if let Some(t) = o.tol.or(sec.tol) {
        if !(t.is_finite() && t > 0.0) {
            errs.push(format!("sampling: tolerance {t} must be positive"));
        }
        p.tol_abs = t;
        p.tol_rel = t;
    }
    if let Some(v) = sec.low {
        p.low = v;
    }
    if let Some(v) = sec.high {
        p.high = v;
    }
    if p.low.is_nan() || p.high.is_nan() || p.low >= p.high {
        errs.push(format!("sampling: empty box [{}, {}]", p.low, p.high));
    }
    for (what, v) in [("membership_tol", sec.membership_tol), ("rank_tol", sec.rank_tol)] {
        if let Some(v) = v {
            if !(v.is_finite() && v > 0.0) {
                errs.push(format!("sampling: {what} {v} must be positive"));
            }
        }
    }
    if let Some(v) = sec.membership_tol {
        p.membership_tol = v;
    }
    if let Some(v) = sec.rank_tol {
        p.rank_tol = v;
    }
    if o.sequential {
        p = p.sequential();
    }
    p
}

/// Builds every declared object and check. On failure returns every problem found.
pub fn build(s: &Scenario, o: &Overrides) -> Result<Plan, Vec<String>> {
    let mut errs = Vec::new();
    let policy = policy_for(s, o, &mut errs);
    let mut b = Builder {
        errs,
        policy,
        charts: Table::new("chart"),
        exprs: Table::new("expression"),
        vectors: Table::new("vector"),
        forms: Table::new("form"),
        multivectors: Table::new("multivector"),
        maps: Table::new("map"),
        structures: Table::new("structure"),
        groupoids: Table::new("groupoid"),
    };

    for c in &s.charts {
        let v = ok(&mut b.errs, &format!("chart `{}`", c.name), Chart::new(&c.name, &c.coords));
        b.charts.insert(&mut b.errs, &c.name, v);
    }
    for e in &s.exprs {
        let ctx = format!("expression `{}`", e.name);
        let v = b.chart(&e.chart, &ctx).and_then(|c| b.parse(&c, &e.value, &ctx).map(|x| (c, x)));
        b.exprs.insert(&mut b.errs, &e.name, v);
    }
    for v in &s.vectors {
        let ctx = format!("vector `{}`", v.name);
        let built = b.chart(&v.chart, &ctx).and_then(|c| {
            let comps = b.parse_exact(&c, &v.components, &ctx, "`components`")?;
            ok(&mut b.errs, &ctx, VectorField::new(&c, comps))
        });
        b.vectors.insert(&mut b.errs, &v.name, built);
    }
    for f in &s.forms {
        let ctx = format!("form `{}`", f.name);
        let built = b.tensor(f, &ctx, DifferentialForm::from_terms);
        b.forms.insert(&mut b.errs, &f.name, built);
    }
    for m in &s.multivectors {
        let ctx = format!("multivector `{}`", m.name);
        let built = b.tensor(m, &ctx, Multivector::from_terms);
        b.multivectors.insert(&mut b.errs, &m.name, built);
    }
    for m in &s.maps {
        let ctx = format!("map `{}`", m.name);
        let src = b.chart(&m.source, &ctx);
        let tgt = b.chart(&m.target, &ctx);
        let built = match (src, tgt) {
            (Some(s), Some(t)) => b.map_on(&s, &t, Some(&m.components), &ctx, "components"),
            _ => None,
        };
        b.maps.insert(&mut b.errs, &m.name, built);
    }
    for d in &s.structures {
        if b.structures.contains(&d.name) {
            b.errs.push(format!("structure `{}` is declared twice", d.name));
            continue;
        }
        let built = b.structure(d);
        b.structures.insert(&mut b.errs, &d.name, built);
    }
    for d in &s.groupoids {
        if b.groupoids.contains(&d.name) {
            b.errs.push(format!("groupoid `{}` is declared twice", d.name));
            continue;
        }
        let built = b.groupoid(d);
        b.groupoids.insert(&mut b.errs, &d.name, built);
    }
    let mut checks = Vec::with_capacity(s.checks.len());
    let mut seen = std::collections::HashSet::new();
    for c in &s.checks {
        if !seen.insert(c.name.as_str()) {
            b.errs.push(format!("check `{}` is declared twice", c.name));
            continue;
        }
        if let Some(p) = b.check(c) {
            checks.push(p);
        }
    }
    if s.checks.is_empty() {
        b.errs.push("the scenario declares no checks".into());
    }
    if b.errs.is_empty() {
        Ok(Plan {
            name: s.scenario.name.clone(),
            policy: b.policy,
            checks,
        })
    } else {
        Err(b.errs)
    }
}

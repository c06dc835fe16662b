//! The Lie algebroid of a verified structure: cocycles, the low-degree
//! differential, the central extension by a 2-cochain and the action
//! algebroid twisted by a 1-cocycle.

use nalgebra::{DMatrix, DVector};

use crate::courant::{courant_bracket, SectionE1, SectionTM};
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::report::{CheckReport, Condition, Witness};
use crate::structures::{induced_dirac_with_coord, Ambient, FrameSubbundle};
use crate::symcalc::{EvalError, Expr, Point, SamplingPolicy};
use crate::tensor::{contract, lie_bracket, AlternatingTensor, Chart, DifferentialForm, VectorField};
use crate::verify::{require_zero, sample_into};

/// A structure `L` viewed as a Lie algebroid: anchor is the vector slot,
/// bracket the restricted (extended) Courant bracket.
#[derive(Clone, Debug)]
pub struct AlgebroidOnL {
    l: FrameSubbundle,
}

/// Coefficients of a section in the frame at one point.
struct Expansion {
    coeffs: DVector<f64>,
    residual: f64,
    size: f64,
}

impl AlgebroidOnL {
    pub fn new(l: FrameSubbundle) -> AlgebroidOnL {
        AlgebroidOnL { l }
    }

    pub fn structure(&self) -> &FrameSubbundle {
        &self.l
    }

    pub fn chart(&self) -> &Chart {
        self.l.chart()
    }

    pub fn anchor(&self, s: &SectionE1) -> VectorField {
        s.x.clone()
    }

    pub fn bracket(&self, a: &SectionE1, b: &SectionE1) -> Result<SectionE1> {
        self.l.bracket(a, b)
    }

    fn gens(&self) -> &[SectionE1] {
        self.l.generators()
    }

    fn expand(&self, frame: &DMatrix<f64>, s: &SectionE1, p: &Point, policy: &SamplingPolicy) -> std::result::Result<Expansion, EvalError> {
        let v = DVector::from_vec(self.l.section_vector(s, p)?);
        let (coeffs, residual) = least_squares(frame, &v, policy.rank_tol);
        Ok(Expansion {
            coeffs,
            residual,
            size: v.norm(),
        })
    }

    fn pair_brackets(&self) -> Result<Vec<((usize, usize), SectionE1)>> {
        let k = self.gens().len();
        let mut out = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                out.push(((i, j), self.bracket(&self.gens()[i], &self.gens()[j])?));
            }
        }
        Ok(out)
    }
}

fn expansion_ok(cond: &mut Condition, e: &Expansion, policy: &SamplingPolicy, p: &Point, what: impl FnOnce() -> String) -> bool {
    cond.residuals.push(e.residual);
    if e.residual <= policy.membership_tol * (1.0 + e.size) {
        true
    } else {
        cond.inconclusive_with(Witness::new(format!("{} is not in the frame span", what()), p, e.residual));
        false
    }
}

/// A 1-cochain given by its values on the frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle1 {
    pub values: Vec<Expr>,
}

impl Cocycle1 {
    pub fn zero(len: usize) -> Cocycle1 {
        Cocycle1 {
            values: vec![Expr::zero(); len],
        }
    }

    fn eval(&self, p: &Point) -> std::result::Result<DVector<f64>, EvalError> {
        Ok(DVector::from_vec(self.values.iter().map(|v| p.eval(v)).collect::<std::result::Result<_, _>>()?))
    }

    /// `phi(sum_i a_i e_i) = sum_i a_i phi_i`.
    fn apply(&self, coeffs: &[Expr]) -> Expr {
        Expr::sum(coeffs.iter().zip(&self.values).map(|(a, v)| a * v))
    }
}

/// `phi(e_i)` = the `f` slot of the i-th generator.
pub fn extract_cocycle(l: &FrameSubbundle) -> Result<Cocycle1> {
    if l.ambient() != Ambient::E1 {
        return Err(Error::Invalid("the cocycle is defined for subbundles of E1".into()));
    }
    Ok(Cocycle1 {
        values: l.generators().iter().map(|g| g.f.clone()).collect(),
    })
}

fn ensure_len(a: &AlgebroidOnL, n: usize, what: &str) -> Result<()> {
    if n == a.gens().len() {
        Ok(())
    } else {
        Err(Error::Invalid(format!(
            "{what} has {n} entries but the frame has {} generators",
            a.gens().len()
        )))
    }
}

/// `rho(a) phi(b) - rho(b) phi(a) - phi([a, b]) = 0` on generator pairs, with
/// `phi([a, b])` read through the frame expansion of the bracket.
pub fn check_cocycle(a: &AlgebroidOnL, phi: &Cocycle1, policy: &SamplingPolicy) -> Result<CheckReport> {
    ensure_len(a, phi.values.len(), "cocycle")?;
    let gens = a.gens();
    let brackets = a.pair_brackets()?;
    let lhs: Vec<Expr> = brackets
        .iter()
        .map(|((i, j), _)| gens[*i].x.apply(&phi.values[*j]) - gens[*j].x.apply(&phi.values[*i]))
        .collect();

    let mut expansion = Condition::new("frame expansion");
    let mut identity = Condition::new("cocycle identity");
    let samples = sample_into(&mut identity, policy, a.chart().coords(), 0x21, |p| {
        let frame = a.l.frame_at(p)?;
        let values = phi.eval(p)?;
        brackets
            .iter()
            .zip(&lhs)
            .map(|((_, b), l)| {
                let e = a.expand(&frame, b, p, policy)?;
                let l = p.eval(l)?;
                let r = e.coeffs.dot(&values);
                let scale = l.abs() + e.coeffs.abs().dot(&values.abs());
                Ok((e, l - r, scale))
            })
            .collect::<std::result::Result<Vec<_>, EvalError>>()
    });
    for (p, rows) in &samples {
        for (((i, j), _), (e, value, scale)) in brackets.iter().zip(rows) {
            if expansion_ok(&mut expansion, e, policy, p, || format!("bracket ({i},{j})")) {
                identity.observe(value.abs(), policy.membership_tol * (1.0 + scale), || format!("pair ({i},{j})"), p);
            }
        }
    }
    Ok(CheckReport::new(vec![expansion, identity]))
}

/// An antisymmetric 2-cochain given by its values on frame pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain2 {
    table: Vec<Vec<Expr>>,
}

impl Cochain2 {
    pub fn from_table(table: Vec<Vec<Expr>>) -> Result<Cochain2> {
        let k = table.len();
        for (i, row) in table.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Invalid("2-cochain table must be square".into()));
            }
            for j in 0..k {
                if !(row[j].clone() + table[j][i].clone()).is_zero_literal() {
                    return Err(Error::Invalid(format!("2-cochain not antisymmetric at ({i},{j})")));
                }
            }
        }
        Ok(Cochain2 { table })
    }

    pub fn zero(len: usize) -> Cochain2 {
        Cochain2 {
            table: vec![vec![Expr::zero(); len]; len],
        }
    }

    /// Evaluates an antisymmetric pairing of sections on every frame pair.
    pub fn from_sections<F>(l: &FrameSubbundle, omega: F) -> Result<Cochain2>
    where
        F: Fn(&SectionE1, &SectionE1) -> Result<Expr>,
    {
        let g = l.generators();
        let table = g
            .iter()
            .map(|a| g.iter().map(|b| omega(a, b)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Cochain2::from_table(table)
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.table[i][j]
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    fn eval(&self, p: &Point) -> std::result::Result<DMatrix<f64>, EvalError> {
        let k = self.len();
        let mut m = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = p.eval(&self.table[i][j])?;
            }
        }
        Ok(m)
    }
}

/// `Omega_{L0}(X1+xi1, X2+xi2) = (xi1(X2) - xi2(X1)) / 2`.
pub fn omega_l0(a: &SectionTM, b: &SectionTM) -> Result<Expr> {
    Ok(Expr::rational(1, 2) * (contract(&a.xi, &b.x)? - contract(&b.xi, &a.x)?))
}

/// The cochain `Omega_{L0}` on the frame of `l0`.
pub fn omega_l0_cochain(l0: &FrameSubbundle) -> Result<Cochain2> {
    Cochain2::from_sections(l0, |a, b| omega_l0(&a.tm_part(), &b.tm_part()))
}

/// Closedness of a 2-cochain: `d Omega = 0` on every generator triple.
pub fn algebroid_differential_2(a: &AlgebroidOnL, omega: &Cochain2, policy: &SamplingPolicy) -> Result<CheckReport> {
    ensure_len(a, omega.len(), "2-cochain")?;
    let gens = a.gens();
    let k = gens.len();
    let mut triples = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            for l in j + 1..k {
                triples.push((i, j, l));
            }
        }
    }
    // rho(a)Omega(b,c) - rho(b)Omega(a,c) + rho(c)Omega(a,b)
    let anchor_terms: Vec<Expr> = triples
        .iter()
        .map(|&(i, j, l)| {
            gens[i].x.apply(omega.get(j, l)) - gens[j].x.apply(omega.get(i, l)) + gens[l].x.apply(omega.get(i, j))
        })
        .collect();
    let brackets: std::collections::BTreeMap<(usize, usize), SectionE1> = a.pair_brackets()?.into_iter().collect();

    let mut expansion = Condition::new("frame expansion");
    let mut closed = Condition::new("closedness");
    let samples = sample_into(&mut closed, policy, a.chart().coords(), 0x22, |p| {
        let frame = a.l.frame_at(p)?;
        let om = omega.eval(p)?;
        let exp = brackets
            .iter()
            .map(|(&key, b)| Ok((key, a.expand(&frame, b, p, policy)?)))
            .collect::<std::result::Result<std::collections::BTreeMap<_, _>, EvalError>>()?;
        let anchors = anchor_terms.iter().map(|t| p.eval(t)).collect::<std::result::Result<Vec<_>, _>>()?;
        Ok((om, exp, anchors))
    });
    for (p, (om, exp, anchors)) in &samples {
        let bad: Vec<(usize, usize)> = exp
            .iter()
            .filter(|(key, e)| !expansion_ok(&mut expansion, e, policy, p, || format!("bracket {key:?}")))
            .map(|(key, _)| *key)
            .collect();
        for (t, &(i, j, l)) in triples.iter().enumerate() {
            if [(i, j), (i, l), (j, l)].iter().any(|k| bad.contains(k)) {
                continue;
            }
            let om_with = |key: (usize, usize), c: usize| -> (f64, f64) {
                let e = &exp[&key];
                let col = om.column(c);
                (e.coeffs.dot(&col), e.coeffs.abs().dot(&col.abs()))
            };
            let (ab, s1) = om_with((i, j), l);
            let (ac, s2) = om_with((i, l), j);
            let (bc, s3) = om_with((j, l), i);
            let value = anchors[t] - ab + ac - bc;
            let scale = anchors[t].abs() + s1 + s2 + s3;
            closed.observe(value.abs(), policy.membership_tol * (1.0 + scale), || format!("triple ({i},{j},{l})"), p);
        }
    }
    Ok(CheckReport::new(vec![expansion, closed]))
}

/// `[(X1, f1), (X2, f2)] = ([X1, X2]_{L0}, rho(X1) f2 - rho(X2) f1 + Omega(X1, X2))`.
pub fn central_extension_bracket<F>(
    a0: &AlgebroidOnL,
    omega: F,
    a: (&SectionTM, &Expr),
    b: (&SectionTM, &Expr),
) -> Result<(SectionTM, Expr)>
where
    F: Fn(&SectionTM, &SectionTM) -> Result<Expr>,
{
    a0.chart().ensure_same(a.0.chart())?;
    a0.chart().ensure_same(b.0.chart())?;
    let s = courant_bracket(a.0, b.0)?;
    let f = a.0.x.apply(b.1) - b.0.x.apply(a.1) + omega(a.0, b.0)?;
    Ok((s, f))
}

/// The identification `L0 x R -> lift(L0)`: `(X + xi, f)` goes to `(X, 0) + (xi, f)`.
pub fn lift_pair(s: &SectionTM, f: &Expr) -> SectionE1 {
    SectionE1 {
        x: s.x.clone(),
        f: Expr::zero(),
        xi: s.xi.clone(),
        g: f.clone(),
    }
}

/// Compares the central-extension bracket by `Omega_{L0}` with the extended
/// Courant bracket of the lifted sections, on frame sections paired with
/// constant and coordinate scalars.
pub fn check_central_extension(l0: &FrameSubbundle, policy: &SamplingPolicy) -> Result<CheckReport> {
    if l0.ambient() != Ambient::Tm {
        return Err(Error::Invalid("central extension needs a subbundle of TM + T*M".into()));
    }
    let a0 = AlgebroidOnL::new(l0.clone());
    let chart = l0.chart();
    let mut sections: Vec<(SectionTM, Expr)> = Vec::new();
    for (i, g) in l0.tm_generators().into_iter().enumerate() {
        sections.push((g.clone(), Expr::zero()));
        sections.push((g, chart.coord_expr(i % chart.dim())));
    }
    sections.push((SectionTM::zero(chart), Expr::one()));

    let mut cond = Condition::new("central extension");
    for (i, a) in sections.iter().enumerate() {
        for (j, b) in sections.iter().enumerate().skip(i + 1) {
            let (s, f) = central_extension_bracket(&a0, omega_l0, (&a.0, &a.1), (&b.0, &b.1))?;
            let ours = lift_pair(&s, &f);
            let theirs = crate::courant::extended_courant_bracket(&lift_pair(&a.0, &a.1), &lift_pair(&b.0, &b.1))?;
            for (slot, (x, y)) in ours.slots().iter().zip(theirs.slots()).enumerate() {
                require_zero(&mut cond, &(x - &y), policy, &format!("sections ({i},{j}), slot {slot}"));
            }
        }
    }
    Ok(CheckReport::single(cond))
}

/// A section of `L x_phi R`: `sum_i a_i(x, t) e_i`, where `t` is the extra coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSection {
    pub coeffs: Vec<Expr>,
}

impl TimeSection {
    pub fn new(coeffs: Vec<Expr>) -> TimeSection {
        TimeSection { coeffs }
    }

    /// `c * e_i`.
    pub fn basis(len: usize, i: usize, c: Expr) -> TimeSection {
        let mut coeffs = vec![Expr::zero(); len];
        coeffs[i] = c;
        TimeSection { coeffs }
    }

    /// The t-dependent section of `L` (t enters as a parameter).
    pub fn section(&self, a: &AlgebroidOnL) -> Result<SectionE1> {
        ensure_len(a, self.coeffs.len(), "time section")?;
        let mut acc = SectionE1::zero(a.chart());
        for (c, g) in self.coeffs.iter().zip(a.gens()) {
            if !c.is_zero_literal() {
                acc = acc.add(&g.scale(c))?;
            }
        }
        Ok(acc)
    }

    pub fn d_dt(&self, t: &str) -> TimeSection {
        TimeSection {
            coeffs: self.coeffs.iter().map(|c| c.differentiate(t)).collect(),
        }
    }
}

/// `[[X, Y]]^phi = [[X_t, Y_t]] + phi(X_t) dY/dt - phi(Y_t) dX/dt`, returned as a t-dependent section of `L`.
pub fn action_algebroid_bracket(a: &AlgebroidOnL, phi: &Cocycle1, t: &str, x: &TimeSection, y: &TimeSection) -> Result<SectionE1> {
    ensure_len(a, phi.values.len(), "cocycle")?;
    let xs = x.section(a)?;
    let ys = y.section(a)?;
    let base = a.bracket(&xs, &ys)?;
    let dy = y.d_dt(t).section(a)?;
    let dx = x.d_dt(t).section(a)?;
    base.add(&dy.scale(&phi.apply(&x.coeffs)))?
        .sub(&dx.scale(&phi.apply(&y.coeffs)))
}

/// `rho^phi(X) = rho(X_t) + phi(X_t) d/dt` on `C x R`.
pub fn action_algebroid_anchor(a: &AlgebroidOnL, phi: &Cocycle1, t: &str, x: &TimeSection) -> Result<VectorField> {
    let chart = a.chart().extend(&format!("{}xR", a.chart().name()), &[t])?;
    let xs = x.section(a)?;
    let dt = VectorField::partial(&chart, chart.dim() - 1);
    embed_field(&xs.x, &chart)?.add(&dt.scale(&phi.apply(&x.coeffs)))
}

// t-dependent base objects become honest objects on the product chart
fn embed_field(x: &VectorField, chart: &Chart) -> Result<VectorField> {
    VectorField::new(chart, {
        let mut c = x.components().to_vec();
        c.resize(chart.dim(), Expr::zero());
        c
    })
}

fn embed_form(xi: &DifferentialForm, chart: &Chart) -> Result<DifferentialForm> {
    DifferentialForm::from_terms(chart, xi.degree(), xi.terms())
}

/// Which identification `L x_phi R -> L~` to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoMap {
    /// `(X, f) + (xi, g)` to `(X + f d/dt) + e^t (xi + g dt)`.
    Standard,
    /// The same map without the `e^t` factor (a negative control).
    WithoutExp,
}

fn psi(s: &SectionE1, chart: &Chart, map: IsoMap) -> Result<SectionTM> {
    let ti = chart.dim() - 1;
    let x = embed_field(&s.x, chart)?.add(&VectorField::partial(chart, ti).scale(&s.f))?;
    let xi = embed_form(&s.xi, chart)?.add(&DifferentialForm::dx(chart, ti).scale(&s.g))?;
    let xi = match map {
        IsoMap::Standard => xi.scale(&chart.coord_expr(ti).exp()),
        IsoMap::WithoutExp => xi,
    };
    Ok(SectionTM { x, xi })
}

/// Checks that the generator-wise map onto the induced structure on `C x R`
/// intertwines the action-algebroid bracket with the Courant bracket, on
/// t-independent and t-linear sections.
pub fn check_action_iso(l: &FrameSubbundle, policy: &SamplingPolicy) -> Result<CheckReport> {
    check_action_iso_with(l, policy, IsoMap::Standard)
}

pub fn check_action_iso_with(l: &FrameSubbundle, policy: &SamplingPolicy, map: IsoMap) -> Result<CheckReport> {
    let phi = extract_cocycle(l)?;
    let a = AlgebroidOnL::new(l.clone());
    let t = l.chart().fresh_name("t");
    let induced = induced_dirac_with_coord(l, &t)?;
    let chart = induced.chart().clone();
    let k = l.len();
    let tt = Expr::coord(&t);

    let mut cases: Vec<(String, TimeSection, TimeSection)> = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i < j {
                cases.push((format!("e{i}, e{j}"), TimeSection::basis(k, i, Expr::one()), TimeSection::basis(k, j, Expr::one())));
            }
            cases.push((format!("t e{i}, e{j}"), TimeSection::basis(k, i, tt.clone()), TimeSection::basis(k, j, Expr::one())));
        }
    }

    let mut cond = Condition::new("action isomorphism");
    for (label, x, y) in &cases {
        let lhs = psi(&action_algebroid_bracket(&a, &phi, &t, x, y)?, &chart, map)?;
        let rhs = courant_bracket(&psi(&x.section(&a)?, &chart, map)?, &psi(&y.section(&a)?, &chart, map)?)?;
        for (slot, d) in lhs.sub(&rhs)?.slots().iter().enumerate() {
            require_zero(&mut cond, d, policy, &format!("{label}, slot {slot}"));
        }
        if !cond.verdict.is_pass() && cond.witnesses.len() >= 3 {
            break;
        }
    }
    Ok(CheckReport::single(cond))
}

/// `rho([[a, b]]) = [rho a, rho b]`, with `[[a, b]]` expanded in the frame.
pub fn check_anchor_morphism(a: &AlgebroidOnL, policy: &SamplingPolicy) -> Result<CheckReport> {
    let gens = a.gens();
    let brackets = a.pair_brackets()?;
    let lie = brackets
        .iter()
        .map(|((i, j), _)| lie_bracket(&gens[*i].x, &gens[*j].x))
        .collect::<Result<Vec<_>>>()?;
    let n = a.chart().dim();
    let mut expansion = Condition::new("frame expansion");
    let mut cond = Condition::new("anchor morphism");
    let samples = sample_into(&mut cond, policy, a.chart().coords(), 0x23, |p| {
        let frame = a.l.frame_at(p)?;
        brackets
            .iter()
            .zip(&lie)
            .map(|((_, b), x)| {
                let e = a.expand(&frame, b, p, policy)?;
                let anchored = frame.rows(0, n) * &e.coeffs;
                let want = DVector::from_vec(x.eval(p)?);
                Ok((e, (&anchored - &want).norm(), want.norm()))
            })
            .collect::<std::result::Result<Vec<_>, EvalError>>()
    });
    for (p, rows) in &samples {
        for (((i, j), _), (e, r, size)) in brackets.iter().zip(rows) {
            if expansion_ok(&mut expansion, e, policy, p, || format!("bracket ({i},{j})")) {
                cond.observe(*r, policy.membership_tol * (1.0 + size), || format!("pair ({i},{j})"), p);
            }
        }
    }
    Ok(CheckReport::new(vec![expansion, cond]))
}

/// Jacobi identity of the restricted bracket on generator triples.
pub fn check_jacobi_identity(a: &AlgebroidOnL, policy: &SamplingPolicy) -> Result<CheckReport> {
    let gens = a.gens();
    let k = gens.len();
    let mut jac = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            for l in j + 1..k {
                let (x, y, z) = (&gens[i], &gens[j], &gens[l]);
                let s = a
                    .bracket(&a.bracket(x, y)?, z)?
                    .add(&a.bracket(&a.bracket(y, z)?, x)?)?
                    .add(&a.bracket(&a.bracket(z, x)?, y)?)?;
                jac.push(((i, j, l), s));
            }
        }
    }
    let mut cond = Condition::new("jacobi identity");
    let samples = sample_into(&mut cond, policy, a.chart().coords(), 0x24, |p| {
        jac.iter()
            .map(|(_, s)| Ok(DVector::from_vec(a.l.section_vector(s, p)?).norm()))
            .collect::<std::result::Result<Vec<_>, EvalError>>()
    });
    for (p, rs) in &samples {
        for ((key, _), r) in jac.iter().zip(rs) {
            cond.observe(*r, policy.membership_tol, || format!("triple {key:?}"), p);
        }
    }
    Ok(CheckReport::single(cond))
}

#[cfg(test)]
mod tests;

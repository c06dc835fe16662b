use super::{Ambient, ConformalFactor, FrameSubbundle};
use crate::courant::{SectionE1, SectionTM};
use crate::error::{Error, Result};
use crate::symcalc::Expr;
use crate::tensor::{
    contract, exterior_derivative, interior_product, sharp, AlternatingTensor, Chart, DifferentialForm,
    Multivector, VectorField,
};

fn need_degree<T: AlternatingTensor>(t: &T, k: usize, what: &str) -> Result<()> {
    if t.degree() == k {
        Ok(())
    } else {
        Err(Error::Degree(format!("{what} must have degree {k}, got {}", t.degree())))
    }
}

fn need_ambient(l: &FrameSubbundle, a: Ambient) -> Result<()> {
    if l.ambient() == a {
        Ok(())
    } else {
        Err(Error::Invalid(format!("expected a subbundle of {a:?}, got {:?}", l.ambient())))
    }
}

/// `L_theta`: `(d_i, 0) + (i_{d_i} d theta, -theta_i)` for each coordinate and `(0, 1) + (theta, 0)`.
pub fn construct_l_theta(theta: &DifferentialForm) -> Result<FrameSubbundle> {
    need_degree(theta, 1, "theta")?;
    let chart = theta.chart();
    let dtheta = exterior_derivative(theta);
    let mut gens = Vec::with_capacity(chart.dim() + 1);
    for i in 0..chart.dim() {
        let e = VectorField::partial(chart, i);
        gens.push(SectionE1 {
            xi: interior_product(&e, &dtheta)?,
            g: -theta.coeff(&[i]),
            x: e,
            f: Expr::zero(),
        });
    }
    gens.push(SectionE1 {
        x: VectorField::zero(chart),
        f: Expr::one(),
        xi: theta.clone(),
        g: Expr::zero(),
    });
    FrameSubbundle::from_e1(chart, gens, chart.dim() + 1)
}

/// Lift of `L0` in `TM + T*M` to `E1`: `(X, 0) + (alpha, 0)` and `(0, 0) + (0, 1)`.
pub fn lift_dirac(l0: &FrameSubbundle) -> Result<FrameSubbundle> {
    need_ambient(l0, Ambient::Tm)?;
    let chart = l0.chart();
    let mut gens: Vec<SectionE1> = l0.tm_generators().iter().map(SectionE1::from_tm).collect();
    gens.push(SectionE1 {
        g: Expr::one(),
        ..SectionE1::zero(chart)
    });
    FrameSubbundle::from_e1(chart, gens, l0.rank() + 1)
}

/// `L_(Lambda, E)`: `(Lambda#(dx^i), -E^i) + (dx^i, 0)` and `(E, 0) + (0, 1)`.
pub fn construct_l_jacobi(lambda: &Multivector, e: &VectorField) -> Result<FrameSubbundle> {
    need_degree(lambda, 2, "Lambda")?;
    let chart = lambda.chart();
    chart.ensure_same(e.chart())?;
    let mut gens = Vec::with_capacity(chart.dim() + 1);
    for i in 0..chart.dim() {
        let dxi = DifferentialForm::dx(chart, i);
        gens.push(SectionE1 {
            x: sharp(lambda, &dxi)?,
            f: -e.component(i),
            xi: dxi,
            g: Expr::zero(),
        });
    }
    gens.push(SectionE1 {
        x: e.clone(),
        f: Expr::zero(),
        xi: DifferentialForm::zero(chart, 1),
        g: Expr::one(),
    });
    FrameSubbundle::from_e1(chart, gens, chart.dim() + 1)
}

/// `L_phi`: `(X, f) + (xi, g)` goes to `(X, f - mu(X)) + (phi (xi + g mu), phi g)`.
pub fn conformal_change(l: &FrameSubbundle, phi: &ConformalFactor) -> Result<FrameSubbundle> {
    need_ambient(l, Ambient::E1)?;
    l.chart().ensure_same(phi.chart())?;
    let gens = l
        .generators()
        .iter()
        .map(|s| {
            Ok(SectionE1 {
                x: s.x.clone(),
                f: &s.f - contract(phi.mu(), &s.x)?,
                xi: s.xi.add(&phi.mu().scale(&s.g))?.scale(phi.phi()),
                g: phi.phi() * &s.g,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    FrameSubbundle::from_e1(l.chart(), gens, l.rank())
}

/// The structure on `C x R` induced by `L` over `C`, with the extra coordinate named `t`
/// (or a fresh variant if `t` is taken).
pub fn induced_dirac_on_mxr(l: &FrameSubbundle) -> Result<FrameSubbundle> {
    let t = l.chart().fresh_name("t");
    induced_dirac_with_coord(l, &t)
}

/// `(X, f) + (xi, g)` goes to `(X + f d/dt) + e^t (xi + g dt)` on `C x R`.
pub fn induced_dirac_with_coord(l: &FrameSubbundle, t: &str) -> Result<FrameSubbundle> {
    need_ambient(l, Ambient::E1)?;
    let base = l.chart();
    let chart = base.extend(&format!("{}xR", base.name()), &[t])?;
    let ti = chart.dim() - 1;
    let et = chart.coord_expr(ti).exp();
    let dt = DifferentialForm::dx(&chart, ti);
    let d_t = VectorField::partial(&chart, ti);
    let gens = l
        .generators()
        .iter()
        .map(|s| {
            Ok(SectionTM {
                x: s.x.embed(&chart)?.add(&d_t.scale(&s.f))?,
                xi: s.xi.embed(&chart)?.add(&dt.scale(&s.g))?.scale(&et),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    FrameSubbundle::from_tm(&chart, gens, chart.dim())
}

/// Graph of a bivector: `Pi#(dx^i) + dx^i`.
pub fn graph_of_bivector(pi: &Multivector) -> Result<FrameSubbundle> {
    need_degree(pi, 2, "Pi")?;
    let chart = pi.chart();
    let gens = (0..chart.dim())
        .map(|i| {
            let dxi = DifferentialForm::dx(chart, i);
            Ok(SectionTM {
                x: sharp(pi, &dxi)?,
                xi: dxi,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    FrameSubbundle::from_tm(chart, gens, chart.dim())
}

/// Graph of a 2-form: `d_i + i_{d_i} omega`.
pub fn graph_of_two_form(omega: &DifferentialForm) -> Result<FrameSubbundle> {
    need_degree(omega, 2, "omega")?;
    let chart: &Chart = omega.chart();
    let gens = (0..chart.dim())
        .map(|i| {
            let e = VectorField::partial(chart, i);
            Ok(SectionTM {
                xi: interior_product(&e, omega)?,
                x: e,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    FrameSubbundle::from_tm(chart, gens, chart.dim())
}

use super::alternating::{AlternatingTensor, Blades, DifferentialForm, Multivector};
use super::fields::{SmoothMap, VectorField};
use crate::error::{Error, Result};
use crate::symcalc::Expr;

/// `d omega`.
pub fn exterior_derivative(omega: &DifferentialForm) -> DifferentialForm {
    let chart = omega.chart();
    let mut out = Blades::zero(omega.degree() + 1);
    for (idx, c) in omega.terms() {
        for j in 0..chart.dim() {
            let dc = c.differentiate(chart.coord(j));
            let mut k = Vec::with_capacity(idx.len() + 1);
            k.push(j);
            k.extend_from_slice(&idx);
            out.accumulate(k, dc);
        }
    }
    DifferentialForm::from_blades(chart.clone(), out)
}

/// `[X, Y]^i = X(Y^i) - Y(X^i)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    x.chart().ensure_same(y.chart())?;
    let comps = (0..x.chart().dim())
        .map(|i| x.apply(y.component(i)) - y.apply(x.component(i)))
        .collect();
    VectorField::new(x.chart(), comps)
}

/// Contraction in the first slot: `(i_X omega)(..) = omega(X, ..)`.
pub fn interior_product(x: &VectorField, omega: &DifferentialForm) -> Result<DifferentialForm> {
    x.chart().ensure_same(omega.chart())?;
    if omega.degree() == 0 {
        return Err(Error::Degree("interior product of a 0-form".into()));
    }
    let mut out = Blades::zero(omega.degree() - 1);
    for (idx, c) in omega.terms() {
        for r in 0..idx.len() {
            let xr = x.component(idx[r]);
            if xr.is_zero_literal() {
                continue;
            }
            let mut rest = idx.clone();
            rest.remove(r);
            let term = &c * xr;
            out.accumulate(rest, if r % 2 == 0 { term } else { -term });
        }
    }
    Ok(DifferentialForm::from_blades(x.chart().clone(), out))
}

/// Lie derivative from the coordinate formula
/// `L_X (c dx^I) = X(c) dx^I + c sum_r dx^{i_1} .. d(X^{i_r}) .. dx^{i_k}`.
pub fn lie_derivative(x: &VectorField, omega: &DifferentialForm) -> Result<DifferentialForm> {
    x.chart().ensure_same(omega.chart())?;
    let chart = x.chart();
    let mut out = Blades::zero(omega.degree());
    for (idx, c) in omega.terms() {
        out.accumulate(idx.clone(), x.apply(&c));
        for r in 0..idx.len() {
            let xr = x.component(idx[r]);
            for j in 0..chart.dim() {
                let dxr = xr.differentiate(chart.coord(j));
                if dxr.is_zero_literal() {
                    continue;
                }
                let mut k = idx.clone();
                k[r] = j;
                out.accumulate(k, &c * &dxr);
            }
        }
    }
    Ok(DifferentialForm::from_blades(chart.clone(), out))
}

/// `F^* omega` for `omega` on the target chart of `F`.
pub fn pullback(f: &SmoothMap, omega: &DifferentialForm) -> Result<DifferentialForm> {
    f.target().ensure_same(omega.chart())?;
    let src = f.source();
    let jac = f.jacobian();
    let d_f: Vec<DifferentialForm> = jac
        .iter()
        .map(|row| {
            DifferentialForm::from_components(src, row.clone())
                .expect("jacobian rows match the source dimension")
        })
        .collect();
    let mut acc = DifferentialForm::zero(src, omega.degree());
    for (idx, c) in omega.terms() {
        let mut term = DifferentialForm::scalar(src, f.pull_function(&c));
        for &i in &idx {
            term = term.wedge(&d_f[i])?;
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// `Lambda^#(alpha)^j = sum_i Lambda^{ij} alpha_i`, so that
/// `beta(Lambda^#(alpha)) = Lambda(alpha, beta)`.
pub fn sharp(lambda: &Multivector, alpha: &DifferentialForm) -> Result<VectorField> {
    lambda.chart().ensure_same(alpha.chart())?;
    if lambda.degree() != 2 || alpha.degree() != 1 {
        return Err(Error::Degree(format!(
            "sharp needs a bivector and a 1-form, got degrees {} and {}",
            lambda.degree(),
            alpha.degree()
        )));
    }
    let n = lambda.chart().dim();
    let comps = (0..n)
        .map(|j| {
            Expr::sum((0..n).filter(|&i| i != j).map(|i| lambda.coeff(&[i, j]) * alpha.coeff(&[i])))
        })
        .collect();
    VectorField::new(lambda.chart(), comps)
}

/// Evaluates a 1-form on a vector field: `alpha(X)`.
pub fn contract(alpha: &DifferentialForm, x: &VectorField) -> Result<Expr> {
    if alpha.degree() != 1 {
        return Err(Error::Degree(format!("expected a 1-form, got degree {}", alpha.degree())));
    }
    Ok(interior_product(x, alpha)?.as_scalar())
}

/// A vector field viewed as a 1-vector.
pub fn to_multivector(x: &VectorField) -> Multivector {
    Multivector::from_components(x.chart(), x.components().to_vec())
        .expect("component count matches the chart")
}

/// A 1-vector viewed as a vector field.
pub fn to_vector_field(m: &Multivector) -> Result<VectorField> {
    if m.degree() != 1 {
        return Err(Error::Degree(format!("expected a 1-vector, got degree {}", m.degree())));
    }
    VectorField::new(m.chart(), m.components())
}

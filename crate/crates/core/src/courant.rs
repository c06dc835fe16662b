//! Pairings and brackets on `TM + T*M` and on `E1(M) = (TM x R) + (T*M x R)`.

use crate::error::{Error, Result};
use crate::symcalc::{EvalError, Expr, Point};
use crate::tensor::{
    contract, exterior_derivative, interior_product, lie_bracket, lie_derivative, AlternatingTensor,
    Chart, DifferentialForm, VectorField,
};

fn ensure_one_form(xi: &DifferentialForm) -> Result<()> {
    if xi.degree() == 1 {
        Ok(())
    } else {
        Err(Error::Degree(format!("section needs a 1-form, got degree {}", xi.degree())))
    }
}

/// A section `X + xi` of `TM + T*M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionTM {
    pub x: VectorField,
    pub xi: DifferentialForm,
}

impl SectionTM {
    pub fn new(x: VectorField, xi: DifferentialForm) -> Result<SectionTM> {
        x.chart().ensure_same(xi.chart())?;
        ensure_one_form(&xi)?;
        Ok(SectionTM { x, xi })
    }

    pub fn zero(chart: &Chart) -> SectionTM {
        SectionTM {
            x: VectorField::zero(chart),
            xi: DifferentialForm::zero(chart, 1),
        }
    }

    pub fn chart(&self) -> &Chart {
        self.x.chart()
    }

    pub fn scale(&self, h: &Expr) -> SectionTM {
        SectionTM {
            x: self.x.scale(h),
            xi: self.xi.scale(h),
        }
    }

    pub fn add(&self, other: &SectionTM) -> Result<SectionTM> {
        Ok(SectionTM {
            x: self.x.add(&other.x)?,
            xi: self.xi.add(&other.xi)?,
        })
    }

    pub fn sub(&self, other: &SectionTM) -> Result<SectionTM> {
        self.add(&other.scale(&Expr::int(-1)))
    }

    /// Numeric value `[X^1..X^n, xi_1..xi_n]`.
    pub fn eval(&self, p: &Point) -> std::result::Result<Vec<f64>, EvalError> {
        let mut v = self.x.eval(p)?;
        v.extend(self.xi.eval_components(p)?);
        Ok(v)
    }

    /// All component expressions, in the order of [`SectionTM::eval`].
    pub fn slots(&self) -> Vec<Expr> {
        let mut v = self.x.components().to_vec();
        v.extend(self.xi.components());
        v
    }
}

/// A section `(X, f) + (xi, g)` of `E1(M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionE1 {
    pub x: VectorField,
    pub f: Expr,
    pub xi: DifferentialForm,
    pub g: Expr,
}

impl SectionE1 {
    pub fn new(x: VectorField, f: Expr, xi: DifferentialForm, g: Expr) -> Result<SectionE1> {
        x.chart().ensure_same(xi.chart())?;
        ensure_one_form(&xi)?;
        for e in [&f, &g] {
            if let Some(s) = e.free_symbols().iter().find(|s| x.chart().index_of(s).is_none()) {
                return Err(Error::UnknownSymbol(s.to_string()));
            }
        }
        Ok(SectionE1 { x, f, xi, g })
    }

    pub fn zero(chart: &Chart) -> SectionE1 {
        SectionE1 {
            x: VectorField::zero(chart),
            f: Expr::zero(),
            xi: DifferentialForm::zero(chart, 1),
            g: Expr::zero(),
        }
    }

    /// `(X, 0) + (xi, 0)`.
    pub fn from_tm(s: &SectionTM) -> SectionE1 {
        SectionE1 {
            x: s.x.clone(),
            f: Expr::zero(),
            xi: s.xi.clone(),
            g: Expr::zero(),
        }
    }

    /// The `TM + T*M` part, dropping both scalar slots.
    pub fn tm_part(&self) -> SectionTM {
        SectionTM {
            x: self.x.clone(),
            xi: self.xi.clone(),
        }
    }

    pub fn chart(&self) -> &Chart {
        self.x.chart()
    }

    pub fn scale(&self, h: &Expr) -> SectionE1 {
        SectionE1 {
            x: self.x.scale(h),
            f: &self.f * h,
            xi: self.xi.scale(h),
            g: &self.g * h,
        }
    }

    pub fn add(&self, other: &SectionE1) -> Result<SectionE1> {
        Ok(SectionE1 {
            x: self.x.add(&other.x)?,
            f: &self.f + &other.f,
            xi: self.xi.add(&other.xi)?,
            g: &self.g + &other.g,
        })
    }

    pub fn sub(&self, other: &SectionE1) -> Result<SectionE1> {
        self.add(&other.scale(&Expr::int(-1)))
    }

    /// Numeric value `[X^1..X^n, f, xi_1..xi_n, g]`.
    pub fn eval(&self, p: &Point) -> std::result::Result<Vec<f64>, EvalError> {
        let mut v = self.x.eval(p)?;
        v.push(p.eval(&self.f)?);
        v.extend(self.xi.eval_components(p)?);
        v.push(p.eval(&self.g)?);
        Ok(v)
    }

    /// All component expressions, in the order of [`SectionE1::eval`].
    pub fn slots(&self) -> Vec<Expr> {
        let mut v = self.x.components().to_vec();
        v.push(self.f.clone());
        v.extend(self.xi.components());
        v.push(self.g.clone());
        v
    }
}

fn half() -> Expr {
    Expr::rational(1, 2)
}

/// `<X1+xi1, X2+xi2> = (xi1(X2) + xi2(X1)) / 2`.
pub fn pairing_tm(a: &SectionTM, b: &SectionTM) -> Result<Expr> {
    a.chart().ensure_same(b.chart())?;
    Ok(half() * (contract(&a.xi, &b.x)? + contract(&b.xi, &a.x)?))
}

/// `[X1+xi1, X2+xi2] = [X1,X2] + L_{X1} xi2 - i_{X2} d xi1` (not skew).
pub fn courant_bracket(a: &SectionTM, b: &SectionTM) -> Result<SectionTM> {
    a.chart().ensure_same(b.chart())?;
    let x = lie_bracket(&a.x, &b.x)?;
    let xi = lie_derivative(&a.x, &b.xi)?.sub(&interior_product(&b.x, &exterior_derivative(&a.xi))?)?;
    Ok(SectionTM { x, xi })
}

/// `<(X1,f1)+(xi1,g1), (X2,f2)+(xi2,g2)> = (xi1(X2) + xi2(X1) + f1 g2 + f2 g1) / 2`.
pub fn pairing_e1(a: &SectionE1, b: &SectionE1) -> Result<Expr> {
    a.chart().ensure_same(b.chart())?;
    Ok(half() * (contract(&a.xi, &b.x)? + contract(&b.xi, &a.x)? + &a.f * &b.g + &b.f * &a.g))
}

/// The skew bracket on `E1(M)`:
///
/// ```text
/// X  = [X1, X2]
/// f  = X1(f2) - X2(f1)
/// xi = L_{X1} xi2 - L_{X2} xi1 + d(i_{X2} xi1 - i_{X1} xi2)/2 + f1 xi2 - f2 xi1
///      + (g2 df1 - g1 df2 - f1 dg2 + f2 dg1)/2
/// g  = X1(g2) - X2(g1) + (i_{X2} xi1 - i_{X1} xi2 - f2 g1 + f1 g2)/2
/// ```
pub fn extended_courant_bracket(a: &SectionE1, b: &SectionE1) -> Result<SectionE1> {
    a.chart().ensure_same(b.chart())?;
    let chart = a.chart();
    let d = |e: &Expr| exterior_derivative(&DifferentialForm::scalar(chart, e.clone()));
    let i21 = contract(&a.xi, &b.x)?;
    let i12 = contract(&b.xi, &a.x)?;
    let skew = &i21 - &i12;

    let x = lie_bracket(&a.x, &b.x)?;
    let f = a.x.apply(&b.f) - b.x.apply(&a.f);
    let xi = lie_derivative(&a.x, &b.xi)?
        .sub(&lie_derivative(&b.x, &a.xi)?)?
        .add(&d(&skew).scale(&half()))?
        .add(&b.xi.scale(&a.f))?
        .sub(&a.xi.scale(&b.f))?
        .add(
            &d(&a.f)
                .scale(&b.g)
                .sub(&d(&b.f).scale(&a.g))?
                .sub(&d(&b.g).scale(&a.f))?
                .add(&d(&a.g).scale(&b.f))?
                .scale(&half()),
        )?;
    let g = a.x.apply(&b.g) - b.x.apply(&a.g) + half() * (skew - &b.f * &a.g + &a.f * &b.g);
    Ok(SectionE1 { x, f, xi, g })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcalc::{is_zero, SamplingPolicy};

    fn r(names: &[&str]) -> Chart {
        Chart::new("M", names).unwrap()
    }

    fn tm(c: &Chart, x: &[&str], xi: &[&str]) -> SectionTM {
        SectionTM::new(
            VectorField::new(c, x.iter().map(|e| c.parse(e).unwrap()).collect()).unwrap(),
            DifferentialForm::from_components(c, xi.iter().map(|e| c.parse(e).unwrap()).collect()).unwrap(),
        )
        .unwrap()
    }

    fn e1(c: &Chart, x: &[&str], f: &str, xi: &[&str], g: &str) -> SectionE1 {
        let s = tm(c, x, xi);
        SectionE1::new(s.x, c.parse(f).unwrap(), s.xi, c.parse(g).unwrap()).unwrap()
    }

    #[test]
    fn pairing_tm_examples() {
        let c = r(&["x"]);
        assert_eq!(pairing_tm(&tm(&c, &["1"], &["1"]), &tm(&c, &["1"], &["1"])).unwrap(), Expr::one());
        let got = pairing_tm(&tm(&c, &["1"], &["x"]), &tm(&c, &["1"], &["1"])).unwrap();
        // oracle: xi1(X2) = x, xi2(X1) = 1, evaluated at samples
        for v in [-1.5, 0.0, 0.25, 1.75] {
            let p = Point::from_pairs(&[("x", v)]);
            assert!((p.eval(&got).unwrap() - (v + 1.0) / 2.0).abs() < 1e-15);
        }
        let c2 = r(&["x", "y"]);
        assert!(pairing_tm(&tm(&c2, &["y", "1"], &["0", "0"]), &tm(&c2, &["x^2", "x"], &["0", "0"]))
            .unwrap()
            .is_zero_literal());
    }

    #[test]
    fn courant_bracket_examples() {
        let c = r(&["x"]);
        let got = courant_bracket(&tm(&c, &["1"], &["0"]), &tm(&c, &["0"], &["x"])).unwrap();
        assert_eq!(got, tm(&c, &["0"], &["1"]));
        let c2 = r(&["x", "y"]);
        let z = courant_bracket(&tm(&c2, &["0", "0"], &["y", "x^2"]), &tm(&c2, &["0", "0"], &["x*y", "1"])).unwrap();
        assert_eq!(z, SectionTM::zero(&c2));
        let z = courant_bracket(&tm(&c2, &["1", "0"], &["0", "0"]), &tm(&c2, &["0", "1"], &["0", "0"])).unwrap();
        assert_eq!(z, SectionTM::zero(&c2));
    }

    #[test]
    fn pairing_e1_examples() {
        let c = r(&["x"]);
        let a = e1(&c, &["1"], "0", &["1"], "0");
        assert_eq!(pairing_e1(&a, &a).unwrap(), Expr::one());
        let got = pairing_e1(&e1(&c, &["0"], "1", &["0"], "0"), &e1(&c, &["0"], "0", &["0"], "1")).unwrap();
        // oracle: only f1 g2 = 1 survives, halved
        assert_eq!(got, Expr::rational(1, 2));
        let c2 = r(&["x", "y"]);
        let z = pairing_e1(&e1(&c2, &["y", "1"], "x", &["0", "0"], "0"), &e1(&c2, &["1", "x"], "y^2", &["0", "0"], "0"));
        assert!(z.unwrap().is_zero_literal());
    }

    #[test]
    fn extended_bracket_examples() {
        let c = r(&["x"]);
        let a = e1(&c, &["1"], "0", &["0"], "0");
        let b = e1(&c, &["0"], "0", &["x"], "0");
        let got = extended_courant_bracket(&a, &b).unwrap();
        assert_eq!(got, e1(&c, &["0"], "0", &["1/2"], "-x/2"));
        // oracle: every displayed term evaluated separately at samples
        for v in [-1.2, 0.3, 1.9] {
            let p = Point::from_pairs(&[("x", v)]);
            // L_{d/dx}(x dx) = dx, i_{X2}xi1 = 0, i_{X1}xi2 = x, d(0 - x)/2 = -dx/2
            let xi_expected = 1.0 - 0.5;
            let g_expected = 0.5 * (0.0 - v);
            let vals = got.eval(&p).unwrap();
            assert!((vals[2] - xi_expected).abs() < 1e-15 && (vals[3] - g_expected).abs() < 1e-15);
        }
        let u = e1(&c, &["0"], "1", &["0"], "0");
        assert_eq!(extended_courant_bracket(&u, &u).unwrap(), SectionE1::zero(&c));
    }

    #[test]
    fn restriction_to_tm_differs_by_exact_term() {
        // on f = g = 0, ext = courant - d<a,b>, the symmetric correction
        let c = r(&["x", "y"]);
        let a = tm(&c, &["x*y", "1"], &["y^2", "x"]);
        let b = tm(&c, &["0", "x^2"], &["sin(x)", "y"]);
        let ext = extended_courant_bracket(&SectionE1::from_tm(&a), &SectionE1::from_tm(&b)).unwrap();
        let cou = courant_bracket(&a, &b).unwrap();
        let corr = exterior_derivative(&DifferentialForm::scalar(&c, pairing_tm(&a, &b).unwrap()));
        let expected = SectionTM::new(cou.x, cou.xi.sub(&corr).unwrap()).unwrap();
        let diff = ext.tm_part().sub(&expected).unwrap();
        let pol = SamplingPolicy::default();
        assert!(diff.slots().iter().all(|e| is_zero(e, &pol).holds()));
        assert!(ext.f.is_zero_literal());
    }

    #[test]
    fn chart_mismatch_is_an_error() {
        let a = SectionTM::zero(&r(&["x"]));
        let b = SectionTM::zero(&Chart::new("N", &["y"]).unwrap());
        assert!(matches!(courant_bracket(&a, &b), Err(Error::ChartMismatch { .. })));
        assert!(pairing_e1(&SectionE1::from_tm(&a), &SectionE1::from_tm(&b)).is_err());
    }
}

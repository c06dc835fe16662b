use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::chart::Chart;
use crate::error::{Error, Result};
use crate::symcalc::{EvalError, Expr, Point};

/// Sorts an index list, returning the permutation sign; `None` if an index repeats.
pub(crate) fn sort_with_sign(mut idx: Vec<usize>) -> Option<(Vec<usize>, i64)> {
    let mut sign = 1;
    // insertion sort, counting transpositions
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((idx, sign))
    }
}

/// Sparse antisymmetric coefficient table over strictly increasing index tuples.
#[derive(Clone, PartialEq, Eq, Debug)]
#[doc(hidden)]
pub struct Blades {
    pub(crate) degree: usize,
    pub(crate) coeffs: BTreeMap<Vec<usize>, Expr>,
}

impl Blades {
    pub(crate) fn zero(degree: usize) -> Blades {
        Blades {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// Adds `c` to the coefficient of the (possibly unsorted) index tuple.
    pub(crate) fn accumulate(&mut self, idx: Vec<usize>, c: Expr) {
        if c.is_zero_literal() {
            return;
        }
        let Some((idx, sign)) = sort_with_sign(idx) else {
            return;
        };
        let c = if sign < 0 { -c } else { c };
        let sum = match self.coeffs.remove(&idx) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero_literal() {
            self.coeffs.insert(idx, sum);
        }
    }

    pub(crate) fn get(&self, idx: &[usize]) -> Expr {
        match sort_with_sign(idx.to_vec()) {
            None => Expr::zero(),
            Some((sorted, sign)) => match self.coeffs.get(&sorted) {
                None => Expr::zero(),
                Some(c) if sign < 0 => -c,
                Some(c) => c.clone(),
            },
        }
    }

    pub(crate) fn add(&self, other: &Blades) -> Blades {
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.accumulate(k.clone(), v.clone());
        }
        out
    }

    pub(crate) fn map<F: Fn(&Expr) -> Expr>(&self, f: F) -> Blades {
        let mut out = Blades::zero(self.degree);
        for (k, v) in &self.coeffs {
            out.accumulate(k.clone(), f(v));
        }
        out
    }

    pub(crate) fn wedge(&self, other: &Blades) -> Blades {
        let mut out = Blades::zero(self.degree + other.degree);
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                let mut idx = i.clone();
                idx.extend_from_slice(j);
                out.accumulate(idx, a * b);
            }
        }
        out
    }
}

/// Shared interface of differential forms and multivectors.
pub trait AlternatingTensor: Sized + Clone {
    fn chart(&self) -> &Chart;
    fn degree(&self) -> usize;
    #[doc(hidden)]
    fn blades(&self) -> &Blades;
    #[doc(hidden)]
    fn from_blades(chart: Chart, blades: Blades) -> Self;

    /// Coefficient of the given index tuple (any order; sign applied).
    fn coeff(&self, idx: &[usize]) -> Expr {
        self.blades().get(idx)
    }

    /// Nonzero coefficients over strictly increasing tuples.
    fn terms(&self) -> Vec<(Vec<usize>, Expr)> {
        self.blades()
            .coeffs
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    fn is_zero_literal(&self) -> bool {
        self.blades().coeffs.is_empty()
    }

    fn map_coeffs<F: Fn(&Expr) -> Expr>(&self, f: F) -> Self {
        Self::from_blades(self.chart().clone(), self.blades().map(f))
    }

    fn scale(&self, f: &Expr) -> Self {
        self.map_coeffs(|c| c * f)
    }

    fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    fn add(&self, other: &Self) -> Result<Self> {
        self.chart().ensure_same(other.chart())?;
        if self.degree() != other.degree() {
            return Err(Error::Degree(format!(
                "cannot add degree {} and degree {}",
                self.degree(),
                other.degree()
            )));
        }
        Ok(Self::from_blades(
            self.chart().clone(),
            self.blades().add(other.blades()),
        ))
    }

    fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }
}

fn build_blades<S: AsRef<str>>(
    chart: &Chart,
    degree: usize,
    terms: impl IntoIterator<Item = (Vec<usize>, Expr)>,
    _kind: S,
) -> Result<Blades> {
    if degree > chart.dim() {
        return Err(Error::Degree(format!(
            "degree {degree} exceeds dimension {}",
            chart.dim()
        )));
    }
    let mut b = Blades::zero(degree);
    for (idx, c) in terms {
        if idx.len() != degree || idx.iter().any(|&i| i >= chart.dim()) {
            return Err(Error::Degree(format!(
                "index tuple {idx:?} invalid for degree {degree} on {chart:?}"
            )));
        }
        b.accumulate(idx, c);
    }
    Ok(b)
}

macro_rules! alternating_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, PartialEq, Eq, Debug)]
        pub struct $name {
            chart: Chart,
            blades: Blades,
        }

        impl AlternatingTensor for $name {
            fn chart(&self) -> &Chart {
                &self.chart
            }
            fn degree(&self) -> usize {
                self.blades.degree
            }
            fn blades(&self) -> &Blades {
                &self.blades
            }
            fn from_blades(chart: Chart, blades: Blades) -> Self {
                $name { chart, blades }
            }
        }

        impl $name {
            pub fn zero(chart: &Chart, degree: usize) -> Self {
                $name {
                    chart: chart.clone(),
                    blades: Blades::zero(degree),
                }
            }

            /// Builds from (index tuple, coefficient) pairs; tuples may be unsorted
            /// (antisymmetry is applied) and repeated tuples accumulate.
            pub fn from_terms(
                chart: &Chart,
                degree: usize,
                terms: impl IntoIterator<Item = (Vec<usize>, Expr)>,
            ) -> Result<Self> {
                Ok($name {
                    chart: chart.clone(),
                    blades: build_blades(chart, degree, terms, stringify!($name))?,
                })
            }

            /// Degree-1 object from one component per coordinate.
            pub fn from_components(chart: &Chart, comps: Vec<Expr>) -> Result<Self> {
                if comps.len() != chart.dim() {
                    return Err(Error::Degree(format!(
                        "expected {} components, got {}",
                        chart.dim(),
                        comps.len()
                    )));
                }
                Self::from_terms(chart, 1, comps.into_iter().enumerate().map(|(i, c)| (vec![i], c)))
            }

            /// Coefficients of a degree-1 object, one per coordinate.
            pub fn components(&self) -> Vec<Expr> {
                (0..self.chart.dim()).map(|i| self.coeff(&[i])).collect()
            }

            /// Numeric components of a degree-1 object at `p`.
            pub fn eval_components(&self, p: &Point) -> std::result::Result<Vec<f64>, EvalError> {
                (0..self.chart.dim()).map(|i| p.eval(&self.coeff(&[i]))).collect()
            }

            /// Antisymmetric matrix of a degree-2 object at `p`.
            pub fn eval_matrix(&self, p: &Point) -> std::result::Result<DMatrix<f64>, EvalError> {
                let n = self.chart.dim();
                let mut m = DMatrix::zeros(n, n);
                for (idx, c) in &self.blades.coeffs {
                    if idx.len() == 2 {
                        let v = p.eval(c)?;
                        m[(idx[0], idx[1])] = v;
                        m[(idx[1], idx[0])] = -v;
                    }
                }
                Ok(m)
            }

            pub fn wedge(&self, other: &Self) -> Result<Self> {
                wedge(self, other)
            }

            /// The same object on a chart containing every coordinate of this one.
            pub fn embed(&self, chart: &Chart) -> Result<Self> {
                let map = super::chart::index_map(&self.chart, chart)?;
                let mut b = Blades::zero(self.blades.degree);
                for (idx, c) in &self.blades.coeffs {
                    b.accumulate(idx.iter().map(|&i| map[i]).collect(), c.clone());
                }
                Ok($name {
                    chart: chart.clone(),
                    blades: b,
                })
            }
        }
    };
}

alternating_type!(
    /// A differential k-form `sum_I c_I dx^I` on a chart.
    DifferentialForm
);
alternating_type!(
    /// A k-vector field `sum_I c_I d/dx^I` on a chart.
    Multivector
);

impl DifferentialForm {
    pub fn scalar(chart: &Chart, f: Expr) -> DifferentialForm {
        let mut b = Blades::zero(0);
        b.accumulate(Vec::new(), f);
        DifferentialForm {
            chart: chart.clone(),
            blades: b,
        }
    }

    /// The coordinate 1-form `dx^i`.
    pub fn dx(chart: &Chart, i: usize) -> DifferentialForm {
        let mut b = Blades::zero(1);
        b.accumulate(vec![i], Expr::one());
        DifferentialForm {
            chart: chart.clone(),
            blades: b,
        }
    }

    /// The function of a degree-0 form.
    pub fn as_scalar(&self) -> Expr {
        self.coeff(&[])
    }
}

impl Multivector {
    /// The coordinate vector `d/dx^i` as a 1-vector.
    pub fn partial(chart: &Chart, i: usize) -> Multivector {
        let mut b = Blades::zero(1);
        b.accumulate(vec![i], Expr::one());
        Multivector {
            chart: chart.clone(),
            blades: b,
        }
    }
}

/// Graded-antisymmetric product of two forms or two multivectors on one chart.
pub fn wedge<T: AlternatingTensor>(a: &T, b: &T) -> Result<T> {
    a.chart().ensure_same(b.chart())?;
    Ok(T::from_blades(a.chart().clone(), a.blades().wedge(b.blades())))
}

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::chart::Chart;
use crate::error::{Error, Result};
use crate::symcalc::{EvalError, Expr, Point};

/// A vector field `sum_i X^i d/dx^i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorField {
    chart: Chart,
    comps: Vec<Expr>,
}

impl VectorField {
    pub fn new(chart: &Chart, comps: Vec<Expr>) -> Result<VectorField> {
        if comps.len() != chart.dim() {
            return Err(Error::Degree(format!(
                "vector field on {chart:?} needs {} components, got {}",
                chart.dim(),
                comps.len()
            )));
        }
        Ok(VectorField {
            chart: chart.clone(),
            comps,
        })
    }

    pub fn zero(chart: &Chart) -> VectorField {
        VectorField {
            chart: chart.clone(),
            comps: vec![Expr::zero(); chart.dim()],
        }
    }

    /// The coordinate field `d/dx^i`.
    pub fn partial(chart: &Chart, i: usize) -> VectorField {
        let mut v = VectorField::zero(chart);
        v.comps[i] = Expr::one();
        v
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &Expr {
        &self.comps[i]
    }

    pub fn is_zero_literal(&self) -> bool {
        self.comps.iter().all(Expr::is_zero_literal)
    }

    /// Directional derivative `X(f)`.
    pub fn apply(&self, f: &Expr) -> Expr {
        Expr::sum(
            self.comps
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero_literal())
                .map(|(i, c)| c * f.differentiate(self.chart.coord(i))),
        )
    }

    pub fn map_components<F: Fn(&Expr) -> Expr>(&self, f: F) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            comps: self.comps.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, f: &Expr) -> VectorField {
        self.map_components(|c| c * f)
    }

    pub fn neg(&self) -> VectorField {
        self.map_components(|c| -c)
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        self.chart.ensure_same(&other.chart)?;
        Ok(VectorField {
            chart: self.chart.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        self.add(&other.neg())
    }

    pub fn eval(&self, p: &Point) -> std::result::Result<Vec<f64>, EvalError> {
        self.comps.iter().map(|c| p.eval(c)).collect()
    }

    /// The same field on a chart containing every coordinate of this one;
    /// components along the extra coordinates are zero.
    pub fn embed(&self, chart: &Chart) -> Result<VectorField> {
        let map = super::chart::index_map(&self.chart, chart)?;
        let mut comps = vec![Expr::zero(); chart.dim()];
        for (i, c) in self.comps.iter().enumerate() {
            comps[map[i]] = c.clone();
        }
        Ok(VectorField {
            chart: chart.clone(),
            comps,
        })
    }
}

/// A map between charts given by one expression per target coordinate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SmoothMap {
    source: Chart,
    target: Chart,
    comps: Vec<Expr>,
}

impl SmoothMap {
    pub fn new(source: &Chart, target: &Chart, comps: Vec<Expr>) -> Result<SmoothMap> {
        if comps.len() != target.dim() {
            return Err(Error::Degree(format!(
                "map into {target:?} needs {} components, got {}",
                target.dim(),
                comps.len()
            )));
        }
        for c in &comps {
            if let Some(s) = c.free_symbols().iter().find(|s| source.index_of(s).is_none()) {
                return Err(Error::UnknownSymbol(s.to_string()));
            }
        }
        Ok(SmoothMap {
            source: source.clone(),
            target: target.clone(),
            comps,
        })
    }

    pub fn identity(chart: &Chart) -> SmoothMap {
        SmoothMap {
            source: chart.clone(),
            target: chart.clone(),
            comps: (0..chart.dim()).map(|i| chart.coord_expr(i)).collect(),
        }
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &Expr {
        &self.comps[i]
    }

    /// `f o F` for an expression `f` in target coordinates.
    pub fn pull_function(&self, f: &Expr) -> Expr {
        let target = &self.target;
        f.substitute(&|name: &str| target.index_of(name).map(|i| self.comps[i].clone()))
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &SmoothMap) -> Result<SmoothMap> {
        inner.target.ensure_same(&self.source)?;
        Ok(SmoothMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            comps: self.comps.iter().map(|c| inner.pull_function(c)).collect(),
        })
    }

    /// Symbolic Jacobian, `jac[i][j] = dF^i / dx^j`.
    pub fn jacobian(&self) -> Vec<Vec<Expr>> {
        self.comps
            .iter()
            .map(|c| {
                self.source
                    .coords()
                    .iter()
                    .map(|x| c.differentiate(x))
                    .collect()
            })
            .collect()
    }

    pub fn jacobian_at(&self, p: &Point) -> std::result::Result<DMatrix<f64>, EvalError> {
        let jac = self.jacobian();
        let mut m = DMatrix::zeros(self.target.dim(), self.source.dim());
        for (i, row) in jac.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                m[(i, j)] = p.eval(e)?;
            }
        }
        Ok(m)
    }

    /// Image point, labelled by target coordinates.
    pub fn apply(&self, p: &Point) -> std::result::Result<Point, EvalError> {
        let values = self
            .comps
            .iter()
            .map(|c| p.eval(c))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let names: Arc<[Arc<str>]> = self.target.coords().iter().cloned().collect();
        Ok(Point::new(names, values))
    }
}

/// `dF_p(v)`.
pub fn pushforward_at_point(f: &SmoothMap, p: &Point, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != f.source().dim() {
        return Err(Error::Degree(format!(
            "tangent vector has {} entries; source dimension is {}",
            v.len(),
            f.source().dim()
        )));
    }
    let j = f.jacobian_at(p)?;
    Ok((j * DVector::from_column_slice(v)).iter().cloned().collect())
}

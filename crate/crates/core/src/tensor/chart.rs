use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::symcalc::{self, Expr};

#[derive(PartialEq, Eq, Hash)]
struct ChartInner {
    name: String,
    coords: Vec<Arc<str>>,
}

/// An open box in R^n with named coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chart(Arc<ChartInner>);

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.0.name, self.coord_names().join(","))
    }
}

impl Chart {
    pub fn new<S: AsRef<str>>(name: &str, coords: &[S]) -> Result<Chart> {
        if coords.is_empty() {
            return Err(Error::InvalidChart(format!("chart `{name}` has no coordinates")));
        }
        let mut seen: Vec<Arc<str>> = Vec::with_capacity(coords.len());
        for c in coords {
            let c = c.as_ref();
            let valid = c
                .chars()
                .next()
                .map(|h| h.is_ascii_alphabetic() || h == '_')
                .unwrap_or(false)
                && c.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_');
            if !valid || matches!(c, "exp" | "ln" | "sin" | "cos") {
                return Err(Error::InvalidChart(format!("bad coordinate name `{c}`")));
            }
            if seen.iter().any(|s| &**s == c) {
                return Err(Error::InvalidChart(format!("duplicate coordinate `{c}` in `{name}`")));
            }
            seen.push(Arc::from(c));
        }
        Ok(Chart(Arc::new(ChartInner {
            name: name.to_string(),
            coords: seen,
        })))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn dim(&self) -> usize {
        self.0.coords.len()
    }

    pub fn coords(&self) -> &[Arc<str>] {
        &self.0.coords
    }

    pub fn coord(&self, i: usize) -> &str {
        &self.0.coords[i]
    }

    pub fn coord_names(&self) -> Vec<&str> {
        self.0.coords.iter().map(|c| &**c).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.coords.iter().position(|c| &**c == name)
    }

    pub fn coord_expr(&self, i: usize) -> Expr {
        Expr::coord(&self.0.coords[i])
    }

    /// This chart with extra coordinates appended.
    pub fn extend<S: AsRef<str>>(&self, name: &str, extra: &[S]) -> Result<Chart> {
        let mut all: Vec<String> = self.coord_names().iter().map(|s| s.to_string()).collect();
        all.extend(extra.iter().map(|s| s.as_ref().to_string()));
        Chart::new(name, &all)
    }

    /// Product chart; coordinate names must be disjoint.
    pub fn product(&self, other: &Chart, name: &str) -> Result<Chart> {
        self.extend(name, &other.coord_names())
    }

    /// Copy with every coordinate renamed `c` -> `c{suffix}`.
    pub fn suffixed(&self, name: &str, suffix: &str) -> Result<Chart> {
        let renamed: Vec<String> = self
            .coord_names()
            .iter()
            .map(|c| format!("{c}{suffix}"))
            .collect();
        Chart::new(name, &renamed)
    }

    /// Parses an expression whose free symbols must be coordinates of this chart.
    pub fn parse(&self, text: &str) -> Result<Expr> {
        symcalc::parse(text, &self.coord_names())
    }

    /// A coordinate name based on `base` that is not used by this chart.
    pub fn fresh_name(&self, base: &str) -> String {
        let mut name = base.to_string();
        while self.index_of(&name).is_some() {
            name.push('_');
        }
        name
    }

    pub fn ensure_same(&self, other: &Chart) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ChartMismatch {
                expected: format!("{self:?}"),
                found: format!("{other:?}"),
            })
        }
    }
}

/// Position in `to` of each coordinate of `from`.
pub(crate) fn index_map(from: &Chart, to: &Chart) -> Result<Vec<usize>> {
    from.coords()
        .iter()
        .map(|c| {
            to.index_of(c).ok_or_else(|| Error::ChartMismatch {
                expected: format!("{from:?}"),
                found: format!("{to:?}"),
            })
        })
        .collect()
}

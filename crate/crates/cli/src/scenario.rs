//! Declarative scenario files.
//!
//! A scenario is a TOML document. Objects are declared in sections that are
//! processed in a fixed order (charts, expressions, vectors, forms,
//! multivectors, maps, structures, groupoids, checks); a reference may only
//! point at something declared in an earlier section, or earlier in the same
//! section. Expressions are strings in the symbolic grammar, parsed on the
//! chart of the object they belong to.

use std::collections::BTreeMap;

use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub scenario: Meta,
    #[serde(default)]
    pub sampling: SamplingSection,
    #[serde(default, rename = "chart")]
    pub charts: Vec<ChartDecl>,
    #[serde(default, rename = "expr")]
    pub exprs: Vec<ExprDecl>,
    #[serde(default, rename = "vector")]
    pub vectors: Vec<VectorDecl>,
    #[serde(default, rename = "form")]
    pub forms: Vec<TensorDecl>,
    #[serde(default, rename = "multivector")]
    pub multivectors: Vec<TensorDecl>,
    #[serde(default, rename = "map")]
    pub maps: Vec<MapDecl>,
    #[serde(default, rename = "structure")]
    pub structures: Vec<StructureDecl>,
    #[serde(default, rename = "groupoid")]
    pub groupoids: Vec<GroupoidDecl>,
    #[serde(default, rename = "check")]
    pub checks: Vec<CheckDecl>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    pub name: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    /// Sets both the absolute and relative zero tolerance.
    pub tol: Option<f64>,
    pub low: Option<f64>,
    pub high: Option<f64>,
    pub membership_tol: Option<f64>,
    pub rank_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartDecl {
    pub name: String,
    pub coords: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExprDecl {
    pub name: String,
    pub chart: String,
    pub value: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorDecl {
    pub name: String,
    pub chart: String,
    pub components: Vec<String>,
}

/// A form or multivector: either `components` (degree 1) or `terms`, keyed by
/// space-separated coordinate names, e.g. `terms = { "x y" = "1" }`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorDecl {
    pub name: String,
    pub chart: String,
    pub degree: Option<usize>,
    pub components: Option<Vec<String>>,
    pub terms: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub components: Vec<String>,
}

/// `kind` is one of `theta`, `jacobi`, `dirac-graph`, `lift`, `conformal-of`,
/// `induced`, `flip-forms` or `frame-literal`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDecl {
    pub name: String,
    pub kind: String,
    pub form: Option<String>,
    pub bivector: Option<String>,
    pub vector: Option<String>,
    pub of: Option<String>,
    pub phi: Option<String>,
    pub coord: Option<String>,
    pub chart: Option<String>,
    pub ambient: Option<String>,
    pub rank: Option<usize>,
    #[serde(default)]
    pub generators: Vec<GeneratorDecl>,
}

/// One frame section `(x, f) + (xi, g)`; omitted slots are zero.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDecl {
    pub x: Option<Vec<String>>,
    pub f: Option<String>,
    pub xi: Option<Vec<String>>,
    pub g: Option<String>,
}

/// `kind` is one of `pair`, `pair-line`, `pair-theta`, `cotangent`,
/// `literal`, `action` or `equivalence`.
///
/// `eta`, `sigma`, `omega` and `z` live on the total chart and override
/// whatever the kind provides.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidDecl {
    pub name: String,
    pub kind: String,
    pub base: Option<String>,
    pub total: Option<String>,
    pub form: Option<String>,
    pub of: Option<String>,
    pub phi: Option<String>,
    pub convention: Option<String>,
    pub alpha: Option<Vec<String>>,
    pub beta: Option<Vec<String>>,
    pub unit: Option<Vec<String>>,
    pub inverse: Option<Vec<String>>,
    pub mult: Option<Vec<String>>,
    pub pairs: Option<ParamDecl>,
    pub triples: Option<ParamDecl>,
    pub fibers: Option<ParamDecl>,
    pub eta: Option<Vec<String>>,
    pub sigma: Option<String>,
    pub omega: Option<BTreeMap<String, String>>,
    pub z: Option<Vec<String>>,
}

/// A parametrization by free coordinates.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamDecl {
    pub coords: Vec<String>,
    pub components: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckDecl {
    pub name: String,
    pub op: String,
    /// `pass` (default), `fail`, `inconclusive` or `error`.
    pub expect: Option<String>,
    /// With `expect = "fail"`: the condition that must be among the failures.
    pub condition: Option<String>,
    pub structure: Option<String>,
    pub other: Option<String>,
    pub expected: Option<String>,
    pub map: Option<String>,
    pub source: Option<String>,
    pub target: Option<String>,
    pub groupoid: Option<String>,
    pub chart: Option<String>,
    pub expr: Option<String>,
    pub phi: Option<String>,
    pub function: Option<String>,
    pub values: Option<Vec<String>>,
    pub cochain: Option<String>,
    pub table: Option<Vec<Vec<String>>>,
    pub iso: Option<String>,
    pub kernel_points: Option<String>,
}

impl CheckDecl {
    /// The optional arguments that were given, by key.
    pub(crate) fn given(&self) -> Vec<&'static str> {
        let slots: [(&'static str, bool); 17] = [
            ("structure", self.structure.is_some()),
            ("other", self.other.is_some()),
            ("expected", self.expected.is_some()),
            ("map", self.map.is_some()),
            ("source", self.source.is_some()),
            ("target", self.target.is_some()),
            ("groupoid", self.groupoid.is_some()),
            ("chart", self.chart.is_some()),
            ("expr", self.expr.is_some()),
            ("phi", self.phi.is_some()),
            ("function", self.function.is_some()),
            ("values", self.values.is_some()),
            ("cochain", self.cochain.is_some()),
            ("table", self.table.is_some()),
            ("iso", self.iso.is_some()),
            ("kernel_points", self.kernel_points.is_some()),
            ("condition", self.condition.is_some()),
        ];
        slots.iter().filter(|(_, on)| *on).map(|(k, _)| *k).collect()
    }
}

/// Parses scenario text; syntax and unknown keys are reported here.
pub fn parse_scenario(text: &str) -> Result<Scenario, toml::de::Error> {
    toml::from_str(text)
}

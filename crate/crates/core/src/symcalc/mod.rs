//! Immutable symbolic scalar expressions over named coordinates: parsing,
//! structural normalization, differentiation, evaluation and randomized
//! identity testing.

mod diff;
mod eval;
mod expr;
mod parse;
mod poly;
mod render;
mod sampling;

pub use diff::differentiate;
pub use eval::{EvalError, Number};
pub use expr::{normalize, Expr, Node, Rational};
pub use parse::parse;
pub use sampling::{
    is_zero, random_point, random_rational_point, sample_map, Point, SampleRun, SamplingPolicy,
    ZeroVerdict,
};

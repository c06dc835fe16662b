//! Tensor calculus on a single coordinate chart.

mod alternating;
mod chart;
mod fields;
mod ops;

pub use alternating::{wedge, AlternatingTensor, DifferentialForm, Multivector};
pub use chart::Chart;
pub use fields::{pushforward_at_point, SmoothMap, VectorField};
pub use ops::{
    contract, exterior_derivative, interior_product, lie_bracket, lie_derivative, pullback, sharp,
    to_multivector, to_vector_field,
};

#[cfg(test)]
mod tests;

//! Construction and verification of Dirac, Dirac-Jacobi and precontact
//! groupoid structures on explicit coordinate charts.
//!
//! Everything is built from a small symbolic core ([`symcalc`]) and chart
//! tensor calculus ([`tensor`]). Identities are decided by structural
//! normalization when possible, and otherwise by deterministic randomized
//! sampling; pointwise linear-algebra statements (rank, span membership,
//! subspace equality) are checked numerically at sample points.

pub mod error;
pub mod fixtures;
pub mod algebroid;
pub mod courant;
pub mod groupoid;
pub mod linalg;
mod par;
pub mod report;
pub mod structures;
pub mod symcalc;
pub mod tensor;
mod verify;

pub use error::{Error, Result};
pub use par::parallel_available;

//! Exact polynomial calculus and the closed-form singular weight.

pub mod compiled;
pub mod field;
pub mod poly;
pub mod weight;

pub use compiled::MAX_DIM;
pub use field::{ClampedField, Jet, JetField, JetOrder, PolyField, Symmetry};
pub use poly::{MonomialSpec, MultiPoly, DEFAULT_FIELD_DEGREE_CAP, MAX_DEGREE};
pub use weight::WeightJet;

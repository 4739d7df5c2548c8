//! Numerical verification of weighted integral identities for biharmonic
//! functions: exact polynomial jets, singular-weight quadrature, closed-form
//! constants, a clamped-plate finite-difference solver and decay fits.

pub mod campaign;
pub mod constants;
pub mod decay;
pub mod error;
pub mod geometry;
pub mod identities;
pub mod jets;
pub mod quadrature;
pub mod report;
pub mod solver;

pub use campaign::{DomainKind, FieldChoice, PolePlacement, VerifyConfig};
pub use decay::{CaccioppoliRatio, CornerComparison, DecayFit, LShapeConfig};
pub use error::{Error, Result};
pub use geometry::{Ball, ConvexPolytope, Domain, DomainSpec, Polygon2D};
pub use identities::{IdentityId, IdentityReport, PositivityReport};
pub use jets::{ClampedField, JetField, MonomialSpec, MultiPoly, PolyField};
pub use quadrature::{PoleKind, SampleBudget};
pub use report::Report;
pub use solver::{Backend, SolveOptions, SolveResult};

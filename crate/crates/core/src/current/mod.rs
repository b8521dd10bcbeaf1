//! The Wigner current `J`, its classical/quantum split and the fields built
//! from it.

mod bundle;
mod continuity;
mod stagnation;
mod velocity;

pub use bundle::{current_general, current_polar, divergence, CurrentBundle};
pub use continuity::{continuity_residual, ContinuityReport, DEFAULT_DT};
pub use stagnation::{stagnation_points, StagnationCluster, StagnationReport, DEFAULT_STAGNATION_TOL};
pub use velocity::{lagrange_terms, velocity_field, LagrangeTerms, VelocityField, DEFAULT_MASK_FRACTION};

pub(crate) use bundle::negative_curl;

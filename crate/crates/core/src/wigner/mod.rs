//! Wigner distributions on phase-space grids.

mod interp;
mod kernel;
mod quadrature;
mod stencil;
mod synth;

pub use interp::{interpolate, Interpolator};
pub use kernel::fock_wigner_kernel;
pub use quadrature::{wigner_quadrature, QuadratureConfig};
pub use stencil::{differentiate, differentiate_with, FieldDerivatives, DEFAULT_ACCURACY};
pub use synth::{wigner_grid, wigner_of_state, EDGE_TOLERANCE};

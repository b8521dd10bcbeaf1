//! Classical Liouville transport under the Kerr flow, solved exactly along
//! characteristics, and the classical shear baseline.

mod density;
mod shear;

pub use density::{classical_current, classical_velocity, liouville_pullback, ClassicalDensity, GaussianDensity};
pub use shear::{classical_shear, classical_shear_measure, shear_measure_coefficients, ShearMeasure};

use crate::error::{Error, Result};
use crate::grid::{PhaseGrid, ScalarField};
use crate::kerr::{evolve, StateVector};
use crate::params::KerrParams;
use crate::wigner::{wigner_of_state, FieldDerivatives};

use super::bundle::{current_general, divergence};

/// Default time step of the central difference.
pub const DEFAULT_DT: f64 = 1e-4;

/// `∂tW + ∇·J` on a grid, with the scale it should be compared against.
#[derive(Debug, Clone)]
pub struct ContinuityReport {
    pub residual: ScalarField,
    pub time_derivative: ScalarField,
    pub divergence: ScalarField,
    pub max_residual: f64,
    pub max_divergence: f64,
}

impl ContinuityReport {
    /// `max|∂tW + ∇·J| / max|∇·J|`, or the absolute residual when the
    /// divergence vanishes.
    pub fn relative(&self) -> f64 {
        if self.max_divergence > 0.0 {
            self.max_residual / self.max_divergence
        } else {
            self.max_residual
        }
    }
}

/// Continuity check at time `t`: `∂tW` from exact evolution by the central
/// difference `[W(t+dt) − W(t−dt)]/2dt`, `∇·J` from the σ = 0 current.
pub fn continuity_residual(
    state: &StateVector,
    t: f64,
    grid: &PhaseGrid,
    params: &KerrParams,
    dt: f64,
) -> Result<ContinuityReport> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let hbar = params.hbar;
    let w = wigner_of_state(&evolve(state, t, params)?, grid, hbar)?;
    let ahead = wigner_of_state(&evolve(state, t + dt, params)?, grid, hbar)?;
    let behind = wigner_of_state(&evolve(state, t - dt, params)?, grid, hbar)?;
    let time_derivative = ahead.zip_with(&behind, "dW/dt", |a, b| (a - b) / (2.0 * dt))?;
    let bundle = current_general(&FieldDerivatives::compute(&w)?, params, 0.0)?;
    let div = divergence(&bundle.total)?;
    let residual = time_derivative.zip_with(&div, "continuity residual", |a, b| a + b)?;
    Ok(ContinuityReport {
        max_residual: residual.max_abs(),
        max_divergence: div.max_abs(),
        residual,
        time_derivative,
        divergence: div,
    })
}

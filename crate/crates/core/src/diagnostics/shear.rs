use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

use super::events::{moving_average, DEFAULT_SMOOTHING_WINDOW};
use crate::current::{current_general, negative_curl};
use crate::error::{Error, Result};
use crate::grid::{trapezoid, PhaseGrid, ScalarField, VectorField};
use crate::kerr::{evolve, recurrence_time, StateVector};
use crate::params::KerrParams;
use crate::wigner::{differentiate, wigner_of_state, FieldDerivatives};

/// `δ = −∇×J^Q = ∂p J^Q_x − ∂x J^Q_p`.
pub fn vorticity(quantum: &VectorField) -> Result<ScalarField> {
    Ok(negative_curl(quantum)?.with_label("delta"))
}

/// `π = W ∂rδ` with `∂r = (x∂x + p∂p)/r`, zero at the origin node.
pub fn shear_polarization_local(w: &ScalarField, delta: &ScalarField) -> Result<ScalarField> {
    let g = w.grid;
    g.same_as(&delta.grid)?;
    let dx = differentiate(delta, 1, 0)?;
    let dp = differentiate(delta, 0, 1)?;
    let mut out = Array2::zeros(g.shape());
    for ((i, j), v) in out.indexed_iter_mut() {
        let (x, p) = (g.x(i), g.p(j));
        let r = x.hypot(p);
        if r > 0.0 {
            *v = w.values[[i, j]] * (x * dx.values[[i, j]] + p * dp.values[[i, j]]) / r;
        }
    }
    ScalarField::new(g, out, "pi")
}

/// `Π = ∬ π dx dp` on the grid.
pub fn shear_polarization(w: &ScalarField, delta: &ScalarField) -> Result<f64> {
    let pi = shear_polarization_local(w, delta)?;
    Ok(trapezoid(&pi.grid, &pi.values))
}

/// `Π` of a state evolved to time `t`.
pub fn pi_at(state0: &StateVector, t: f64, params: &KerrParams, grid: &PhaseGrid, sigma: f64) -> Result<f64> {
    let w = wigner_of_state(&evolve(state0, t, params)?, grid, params.hbar)?;
    let bundle = current_general(&FieldDerivatives::compute(&w)?, params, sigma)?;
    shear_polarization(&w, &vorticity(&bundle.quantum)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PiSeriesOptions {
    pub smoothing_window: usize,
    pub sigma: f64,
}

impl Default for PiSeriesOptions {
    fn default() -> Self {
        Self {
            smoothing_window: DEFAULT_SMOOTHING_WINDOW,
            sigma: 0.0,
        }
    }
}

/// `Π(t)` on a time ladder with its moving average.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShearSeries {
    pub times: Vec<f64>,
    pub pi_values: Vec<f64>,
    /// Centered moving average; windows are truncated at both ends.
    pub smoothed: Vec<f64>,
    pub smoothing_window: usize,
    /// Recurrence time of the dynamics, if it is not harmonic.
    pub recurrence: Option<f64>,
}

impl ShearSeries {
    pub fn new(times: Vec<f64>, pi_values: Vec<f64>, smoothing_window: usize, recurrence: Option<f64>) -> Result<Self> {
        if times.len() != pi_values.len() {
            return Err(Error::InvalidParameter("times and values differ in length".into()));
        }
        if times.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
            return Err(Error::InvalidParameter("times must be strictly increasing".into()));
        }
        let smoothed = moving_average(&pi_values, smoothing_window);
        Ok(Self {
            times,
            pi_values,
            smoothed,
            smoothing_window,
            recurrence,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `Π(t)` for each time: evolve, map to the grid, build the quantum current
/// and its vorticity, integrate `W∂rδ`. Times are processed in parallel and
/// assembled in order.
pub fn pi_series(
    state0: &StateVector,
    params: &KerrParams,
    times: &[f64],
    grid: &PhaseGrid,
    options: PiSeriesOptions,
) -> Result<ShearSeries> {
    params.require_kerr()?;
    let values = times
        .par_iter()
        .map(|&t| pi_at(state0, t, params, grid, options.sigma))
        .collect::<Result<Vec<_>>>()?;
    ShearSeries::new(times.to_vec(), values, options.smoothing_window, recurrence_time(params).ok())
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::kerr::{coherent_state, fock_superposition};

    fn fields(state: &StateVector, l2: f64) -> (ScalarField, ScalarField) {
        let g = PhaseGrid::symmetric(7.0, 129).unwrap();
        let w = wigner_of_state(state, &g, 1.0).unwrap();
        let b = current_general(&FieldDerivatives::compute(&w).unwrap(), &KerrParams::atomic(l2), 0.0).unwrap();
        let d = vorticity(&b.quantum).unwrap();
        (w, d)
    }

    #[test]
    fn harmonic_has_no_vorticity() {
        let s = coherent_state(Complex64::new(1.0, 0.3), 30).unwrap();
        let (w, d) = fields(&s, 0.0);
        assert_eq!(d.max_abs(), 0.0);
        assert_eq!(shear_polarization_local(&w, &d).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn vorticity_is_odd_in_lambda2() {
        let s = evolve(&coherent_state(Complex64::new(1.0, 0.3), 30).unwrap(), 2.0, &KerrParams::atomic(0.0625)).unwrap();
        let (w, plus) = fields(&s, 0.0625);
        let (_, minus) = fields(&s, -0.0625);
        let sum = plus.zip_with(&minus, "", |a, b| a + b).unwrap();
        assert!(sum.max_abs() < 1e-10 * plus.max_abs());
        let (a, b) = (shear_polarization(&w, &plus).unwrap(), shear_polarization(&w, &minus).unwrap());
        assert_eq!(a, -b);
    }

    #[test]
    fn fock_polarization_is_round() {
        let s = fock_superposition(&[(1, Complex64::new(1.0, 0.0))], 1).unwrap();
        let (w, d) = fields(&s, 0.0625);
        let pi = shear_polarization_local(&w, &d).unwrap();
        let g = pi.grid;
        let c = (g.nx - 1) / 2;
        for k in 1..20 {
            let a = pi.values[[c + k, c]];
            for b in [pi.values[[c - k, c]], pi.values[[c, c + k]], pi.values[[c, c - k]]] {
                assert!((a - b).abs() < 1e-8, "{a} {b}");
            }
        }
    }

    #[test]
    fn stationary_series_is_flat() {
        let s = fock_superposition(&[(2, Complex64::new(1.0, 0.0))], 2).unwrap();
        let g = PhaseGrid::symmetric(7.0, 65).unwrap();
        let series = pi_series(&s, &KerrParams::atomic(0.0625), &[0.0, 1.0, 2.5], &g, PiSeriesOptions::default()).unwrap();
        assert!(series.pi_values.iter().all(|v| (v - series.pi_values[0]).abs() < 1e-12));
        assert!(ShearSeries::new(vec![1.0, 1.0], vec![0.0, 0.0], 5, None).is_err());
    }
}

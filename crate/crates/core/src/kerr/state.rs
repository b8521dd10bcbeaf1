use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use super::cutoff::{coherent_tail, squeezed_tail, DEFAULT_TRUNCATION_TOL};
use crate::error::{Error, Result};

/// A pure state as Fock amplitudes `c_0 ..= c_N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    /// Probability discarded when the untruncated state was cut at `N`
    /// (before renormalization). Zero for finite superpositions.
    truncation_residual: f64,
}

impl StateVector {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Empty("amplitude list"));
        }
        Self::normalized(amplitudes, 0.0)
    }

    fn normalized(mut amplitudes: Vec<Complex64>, truncation_residual: f64) -> Result<Self> {
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter("state has zero or non-finite norm".into()));
        }
        for c in &mut amplitudes {
            *c /= norm;
        }
        Ok(Self {
            amplitudes,
            truncation_residual,
        })
    }

    pub(crate) fn from_normalized(amplitudes: Vec<Complex64>, truncation_residual: f64) -> Self {
        Self {
            amplitudes,
            truncation_residual,
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn truncation_residual(&self) -> f64 {
        self.truncation_residual
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Probability held by the top four levels; small when the cutoff is safe.
    pub fn edge_mass(&self) -> f64 {
        let n = self.amplitudes.len();
        self.amplitudes[n.saturating_sub(4)..]
            .iter()
            .map(|c| c.norm_sqr())
            .sum()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }
}

/// Coherent state `|α⟩` truncated at `cutoff`.
///
/// Refused when the discarded Poisson tail exceeds the default truncation
/// tolerance; use [`super::auto_cutoff`] to pick a safe cutoff.
pub fn coherent_state(alpha: Complex64, cutoff: usize) -> Result<StateVector> {
    coherent_state_with_tol(alpha, cutoff, DEFAULT_TRUNCATION_TOL)
}

pub fn coherent_state_with_tol(alpha: Complex64, cutoff: usize, tol: f64) -> Result<StateVector> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::InvalidParameter("alpha must be finite".into()));
    }
    let tail = coherent_tail(alpha.norm_sqr(), cutoff);
    if tail >= tol {
        return Err(Error::Truncation { cutoff, tail, tol });
    }
    let mut amps = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    amps.push(c);
    for n in 1..=cutoff {
        c = c * alpha / (n as f64).sqrt();
        amps.push(c);
    }
    StateVector::normalized(amps, tail)
}

/// Squeezed vacuum `S(ζ)|0⟩` for real `ζ`, position-squeezed for `ζ > 0`:
/// `c_{2m} = (-tanh ζ)^m √((2m)!) / (2^m m! √cosh ζ)`, odd levels empty.
pub fn squeezed_vacuum(zeta: f64, cutoff: usize) -> Result<StateVector> {
    squeezed_vacuum_with_tol(zeta, cutoff, DEFAULT_TRUNCATION_TOL)
}

pub fn squeezed_vacuum_with_tol(zeta: f64, cutoff: usize, tol: f64) -> Result<StateVector> {
    if !zeta.is_finite() {
        return Err(Error::InvalidParameter("zeta must be finite".into()));
    }
    let tail = squeezed_tail(zeta, cutoff);
    if tail >= tol {
        return Err(Error::Truncation { cutoff, tail, tol });
    }
    let t = zeta.tanh();
    let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    let mut c = 1.0 / zeta.cosh().sqrt();
    amps[0] = Complex64::new(c, 0.0);
    let mut m = 0usize;
    while 2 * m + 2 <= cutoff {
        // c_{2m+2} / c_{2m} = -t √((2m+1)(2m+2)) / (2(m+1))
        let mf = m as f64;
        c *= -t * ((2.0 * mf + 1.0) * (2.0 * mf + 2.0)).sqrt() / (2.0 * (mf + 1.0));
        amps[2 * m + 2] = Complex64::new(c, 0.0);
        m += 1;
    }
    StateVector::normalized(amps, tail)
}

/// Normalized superposition `Σ a_n |n⟩`. Repeated levels accumulate.
pub fn fock_superposition(terms: &[(usize, Complex64)], cutoff: usize) -> Result<StateVector> {
    if terms.is_empty() {
        return Err(Error::Empty("Fock superposition terms"));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    for &(n, a) in terms {
        if n > cutoff {
            return Err(Error::InvalidParameter(format!(
                "level {n} exceeds cutoff {cutoff}"
            )));
        }
        amps[n] += a;
    }
    StateVector::normalized(amps, 0.0)
}

/// Density matrix `ρ_{mn}` in the Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: Array2<Complex64>,
}

impl DensityMatrix {
    pub fn pure(state: &StateVector) -> Self {
        let c = state.amplitudes();
        let n = c.len();
        let entries = Array2::from_shape_fn((n, n), |(m, k)| c[m] * c[k].conj());
        Self { entries }
    }

    /// Convex combination `Σ w_i |ψ_i⟩⟨ψ_i|`; weights are normalized to sum 1.
    pub fn mixture(components: &[(f64, &StateVector)]) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Empty("mixture components"));
        }
        let total: f64 = components.iter().map(|(w, _)| *w).sum();
        if components.iter().any(|(w, _)| *w < 0.0) || total.is_nan() || total <= 0.0 {
            return Err(Error::InvalidParameter("mixture weights must be nonnegative".into()));
        }
        let dim = components.iter().map(|(_, s)| s.amplitudes().len()).max().unwrap();
        let mut entries = Array2::zeros((dim, dim));
        for (w, s) in components {
            let c = s.amplitudes();
            for (m, cm) in c.iter().enumerate() {
                for (k, ck) in c.iter().enumerate() {
                    entries[[m, k]] += cm * ck.conj() * (w / total);
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn from_entries(entries: Array2<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::InvalidParameter("density matrix must be square".into()));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.diag().sum()
    }

    /// Largest `|ρ_{mn} - conj(ρ_{nm})|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for m in 0..n {
            for k in 0..n {
                worst = worst.max((self.entries[[m, k]] - self.entries[[k, m]].conj()).norm());
            }
        }
        worst
    }

    /// Largest entrywise `|ρ - σ|`, padding the smaller matrix with zeros.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        let n = self.dim().max(other.dim());
        let get = |d: &DensityMatrix, m: usize, k: usize| {
            d.entries.get([m, k]).copied().unwrap_or_default()
        };
        let mut worst = 0.0f64;
        for m in 0..n {
            for k in 0..n {
                worst = worst.max((get(self, m, k) - get(other, m, k)).norm());
            }
        }
        worst
    }
}

pub fn density_matrix(state: &StateVector) -> DensityMatrix {
    DensityMatrix::pure(state)
}

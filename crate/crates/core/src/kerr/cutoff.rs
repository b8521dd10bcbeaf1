use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::ln_factorial;

pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-12;
pub const DEFAULT_CUTOFF_CAP: usize = 512;

/// The state families whose truncation tail can be evaluated before building
/// the state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StateKind {
    Coherent { alpha: Complex64 },
    Squeezed { zeta: f64 },
    /// Finite superposition; the highest populated level is exact.
    Fock { max_level: usize },
}

impl StateKind {
    /// Probability outside levels `0..=cutoff`.
    pub fn tail_mass(&self, cutoff: usize) -> f64 {
        match self {
            StateKind::Coherent { alpha } => coherent_tail(alpha.norm_sqr(), cutoff),
            StateKind::Squeezed { zeta } => squeezed_tail(*zeta, cutoff),
            StateKind::Fock { max_level } => {
                if cutoff >= *max_level {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }
}

/// Smallest `N` whose discarded tail is below `tol`: doubling to bracket,
/// then bisection.
pub fn auto_cutoff(kind: &StateKind, tol: f64) -> Result<usize> {
    auto_cutoff_capped(kind, tol, DEFAULT_CUTOFF_CAP)
}

pub fn auto_cutoff_capped(kind: &StateKind, tol: f64, cap: usize) -> Result<usize> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    if kind.tail_mass(0) < tol {
        return Ok(0);
    }
    let mut hi = 1usize;
    while kind.tail_mass(hi) >= tol {
        if hi >= cap {
            return Err(Error::CutoffCap { cap });
        }
        hi = (hi * 2).min(cap);
    }
    let mut lo = hi / 2; // tail(lo) >= tol
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if kind.tail_mass(mid) < tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Poisson tail `Σ_{n > N} e^{-μ} μⁿ/n!`.
pub(crate) fn coherent_tail(mean: f64, cutoff: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    // Terms are evaluated in log space so a start below the mode cannot
    // underflow to zero.
    let ln_mean = mean.ln();
    let mut sum = 0.0;
    for n in cutoff + 1.. {
        let term = (-mean + n as f64 * ln_mean - ln_factorial(n)).exp();
        sum += term;
        if n as f64 > mean && (term < 1e-18 * sum || term < 1e-300) {
            break;
        }
    }
    sum.min(1.0)
}

/// Tail of the squeezed-vacuum distribution `|c_{2m}|² = tanh^{2m}ζ (2m)!/(4^m m!² cosh ζ)`.
pub(crate) fn squeezed_tail(zeta: f64, cutoff: usize) -> f64 {
    let t2 = zeta.tanh().powi(2);
    if t2 == 0.0 {
        return 0.0;
    }
    // first even level above the cutoff
    let m0 = cutoff / 2 + 1;
    let mf = m0 as f64;
    let mut term = (mf * t2.ln() + ln_factorial(2 * m0) - 2.0 * ln_factorial(m0)
        - mf * 4f64.ln()
        - zeta.cosh().ln())
    .exp();
    let mut m = m0;
    let mut sum = 0.0;
    loop {
        sum += term;
        let mf = m as f64;
        term *= t2 * (2.0 * mf + 1.0) / (2.0 * mf + 2.0);
        m += 1;
        if term < 1e-18 * sum || term < 1e-300 || m > m0 + 1_000_000 {
            break;
        }
    }
    sum.min(1.0)
}

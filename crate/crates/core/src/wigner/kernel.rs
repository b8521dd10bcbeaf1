use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::laguerre_functions;

/// Wigner function of the operator `|m⟩⟨n|`:
///
/// `W_{mn} = (-1)^n/(πħ) · √(n!/m!) · (√(2/ħ)(x - ip))^{m-n} · e^{-r²/ħ} · L_n^{(m-n)}(2r²/ħ)`
/// for `m ≥ n`, and `W_{nm} = conj(W_{mn})`. Any density matrix maps to
/// `W = Σ ρ_{mn} W_{mn}`.
pub fn fock_wigner_kernel(m: usize, n: usize, x: f64, p: f64, hbar: f64) -> Result<Complex64> {
    if hbar.is_nan() || hbar <= 0.0 {
        return Err(Error::InvalidParameter("hbar must be positive".into()));
    }
    if m < n {
        return fock_wigner_kernel(n, m, x, p, hbar).map(|z| z.conj());
    }
    let k = m - n;
    let r2 = x * x + p * p;
    let f = laguerre_functions(n, k, 2.0 * r2 / hbar).ok_or(Error::Precision { m, n })?[n];
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let angle = -(k as f64) * p.atan2(x);
    Ok(Complex64::from_polar(sign * f / (PI * hbar), angle))
}

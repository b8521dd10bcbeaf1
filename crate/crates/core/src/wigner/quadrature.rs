use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kerr::DensityMatrix;
use crate::special::{gauss_legendre_cached, hermite_functions};

#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    pub initial_nodes: usize,
    pub max_doublings: usize,
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            initial_nodes: 2048,
            max_doublings: 4,
            tolerance: 1e-11,
        }
    }
}

/// Brute-force evaluation of the defining integral
/// `W(x,p) = (1/πħ) ∫ dy ⟨x+y|ρ|x-y⟩ e^{-2ipy/ħ}` with Gauss–Legendre on
/// `|y| ≤ 8√((N+1)ħ)`, doubling the node count until two passes agree.
///
/// Independent of the Laguerre kernel; used to check it.
pub fn wigner_quadrature(rho: &DensityMatrix, x: f64, p: f64, hbar: f64) -> Result<f64> {
    wigner_quadrature_with(rho, x, p, hbar, QuadratureConfig::default())
}

pub fn wigner_quadrature_with(
    rho: &DensityMatrix,
    x: f64,
    p: f64,
    hbar: f64,
    cfg: QuadratureConfig,
) -> Result<f64> {
    let n = rho.dim() - 1;
    let half = 8.0 * ((n as f64 + 1.0) * hbar).sqrt();
    let mut nodes = cfg.initial_nodes;
    let mut prev = integrate(rho, x, p, hbar, half, nodes);
    let mut residual = f64::INFINITY;
    for _ in 0..cfg.max_doublings {
        nodes *= 2;
        let next = integrate(rho, x, p, hbar, half, nodes);
        residual = (next - prev).abs();
        prev = next;
        if residual < cfg.tolerance {
            return Ok(next);
        }
    }
    Err(Error::Quadrature { residual })
}

fn integrate(rho: &DensityMatrix, x: f64, p: f64, hbar: f64, half: f64, nodes: usize) -> f64 {
    let n = rho.dim() - 1;
    let e = rho.entries();
    let rule = gauss_legendre_cached(nodes);
    let (u, w) = (&rule.0, &rule.1);
    let mut total = 0.0;
    for (ui, wi) in u.iter().zip(w) {
        let y = half * ui;
        let a = hermite_functions(n, x + y, hbar);
        let b = hermite_functions(n, x - y, hbar);
        // Re[ Σ ρ_mn ψ_m(x+y) ψ_n(x-y) e^{-2ipy/ħ} ]
        let (s, c) = (-2.0 * p * y / hbar).sin_cos();
        let mut re = 0.0;
        let mut im = 0.0;
        for (m, am) in a.iter().enumerate() {
            for (k, bk) in b.iter().enumerate() {
                let z = e[[m, k]] * (am * bk);
                re += z.re;
                im += z.im;
            }
        }
        total += wi * (re * c - im * s);
    }
    total * half / (PI * hbar)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::kerr::{coherent_state, density_matrix};

    #[test]
    fn vacuum_values() {
        let rho = density_matrix(&coherent_state(Complex64::new(0.0, 0.0), 0).unwrap());
        let w = wigner_quadrature(&rho, 0.0, 0.0, 1.0).unwrap();
        assert!((w - 1.0 / PI).abs() < 1e-10);
        let w = wigner_quadrature(&rho, 1.0, 1.0, 1.0).unwrap();
        assert!((w - (-2.0f64).exp() / PI).abs() < 1e-10);
    }

    #[test]
    fn coherent_state_is_displaced_gaussian() {
        // W = (1/π) exp(-(x-x0)² - (p-p0)²), (x0, p0) = √2 (Re α, Im α)
        let alpha = Complex64::new(0.8, -0.5);
        let rho = density_matrix(&coherent_state(alpha, 30).unwrap());
        let (x0, p0) = (2f64.sqrt() * alpha.re, 2f64.sqrt() * alpha.im);
        for (x, p) in [(0.0, 0.0), (1.0, -0.4), (-0.5, 0.9)] {
            let want = (-(x - x0) * (x - x0) - (p - p0) * (p - p0)).exp() / PI;
            let got = wigner_quadrature(&rho, x, p, 1.0).unwrap();
            assert!((got - want).abs() < 1e-10, "({x}, {p}): {got} vs {want}");
        }
    }
}

use serde::Serialize;

use super::density::{classical_current, GaussianDensity};
use crate::current::negative_curl;
use crate::error::Result;
use crate::grid::ScalarField;
use crate::params::KerrParams;
use crate::special::gauss_legendre;
use crate::wigner::differentiate;

/// Radial derivative of the negative curl of the classical velocity,
/// `∂r(∂p v_x − ∂x v_p) = ∂r(2 + 4Λ²r²) = 8Λ²r`. Positive for clockwise shear.
pub fn classical_shear(r: f64, params: &KerrParams) -> f64 {
    8.0 * params.lambda2() * r
}

/// `∬ ρ ∂r(−∇×j) dx dp` with `j = ρv`, by finite differences on the grid.
/// Only meaningful while the density is resolved; see
/// [`shear_measure_coefficients`] for the exact Gaussian case.
pub fn classical_shear_measure(rho: &ScalarField, params: &KerrParams) -> Result<f64> {
    let g = rho.grid;
    let curl = negative_curl(&classical_current(rho, params))?;
    let cx = differentiate(&curl, 1, 0)?;
    let cp = differentiate(&curl, 0, 1)?;
    let integrand = ScalarField::from_fn(g, "", |_, _| 0.0);
    let mut vals = integrand.values;
    for ((i, j), v) in vals.indexed_iter_mut() {
        let (x, p) = (g.x(i), g.p(j));
        let r = x.hypot(p);
        if r > 0.0 {
            *v = rho.values[[i, j]] * (x * cx.values[[i, j]] + p * cp.values[[i, j]]) / r;
        }
    }
    Ok(crate::grid::trapezoid(&g, &vals))
}

/// The exact ρ-weighted shear measure of a pulled-back Gaussian as a
/// polynomial in time: `c0 + c1 t + c2 t²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShearMeasure {
    pub coefficients: [f64; 3],
}

impl ShearMeasure {
    pub fn at(&self, t: f64) -> f64 {
        let [a, b, c] = self.coefficients;
        a + t * (b + t * c)
    }
}

/// Polynomial form of the shear measure for a Gaussian initial density.
///
/// With `ρ(r,θ,t) = ρ₀(r, φ)`, `φ = θ + ω(r)t`, each θ-integral over a full
/// turn equals the φ-integral, so only the explicit powers of `t` from
/// `∂r = ∂r|φ + ω't ∂φ` survive. Radial Gauss–Legendre, periodic trapezoid
/// in angle.
pub fn shear_measure_coefficients(rho0: &GaussianDensity, params: &KerrParams) -> ShearMeasure {
    let l2 = params.lambda2();
    let (cx, cp) = rho0.center;
    let reach = 14.0 * rho0.max_spread();
    let rc = cx.hypot(cp);
    let (r0, r1) = ((rc - reach).max(0.0), rc + reach);
    let (nodes, weights) = gauss_legendre(400);
    let n_theta = 1024;
    let mut coeff = [0.0; 3];
    for (u, wr) in nodes.iter().zip(&weights) {
        let r = 0.5 * (r1 - r0) * u + 0.5 * (r1 + r0);
        let wr = 0.5 * (r1 - r0) * wr;
        let omega = 1.0 + l2 * r * r;
        let (d1, d2) = (2.0 * l2 * r, 2.0 * l2);
        let mut ring = [0.0; 3];
        for k in 0..n_theta {
            let phi = std::f64::consts::TAU * k as f64 / n_theta as f64;
            let (s, c) = phi.sin_cos();
            let (f, g, h) = rho0.derivatives(r * c, r * s);
            let radial = [c, s];
            let normal = [-s, c];
            let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
            let quad = |a: [f64; 2], b: [f64; 2]| {
                a[0] * (h[0][0] * b[0] + h[0][1] * b[1]) + a[1] * (h[1][0] * b[0] + h[1][1] * b[1])
            };
            let f_r = dot(radial, g);
            let f_rr = quad(radial, radial);
            let f_phi = r * dot(normal, g);
            let f_pp = r * r * quad(normal, normal) - r * f_r;
            let f_rp = dot(normal, g) + r * quad(normal, radial);
            // ∂r g = ρ(3ω' + rω'') + ∂rρ(3ω + 2rω') + rω ∂r²ρ, split by powers of t
            let a = 3.0 * omega + 2.0 * r * d1;
            let t0 = f * (3.0 * d1 + r * d2) + f_r * a + r * omega * f_rr;
            let t1 = d1 * f_phi * a + r * omega * (2.0 * d1 * f_rp + d2 * f_phi);
            let t2 = r * omega * d1 * d1 * f_pp;
            ring[0] += f * t0;
            ring[1] += f * t1;
            ring[2] += f * t2;
        }
        let dtheta = std::f64::consts::TAU / n_theta as f64;
        for (c, v) in coeff.iter_mut().zip(ring) {
            *c += wr * r * v * dtheta;
        }
    }
    ShearMeasure { coefficients: coeff }
}

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{PhaseGrid, ScalarField, VectorField};
use crate::params::KerrParams;
use crate::wigner::Interpolator;

/// Classical Kerr velocity `(p, −x)(1 + Λ²r²)` for `M = k = 1`.
pub fn classical_velocity(x: f64, p: f64, params: &KerrParams) -> (f64, f64) {
    let omega = 1.0 + params.lambda2() * (x * x + p * p);
    (p * omega, -x * omega)
}

/// Classical current `ρv` of a density field.
pub fn classical_current(rho: &ScalarField, params: &KerrParams) -> VectorField {
    let g = rho.grid;
    let mut jx = rho.values.clone();
    let mut jp = rho.values.clone();
    for ((i, j), v) in rho.values.indexed_iter() {
        let (vx, vp) = classical_velocity(g.x(i), g.p(j), params);
        jx[[i, j]] = v * vx;
        jp[[i, j]] = v * vp;
    }
    VectorField::new(g, jx, jp, "j").unwrap()
}

/// Normalized bivariate Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianDensity {
    pub center: (f64, f64),
    /// Covariance `[[σxx, σxp], [σxp, σpp]]`.
    pub covariance: [[f64; 2]; 2],
}

impl GaussianDensity {
    pub fn new(center: (f64, f64), covariance: [[f64; 2]; 2]) -> Result<Self> {
        let [[a, b], [c, d]] = covariance;
        if !(a > 0.0 && d > 0.0 && a * d - b * c > 0.0 && b == c) {
            return Err(Error::InvalidParameter("covariance must be symmetric positive definite".into()));
        }
        Ok(Self { center, covariance })
    }

    /// Isotropic Gaussian with the vacuum spread `ħ/2` per quadrature.
    pub fn isotropic(x0: f64, p0: f64, hbar: f64) -> Result<Self> {
        Self::new((x0, p0), [[hbar / 2.0, 0.0], [0.0, hbar / 2.0]])
    }

    /// Gaussian with the same initial Wigner distribution as `|α⟩`.
    pub fn twin(alpha: Complex64, hbar: f64) -> Result<Self> {
        let s = (2.0 * hbar).sqrt();
        Self::isotropic(s * alpha.re, s * alpha.im, hbar)
    }

    fn inverse(&self) -> ([[f64; 2]; 2], f64) {
        let [[a, b], [_, d]] = self.covariance;
        let det = a * d - b * b;
        ([[d / det, -b / det], [-b / det, a / det]], det)
    }

    pub fn eval(&self, x: f64, p: f64) -> f64 {
        self.derivatives(x, p).0
    }

    /// Value, gradient and Hessian at `(x, p)`.
    pub fn derivatives(&self, x: f64, p: f64) -> (f64, [f64; 2], [[f64; 2]; 2]) {
        let (s, det) = self.inverse();
        let d = [x - self.center.0, p - self.center.1];
        let sd = [s[0][0] * d[0] + s[0][1] * d[1], s[1][0] * d[0] + s[1][1] * d[1]];
        let q = d[0] * sd[0] + d[1] * sd[1];
        let f = (-0.5 * q).exp() / (std::f64::consts::TAU * det.sqrt());
        let grad = [-f * sd[0], -f * sd[1]];
        let mut hess = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                hess[a][b] = f * (sd[a] * sd[b] - s[a][b]);
            }
        }
        (f, grad, hess)
    }

    /// Largest standard deviation along any direction.
    pub fn max_spread(&self) -> f64 {
        let [[a, b], [_, d]] = self.covariance;
        let m = 0.5 * (a + d);
        (m + (0.25 * (a - d).powi(2) + b * b).sqrt()).sqrt()
    }
}

/// Initial classical density: closed form or a sampled field.
#[derive(Debug, Clone)]
pub enum ClassicalDensity {
    Gaussian(GaussianDensity),
    Field(Box<Interpolator>),
}

impl ClassicalDensity {
    pub fn field(rho: &ScalarField) -> Result<Self> {
        Ok(Self::Field(Box::new(Interpolator::new(rho)?)))
    }

    /// Initial density at a point; zero outside a sampled field's box.
    pub fn eval(&self, x: f64, p: f64) -> f64 {
        match self {
            Self::Gaussian(g) => g.eval(x, p),
            Self::Field(f) => f.eval(x, p).unwrap_or(0.0),
        }
    }
}

/// `ρ(r, θ, t) = ρ₀(r, θ + (1 + Λ²r²)t)`: each circle turns rigidly
/// clockwise at its own angular speed.
pub fn liouville_pullback(rho0: &ClassicalDensity, t: f64, grid: &PhaseGrid, params: &KerrParams) -> Result<ScalarField> {
    params.validate()?;
    let l2 = params.lambda2();
    let values = grid.sample(|x, p| {
        let phi = (1.0 + l2 * (x * x + p * p)) * t;
        let (s, c) = phi.sin_cos();
        rho0.eval(x * c - p * s, x * s + p * c)
    });
    ScalarField::new(*grid, values, format!("rho(t={t})"))
}

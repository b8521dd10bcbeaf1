use ndarray::{Array2, Zip};

use crate::error::{Error, Result};
use crate::grid::{PhaseGrid, ScalarField, VectorField};
use crate::params::KerrParams;
use crate::wigner::{differentiate, FieldDerivatives};

/// Total current with its classical and quantum parts, all on one grid.
#[derive(Debug, Clone)]
pub struct CurrentBundle {
    pub total: VectorField,
    pub classical: VectorField,
    pub quantum: VectorField,
    pub sigma: f64,
    pub params: KerrParams,
}

impl CurrentBundle {
    fn assemble(grid: PhaseGrid, classical: VectorField, quantum: VectorField, sigma: f64, params: KerrParams) -> Self {
        let total = VectorField::new(grid, &classical.x + &quantum.x, &classical.p + &quantum.p, "J").unwrap();
        Self {
            total,
            classical,
            quantum,
            sigma,
            params,
        }
    }
}

/// Wigner current of the general Hamiltonian
/// `p²/2M + kx²/2 + (Λp²/2M + λkx²/2)²` for a field `W` and its derivatives.
///
/// Classical part (Hamiltonian flow times `W`):
/// `j_x = (Λ²p³/M² + Λλ k x²p/M + p/M) W`,
/// `j_p = -(λ²k²x³ + Λλ k x p²/M + kx) W`.
/// Quantum part:
/// `J^Q_x = ħ²(-Λ² p W_xx/4M² - Λλ k p W_pp/4M)`,
/// `J^Q_p = ħ²(λ²k² x W_pp/4 + Λλ k x W_xx/4M)`,
/// plus the divergence-free `σ` family
/// `σ Λλ ħ²k/4M · (x W_xp + p W_pp, -(x W_xx + p W_xp))`.
pub fn current_general(w: &FieldDerivatives, params: &KerrParams, sigma: f64) -> Result<CurrentBundle> {
    params.validate()?;
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::InvalidParameter(format!("sigma must lie in [0, 1], got {sigma}")));
    }
    let g = w.f.grid;
    for d in [&w.fx, &w.fp, &w.fxx, &w.fpp, &w.fxp] {
        g.same_as(&d.grid)?;
    }
    let (m, k, hbar) = (params.mass, params.spring, params.hbar);
    let big = params.lambda2_p;
    let small = params.lambda2_x();
    let cross = params.lambda_cross()?;
    let h2 = hbar * hbar;

    let mut cx = Array2::zeros(g.shape());
    let mut cp = Array2::zeros(g.shape());
    let mut qx = Array2::zeros(g.shape());
    let mut qp = Array2::zeros(g.shape());
    let xs = g.xs();
    let ps = g.ps();
    Zip::indexed(&mut cx)
        .and(&mut cp)
        .and(&mut qx)
        .and(&mut qp)
        .for_each(|(i, j), cx, cp, qx, qp| {
            let (x, p) = (xs[i], ps[j]);
            let f = w.f.values[[i, j]];
            let (fxx, fpp, fxp) = (w.fxx.values[[i, j]], w.fpp.values[[i, j]], w.fxp.values[[i, j]]);
            *cx = (big * p * p * p / (m * m) + cross * k * x * x * p / m + p / m) * f;
            *cp = -(small * k * k * x * x * x + cross * k * x * p * p / m + k * x) * f;
            let s = sigma * cross * h2 * k / (4.0 * m);
            *qx = h2 * (-big * p * fxx / (4.0 * m * m) - cross * k * p * fpp / (4.0 * m)) + s * (x * fxp + p * fpp);
            *qp = h2 * (small * k * k * x * fpp / 4.0 + cross * k * x * fxx / (4.0 * m)) - s * (x * fxx + p * fxp);
        });
    let classical = VectorField::new(g, cx, cp, "j")?;
    let quantum = VectorField::new(g, qx, qp, "JQ")?;
    Ok(CurrentBundle::assemble(g, classical, quantum, sigma, *params))
}

/// Circular form for `M = k = 1`, `λ = Λ`:
/// `J = (p, -x)[(1 + Λ²r²) W - (ħ²Λ²/4) ΔW]`, classical part `W v` with
/// `v = (p, -x)(1 + Λ²r²)`.
pub fn current_polar(w: &FieldDerivatives, params: &KerrParams) -> Result<CurrentBundle> {
    params.require_unit_kerr()?;
    let g = w.f.grid;
    let l2 = params.lambda2();
    let c = params.hbar * params.hbar * l2 / 4.0;
    let mut cx = Array2::zeros(g.shape());
    let mut cp = Array2::zeros(g.shape());
    let mut qx = Array2::zeros(g.shape());
    let mut qp = Array2::zeros(g.shape());
    let xs = g.xs();
    let ps = g.ps();
    Zip::indexed(&mut cx)
        .and(&mut cp)
        .and(&mut qx)
        .and(&mut qp)
        .for_each(|(i, j), cx, cp, qx, qp| {
            let (x, p) = (xs[i], ps[j]);
            let f = w.f.values[[i, j]];
            let lap = w.fxx.values[[i, j]] + w.fpp.values[[i, j]];
            let omega = 1.0 + l2 * (x * x + p * p);
            *cx = p * omega * f;
            *cp = -x * omega * f;
            *qx = -p * c * lap;
            *qp = x * c * lap;
        });
    let classical = VectorField::new(g, cx, cp, "j")?;
    let quantum = VectorField::new(g, qx, qp, "JQ")?;
    Ok(CurrentBundle::assemble(g, classical, quantum, 0.0, *params))
}

/// `∂x J_x + ∂p J_p` on the grid.
pub fn divergence(j: &VectorField) -> Result<ScalarField> {
    let dx = differentiate(&j.component_x(), 1, 0)?;
    let dp = differentiate(&j.component_p(), 0, 1)?;
    ScalarField::new(j.grid, dx.values + dp.values, format!("div {}", j.label))
}

/// Scalar curl `∂p F_x - ∂x F_p` (the negative of the usual curl).
pub(crate) fn negative_curl(f: &VectorField) -> Result<ScalarField> {
    let a = differentiate(&f.component_x(), 0, 1)?;
    let b = differentiate(&f.component_p(), 1, 0)?;
    ScalarField::new(f.grid, a.values - b.values, format!("-curl {}", f.label))
}

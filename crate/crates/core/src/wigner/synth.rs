use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{PhaseGrid, ScalarField};
use crate::kerr::{DensityMatrix, StateVector};
use crate::special::LaguerreTable;

/// Largest `|W|` tolerated on the box boundary before a warning is attached.
pub const EDGE_TOLERANCE: f64 = 1e-9;

/// Wigner distribution of `rho` sampled on `grid`.
///
/// Sums the Laguerre kernels by angular order: at radius `r` the field is
/// `(1/πħ)[A_0(r) + 2 Re Σ_k A_k(r) e^{-ikθ}]` with
/// `A_k = Σ_n (-1)^n ρ_{n+k,n} f_n^{(k)}(2r²/ħ)`. On origin-symmetric grids
/// the radial coefficients are shared by the eight symmetric images of each
/// node. The output is real by construction and does not depend on thread
/// count.
pub fn wigner_grid(rho: &DensityMatrix, grid: &PhaseGrid, hbar: f64) -> Result<ScalarField> {
    grid.validate()?;
    if hbar.is_nan() || hbar <= 0.0 {
        return Err(Error::InvalidParameter("hbar must be positive".into()));
    }
    let e = rho.entries();
    let dim = rho.dim();
    // Reordered ρ: diag[k][n] = (-1)^n ρ_{n+k,n}
    let diagonals: Vec<Vec<Complex64>> = (0..dim)
        .map(|k| {
            (0..dim - k)
                .map(|n| {
                    let z = e[[n + k, n]];
                    if n % 2 == 0 {
                        z
                    } else {
                        -z
                    }
                })
                .collect()
        })
        .collect();
    let recurrence = LaguerreTable::new(dim);
    let coeffs = |r2: f64| -> Result<Vec<Complex64>> {
        let x = 2.0 * r2 / hbar;
        let mut buf = vec![0.0; dim];
        let mut out = Vec::with_capacity(dim);
        for (k, diag) in diagonals.iter().enumerate() {
            let f = &mut buf[..dim - k];
            if !recurrence.fill(k, x, f) {
                return Err(Error::Precision { m: dim - 1, n: dim - 1 - k });
            }
            let a = diag.iter().zip(f.iter()).fold(Complex64::new(0.0, 0.0), |acc, (d, f)| acc + d * f);
            out.push(a);
        }
        Ok(out)
    };
    let norm = 1.0 / (PI * hbar);
    let assemble = |a: &[Complex64], x: f64, p: f64| -> f64 {
        let r = x.hypot(p);
        if r == 0.0 || a.len() == 1 {
            return a[0].re * norm;
        }
        // Horner in z = e^{-iθ} for Σ_{k≥1} A_k z^k
        let z = Complex64::new(x / r, -p / r);
        let mut acc = Complex64::new(0.0, 0.0);
        for ak in a[1..].iter().rev() {
            acc = (acc + ak) * z;
        }
        (a[0].re + 2.0 * acc.re) * norm
    };

    let mut values = Array2::zeros(grid.shape());
    if grid.is_origin_symmetric() {
        let c = (grid.nx - 1) / 2;
        let h = grid.hx();
        // radial coefficients for offsets (a, b) with a >= b
        let table: Vec<Vec<Vec<Complex64>>> = (0..=c)
            .into_par_iter()
            .map(|a| {
                (0..=a)
                    .map(|b| {
                        let (xa, xb) = (a as f64 * h, b as f64 * h);
                        coeffs(xa * xa + xb * xb)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        values
            .axis_iter_mut(ndarray::Axis(0))
            .into_par_iter()
            .enumerate()
            .for_each(|(i, mut row)| {
                let x = grid.x(i);
                let a = i.abs_diff(c);
                for (j, v) in row.iter_mut().enumerate() {
                    let b = j.abs_diff(c);
                    let coef = if a >= b { &table[a][b] } else { &table[b][a] };
                    *v = assemble(coef, x, grid.p(j));
                }
            });
    } else {
        let rows: Vec<Vec<f64>> = (0..grid.nx)
            .into_par_iter()
            .map(|i| {
                let x = grid.x(i);
                (0..grid.np)
                    .map(|j| {
                        let p = grid.p(j);
                        coeffs(x * x + p * p).map(|a| assemble(&a, x, p))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                values[[i, j]] = v;
            }
        }
    }
    let mut field = ScalarField::new(*grid, values, "W")?;
    let edge = field.edge_max_abs();
    if edge > EDGE_TOLERANCE {
        field.warnings.push(format!(
            "edge mass: |W| reaches {edge:.3e} on the box boundary (tolerance {EDGE_TOLERANCE:.0e})"
        ));
    }
    Ok(field)
}

/// Convenience: `wigner_grid` of a pure state.
pub fn wigner_of_state(state: &StateVector, grid: &PhaseGrid, hbar: f64) -> Result<ScalarField> {
    wigner_grid(&DensityMatrix::pure(state), grid, hbar)
}

use ndarray::Array2;

use crate::error::Result;
use crate::grid::{PhaseGrid, ScalarField, VectorField};
use crate::params::KerrParams;
use crate::wigner::{differentiate, FieldDerivatives};

use super::bundle::{divergence, CurrentBundle};

/// Relative mask threshold used when none is given.
pub const DEFAULT_MASK_FRACTION: f64 = 1e-6;

/// `w = J/W` on the cells where `|W|` clears a threshold, together with the
/// cells where `W` changes sign. Entries outside the mask are zero.
#[derive(Debug, Clone)]
pub struct VelocityField {
    pub w: VectorField,
    pub mask: Array2<bool>,
    /// Lower-left node indices of grid cells whose corners take both signs.
    pub singular_set: Vec<(usize, usize)>,
    pub threshold: f64,
    /// `∇·w` by the quotient rule `(∇·J)/W − J·∇W/W²`, zero outside the mask.
    pub divergence: ScalarField,
}

impl VelocityField {
    pub fn grid(&self) -> PhaseGrid {
        self.w.grid
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    /// Largest `|∇·w|` over masked nodes within `radius` nodes of a
    /// sign-change cell. Zero when `W` never changes sign.
    pub fn max_divergence_near_singular(&self, radius: usize) -> f64 {
        let near = self.near_singular(radius);
        let mut best = 0.0f64;
        for ((i, j), d) in self.divergence.values.indexed_iter() {
            if near[[i, j]] && self.mask[[i, j]] {
                best = best.max(d.abs());
            }
        }
        best
    }

    fn near_singular(&self, radius: usize) -> Array2<bool> {
        let (nx, np) = self.grid().shape();
        let mut near = Array2::from_elem((nx, np), false);
        for &(i, j) in &self.singular_set {
            let (i0, i1) = (i.saturating_sub(radius), (i + 1 + radius).min(nx - 1));
            let (j0, j1) = (j.saturating_sub(radius), (j + 1 + radius).min(np - 1));
            for a in i0..=i1 {
                for b in j0..=j1 {
                    near[[a, b]] = true;
                }
            }
        }
        near
    }
}

/// Velocity field of a current bundle. `threshold` is absolute; `None` means
/// `1e-6 · max W`.
pub fn velocity_field(bundle: &CurrentBundle, w: &ScalarField, threshold: Option<f64>) -> Result<VelocityField> {
    let g = w.grid;
    g.same_as(&bundle.total.grid)?;
    let threshold = threshold.unwrap_or(DEFAULT_MASK_FRACTION * w.max());
    let j = &bundle.total;
    let div_j = divergence(j)?;
    let wx = differentiate(w, 1, 0)?;
    let wp = differentiate(w, 0, 1)?;

    let shape = g.shape();
    let mut mask = Array2::from_elem(shape, false);
    let mut vx = Array2::zeros(shape);
    let mut vp = Array2::zeros(shape);
    let mut div = Array2::zeros(shape);
    for ((i, jj), f) in w.values.indexed_iter() {
        if f.abs() <= threshold || *f == 0.0 {
            continue;
        }
        let (jx, jp) = (j.x[[i, jj]], j.p[[i, jj]]);
        mask[[i, jj]] = true;
        vx[[i, jj]] = jx / f;
        vp[[i, jj]] = jp / f;
        div[[i, jj]] = div_j.values[[i, jj]] / f - (jx * wx.values[[i, jj]] + jp * wp.values[[i, jj]]) / (f * f);
    }

    Ok(VelocityField {
        w: VectorField::new(g, vx, vp, "w")?,
        mask,
        singular_set: sign_change_cells(w),
        threshold,
        divergence: ScalarField::new(g, div, "div w")?,
    })
}

fn sign_change_cells(w: &ScalarField) -> Vec<(usize, usize)> {
    let (nx, np) = w.grid.shape();
    let v = &w.values;
    let mut out = Vec::new();
    for i in 0..nx - 1 {
        for j in 0..np - 1 {
            let c = [v[[i, j]], v[[i + 1, j]], v[[i, j + 1]], v[[i + 1, j + 1]]];
            let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if lo < 0.0 && hi > 0.0 {
                out.push((i, j));
            }
        }
    }
    out
}

/// Terms of `∂tW + w·∇W + W∇·w = 0` on the masked region (zero elsewhere).
#[derive(Debug, Clone)]
pub struct LagrangeTerms {
    /// `w·∇W`.
    pub convective: ScalarField,
    /// `W∇·w`.
    pub expansion: ScalarField,
    /// `dW/dt = −W∇·w`.
    pub total_derivative: ScalarField,
    /// `−(Λ²ħ²/4) W ∂θ(ΔW/W)` with `∂θ = x∂p − p∂x`; only for `M = k = 1`, `λ = Λ`.
    pub total_derivative_closed: Option<ScalarField>,
    /// `(Λ²[−r² + ħ²ΔW/(4W)] − 1) ∂θW`; same restriction.
    pub convective_closed: Option<ScalarField>,
    /// `total_derivative − total_derivative_closed`.
    pub discrepancy: Option<ScalarField>,
    pub mask: Array2<bool>,
}

impl LagrangeTerms {
    /// Largest masked value of `|a|`.
    pub fn masked_max(&self, a: &ScalarField) -> f64 {
        a.values
            .iter()
            .zip(self.mask.iter())
            .filter(|(_, m)| **m)
            .fold(0.0f64, |acc, (v, _)| acc.max(v.abs()))
    }

    /// `max|discrepancy| / max|total_derivative|` over the mask.
    pub fn closed_form_relative(&self) -> Option<f64> {
        let d = self.discrepancy.as_ref()?;
        let scale = self.masked_max(&self.total_derivative);
        Some(if scale > 0.0 { self.masked_max(d) / scale } else { self.masked_max(d) })
    }

    /// `max|convective − convective_closed| / max|convective|` over the mask.
    pub fn convective_relative(&self) -> Option<f64> {
        let c = self.convective_closed.as_ref()?;
        let diff = self.convective.zip_with(c, "", |a, b| a - b).ok()?;
        let scale = self.masked_max(&self.convective);
        Some(if scale > 0.0 { self.masked_max(&diff) / scale } else { self.masked_max(&diff) })
    }

    /// Masked field `∂tW + w·∇W + W∇·w` for a given `∂tW`.
    pub fn residual(&self, time_derivative: &ScalarField) -> Result<ScalarField> {
        let sum = self.convective.zip_with(&self.expansion, "", |a, b| a + b)?;
        let mut out = sum.zip_with(time_derivative, "lagrange residual", |a, b| a + b)?;
        for (v, m) in out.values.iter_mut().zip(self.mask.iter()) {
            if !*m {
                *v = 0.0;
            }
        }
        Ok(out)
    }
}

/// Convective and expansion terms of the Lagrange picture, plus the Kerr
/// closed forms when the parameters allow them.
pub fn lagrange_terms(w: &ScalarField, vel: &VelocityField, params: &KerrParams) -> Result<LagrangeTerms> {
    let g = w.grid;
    g.same_as(&vel.grid())?;
    let d = FieldDerivatives::compute(w)?;
    let shape = g.shape();
    let mut conv = Array2::zeros(shape);
    let mut expa = Array2::zeros(shape);
    let mut total = Array2::zeros(shape);
    for ((i, j), m) in vel.mask.indexed_iter() {
        if !*m {
            continue;
        }
        conv[[i, j]] = vel.w.x[[i, j]] * d.fx.values[[i, j]] + vel.w.p[[i, j]] * d.fp.values[[i, j]];
        expa[[i, j]] = w.values[[i, j]] * vel.divergence.values[[i, j]];
        total[[i, j]] = -expa[[i, j]];
    }

    let (mut closed_total, mut closed_conv, mut discrepancy) = (None, None, None);
    if params.require_unit_kerr().is_ok() {
        let l2 = params.lambda2();
        let h2 = params.hbar * params.hbar;
        let lap = d.laplacian();
        let lap_x = differentiate(&lap, 1, 0)?;
        let lap_p = differentiate(&lap, 0, 1)?;
        let mut ct = Array2::zeros(shape);
        let mut cc = Array2::zeros(shape);
        for ((i, j), m) in vel.mask.indexed_iter() {
            if !*m {
                continue;
            }
            let (x, p) = (g.x(i), g.p(j));
            let f = w.values[[i, j]];
            let dtheta_w = x * d.fp.values[[i, j]] - p * d.fx.values[[i, j]];
            let dtheta_lap = x * lap_p.values[[i, j]] - p * lap_x.values[[i, j]];
            let l = lap.values[[i, j]];
            ct[[i, j]] = -(l2 * h2 / 4.0) * (dtheta_lap - l * dtheta_w / f);
            cc[[i, j]] = (l2 * (-(x * x + p * p) + h2 * l / (4.0 * f)) - 1.0) * dtheta_w;
        }
        let ct = ScalarField::new(g, ct, "dW/dt closed")?;
        discrepancy = Some(ScalarField::new(g, &total - &ct.values, "dW/dt discrepancy")?);
        closed_total = Some(ct);
        closed_conv = Some(ScalarField::new(g, cc, "w.grad W closed")?);
    }

    Ok(LagrangeTerms {
        convective: ScalarField::new(g, conv, "w.grad W")?,
        expansion: ScalarField::new(g, expa, "W div w")?,
        total_derivative: ScalarField::new(g, total, "dW/dt")?,
        total_derivative_closed: closed_total,
        convective_closed: closed_conv,
        discrepancy,
        mask: vel.mask.clone(),
    })
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::current::current_general;
    use crate::kerr::{coherent_state, evolve, fock_superposition};
    use crate::wigner::wigner_of_state;

    fn setup(state: &crate::kerr::StateVector, params: &KerrParams, n: usize) -> (ScalarField, CurrentBundle) {
        let g = PhaseGrid::symmetric(6.0, n).unwrap();
        let w = wigner_of_state(state, &g, params.hbar).unwrap();
        let b = current_general(&FieldDerivatives::compute(&w).unwrap(), params, 0.0).unwrap();
        (w, b)
    }

    #[test]
    fn harmonic_vacuum_velocity_is_rotation() {
        let s = coherent_state(Complex64::new(0.0, 0.0), 0).unwrap();
        let p = KerrParams::atomic(0.0);
        let (w, b) = setup(&s, &p, 65);
        let v = velocity_field(&b, &w, None).unwrap();
        assert!(v.singular_set.is_empty());
        let g = w.grid;
        let mut checked = 0;
        for ((i, j), m) in v.mask.indexed_iter() {
            if *m {
                assert!((v.w.x[[i, j]] - g.p(j)).abs() < 1e-12);
                assert!((v.w.p[[i, j]] + g.x(i)).abs() < 1e-12);
                checked += 1;
            }
        }
        assert!(checked > 100);
        let l = lagrange_terms(&w, &v, &p).unwrap();
        assert!(l.masked_max(&l.total_derivative) < 1e-8);
    }

    #[test]
    fn negative_regions_give_singular_cells() {
        let s = fock_superposition(&[(0, Complex64::new(1.0, 0.0)), (1, Complex64::new(1.0, 0.0))], 1).unwrap();
        let p = KerrParams::atomic(0.25);
        let (w, b) = setup(&s, &p, 129);
        assert!(w.min() < 0.0);
        let v = velocity_field(&b, &w, None).unwrap();
        assert!(!v.singular_set.is_empty());
    }

    #[test]
    fn closed_forms_agree() {
        let p = KerrParams::atomic(0.25);
        let s = evolve(&coherent_state(Complex64::new(7.0 / 12.0, 0.0), 20).unwrap(), 3.0, &p).unwrap();
        let (w, b) = setup(&s, &p, 129);
        let v = velocity_field(&b, &w, None).unwrap();
        let l = lagrange_terms(&w, &v, &p).unwrap();
        assert!(l.closed_form_relative().unwrap() < 1e-6, "{:?}", l.closed_form_relative());
        assert!(l.convective_relative().unwrap() < 1e-6, "{:?}", l.convective_relative());
    }

    #[test]
    fn general_parameters_skip_closed_forms() {
        let s = coherent_state(Complex64::new(0.5, 0.0), 20).unwrap();
        let mut p = KerrParams::atomic(0.1);
        p.mass = 2.0;
        let (w, b) = setup(&s, &p, 65);
        let v = velocity_field(&b, &w, None).unwrap();
        let l = lagrange_terms(&w, &v, &p).unwrap();
        assert!(l.discrepancy.is_none() && l.convective_closed.is_none());
    }
}

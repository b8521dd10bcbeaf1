//! Finite-difference derivatives of grid fields.
//!
//! Central stencils of the requested accuracy order in the interior and
//! one-sided stencils of the same order near the box edges. Weights come from
//! Fornberg's recursion, so any order/accuracy pair is available.

use ndarray::{Array2, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::ScalarField;

pub const DEFAULT_ACCURACY: usize = 8;

/// Fornberg weights for derivatives `0..=order` at `x0` from `nodes`;
/// returns the row for `order`.
fn fornberg(x0: f64, nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Per-node stencils along one axis of length `n`, unit spacing.
struct AxisStencil {
    /// (first node, weights) for each output index
    rows: Vec<(usize, Vec<f64>)>,
}

impl AxisStencil {
    fn new(n: usize, order: usize, accuracy: usize) -> Result<Self> {
        let half = order.div_ceil(2) - 1 + accuracy / 2;
        let central = 2 * half + 1;
        let one_sided = order + accuracy;
        let needed = central.max(one_sided);
        if n < needed {
            return Err(Error::GridTooSmall { needed, have: n });
        }
        let central_w = fornberg(0.0, &(0..central).map(|k| k as f64 - half as f64).collect::<Vec<_>>(), order);
        let rows = (0..n)
            .map(|i| {
                if i >= half && i + half < n {
                    (i - half, central_w.clone())
                } else {
                    let lo = if i < half { 0 } else { n - one_sided };
                    let nodes: Vec<f64> = (lo..lo + one_sided).map(|k| k as f64).collect();
                    (lo, fornberg(i as f64, &nodes, order))
                }
            })
            .collect();
        Ok(Self { rows })
    }

    /// Differences are taken against the node's own value, so constants map
    /// to exact zeros.
    fn apply(&self, input: &[f64], out: &mut [f64], scale: f64) {
        for (i, (o, (lo, w))) in out.iter_mut().zip(&self.rows).enumerate() {
            let c = input[i];
            let s: f64 = w.iter().zip(&input[*lo..*lo + w.len()]).map(|(a, b)| a * (b - c)).sum();
            *o = s * scale;
        }
    }
}

fn derivative_along(values: &Array2<f64>, axis: Axis, order: usize, accuracy: usize, h: f64) -> Result<Array2<f64>> {
    if order == 0 {
        return Ok(values.clone());
    }
    let n = values.len_of(axis);
    let st = AxisStencil::new(n, order, accuracy)?;
    let scale = h.powi(-(order as i32));
    let mut out = Array2::zeros(values.raw_dim());
    let other = if axis == Axis(0) { Axis(1) } else { Axis(0) };
    out.axis_iter_mut(other)
        .into_par_iter()
        .zip(values.axis_iter(other).into_par_iter())
        .for_each(|(mut o, v)| {
            let input: Vec<f64> = v.iter().copied().collect();
            let mut buf = vec![0.0; n];
            st.apply(&input, &mut buf, scale);
            for (dst, src) in o.iter_mut().zip(buf) {
                *dst = src;
            }
        });
    Ok(out)
}

/// `∂x^a ∂p^b f` with the default 8th-order stencils.
pub fn differentiate(field: &ScalarField, dx_order: usize, dp_order: usize) -> Result<ScalarField> {
    differentiate_with(field, dx_order, dp_order, DEFAULT_ACCURACY)
}

pub fn differentiate_with(field: &ScalarField, dx_order: usize, dp_order: usize, accuracy: usize) -> Result<ScalarField> {
    if dx_order + dp_order > 3 {
        return Err(Error::InvalidParameter(format!(
            "total derivative order {} exceeds 3",
            dx_order + dp_order
        )));
    }
    if accuracy == 0 || accuracy % 2 == 1 {
        return Err(Error::InvalidParameter("accuracy order must be even and positive".into()));
    }
    let g = field.grid;
    let dx = derivative_along(&field.values, Axis(0), dx_order, accuracy, g.hx())?;
    let d = derivative_along(&dx, Axis(1), dp_order, accuracy, g.hp())?;
    let label = format!("d{}x{}p({})", dx_order, dp_order, field.label);
    ScalarField::new(g, d, label)
}

/// A field with all derivatives up to second order.
#[derive(Debug, Clone)]
pub struct FieldDerivatives {
    pub f: ScalarField,
    pub fx: ScalarField,
    pub fp: ScalarField,
    pub fxx: ScalarField,
    pub fpp: ScalarField,
    pub fxp: ScalarField,
}

impl FieldDerivatives {
    pub fn compute(field: &ScalarField) -> Result<Self> {
        Self::compute_with(field, DEFAULT_ACCURACY)
    }

    pub fn compute_with(field: &ScalarField, accuracy: usize) -> Result<Self> {
        Ok(Self {
            fx: differentiate_with(field, 1, 0, accuracy)?,
            fp: differentiate_with(field, 0, 1, accuracy)?,
            fxx: differentiate_with(field, 2, 0, accuracy)?,
            fpp: differentiate_with(field, 0, 2, accuracy)?,
            fxp: differentiate_with(field, 1, 1, accuracy)?,
            f: field.clone(),
        })
    }

    pub fn laplacian(&self) -> ScalarField {
        ScalarField::new(self.f.grid, &self.fxx.values + &self.fpp.values, "lap").unwrap()
    }
}

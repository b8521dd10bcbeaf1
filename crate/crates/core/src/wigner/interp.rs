use ndarray::Array2;

use super::stencil::differentiate;
use crate::error::{Error, Result};
use crate::grid::{PhaseGrid, ScalarField};

/// Bicubic Hermite interpolant of a grid field. Node slopes and the cross
/// derivative come from the field's high-order finite differences, so the
/// interpolant is exact at nodes and for any bicubic polynomial.
#[derive(Debug, Clone)]
pub struct Interpolator {
    grid: PhaseGrid,
    f: Array2<f64>,
    fx: Array2<f64>,
    fp: Array2<f64>,
    fxp: Array2<f64>,
}

impl Interpolator {
    pub fn new(field: &ScalarField) -> Result<Self> {
        Ok(Self {
            grid: field.grid,
            f: field.values.clone(),
            fx: differentiate(field, 1, 0)?.values,
            fp: differentiate(field, 0, 1)?.values,
            fxp: differentiate(field, 1, 1)?.values,
        })
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn eval(&self, x: f64, p: f64) -> Result<f64> {
        let g = &self.grid;
        if !g.contains(x, p) {
            return Err(Error::OutOfBox { x, p });
        }
        let (hx, hp) = (g.hx(), g.hp());
        let locate = |t: f64, n: usize| -> (usize, f64) {
            let i = (t.floor() as usize).min(n - 2);
            (i, t - i as f64)
        };
        let (i, u) = locate((x - g.x_min) / hx, g.nx);
        let (j, v) = locate((p - g.p_min) / hp, g.np);
        let val = |u: f64| [2.0 * u * u * u - 3.0 * u * u + 1.0, -2.0 * u * u * u + 3.0 * u * u];
        let slope = |u: f64| [u * u * u - 2.0 * u * u + u, u * u * u - u * u];
        let (vu, su, vv, sv) = (val(u), slope(u), val(v), slope(v));
        let mut out = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                let idx = [i + a, j + b];
                out += self.f[idx] * vu[a] * vv[b]
                    + hx * self.fx[idx] * su[a] * vv[b]
                    + hp * self.fp[idx] * vu[a] * sv[b]
                    + hx * hp * self.fxp[idx] * su[a] * sv[b];
            }
        }
        Ok(out)
    }
}

/// One-off bicubic evaluation. Build an [`Interpolator`] when sampling many
/// points of the same field.
pub fn interpolate(field: &ScalarField, x: f64, p: f64) -> Result<f64> {
    if !field.grid.contains(x, p) {
        return Err(Error::OutOfBox { x, p });
    }
    Interpolator::new(field)?.eval(x, p)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn exact_at_nodes() {
        let g = PhaseGrid::symmetric(3.0, 33).unwrap();
        let f = ScalarField::from_fn(g, "f", |x, p| (x * 1.3).sin() * (p - 0.2).cos());
        let it = Interpolator::new(&f).unwrap();
        for (i, j) in [(0, 0), (5, 17), (32, 32), (16, 3)] {
            assert_eq!(it.eval(g.x(i), g.p(j)).unwrap(), f.values[[i, j]]);
        }
    }

    #[test]
    fn gaussian_off_node() {
        let g = PhaseGrid::symmetric(6.0, 257).unwrap();
        let w = ScalarField::from_fn(g, "W", |x, p| (-(x * x + p * p)).exp() / PI);
        let v = interpolate(&w, 0.5, 0.5).unwrap();
        assert!((v - (-0.5f64).exp() / PI).abs() < 1e-6);
    }

    #[test]
    fn bilinear_plane_is_reproduced() {
        let g = PhaseGrid::symmetric(2.0, 33).unwrap();
        let f = ScalarField::from_fn(g, "plane", |x, p| 1.0 + 2.0 * x - 3.0 * p + 0.5 * x * p);
        let it = Interpolator::new(&f).unwrap();
        for (x, p) in [(0.01, 0.33), (-1.77, 1.2), (1.99, -1.99)] {
            let want = 1.0 + 2.0 * x - 3.0 * p + 0.5 * x * p;
            assert!((it.eval(x, p).unwrap() - want).abs() < 1e-11);
        }
    }

    #[test]
    fn outside_box_is_an_error() {
        let g = PhaseGrid::symmetric(2.0, 33).unwrap();
        let f = ScalarField::constant(g, 1.0, "c");
        assert!(matches!(interpolate(&f, 2.5, 0.0), Err(Error::OutOfBox { .. })));
    }
}

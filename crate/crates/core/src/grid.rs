//! Uniform phase-space lattices and the fields sampled on them.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 33;
pub const DEFAULT_POINTS: usize = 257;

/// Uniform `(x, p)` lattice. Node `(i, j)` sits at
/// `(x_min + i·hx, p_min + j·hp)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl PhaseGrid {
    pub fn new(x_min: f64, x_max: f64, p_min: f64, p_max: f64, nx: usize, np: usize) -> Result<Self> {
        let g = Self {
            x_min,
            x_max,
            p_min,
            p_max,
            nx,
            np,
        };
        g.validate()?;
        Ok(g)
    }

    /// Square box `[-L, L]²` with `n` points per axis.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, -half_width, half_width, n, n)
    }

    /// Default box for a state of displacement `|α|` and squeezing `ζ`:
    /// half-width `max(6, 2·max(|α|, e^{|ζ|}) + 4)·√ħ`, 257 points.
    pub fn default_for(alpha_abs: f64, zeta: f64, hbar: f64) -> Result<Self> {
        let reach = alpha_abs.max(zeta.abs().exp());
        Self::symmetric((2.0 * reach + 4.0).max(6.0) * hbar.sqrt(), DEFAULT_POINTS)
    }

    /// Same box with `2(n-1)+1` points per axis (spacing halved).
    pub fn refined(&self) -> Self {
        Self {
            nx: 2 * (self.nx - 1) + 1,
            np: 2 * (self.np - 1) + 1,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("nx", self.nx), ("np", self.np)] {
            if n < MIN_POINTS || n % 2 == 0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be odd and at least {MIN_POINTS}, got {n}"
                )));
            }
        }
        if !(self.x_max > self.x_min && self.p_max > self.p_min)
            || ![self.x_min, self.x_max, self.p_min, self.p_max].iter().all(|v| v.is_finite())
        {
            return Err(Error::InvalidParameter("grid box must be finite and nonempty".into()));
        }
        Ok(())
    }

    pub fn hx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn hp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.hx()
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.hp()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ps(&self) -> Vec<f64> {
        (0..self.np).map(|j| self.p(j)).collect()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.np)
    }

    pub fn contains(&self, x: f64, p: f64) -> bool {
        x >= self.x_min && x <= self.x_max && p >= self.p_min && p <= self.p_max
    }

    /// Whether the box is centred on the origin with equal spacings, so the
    /// origin is a node and the 8-fold symmetry of the lattice is exact.
    pub fn is_origin_symmetric(&self) -> bool {
        self.x_min == -self.x_max
            && self.p_min == -self.p_max
            && self.nx == self.np
            && self.x_max == self.p_max
    }

    pub fn same_as(&self, other: &PhaseGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    /// Sample a function at every node.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64 + Sync) -> Array2<f64> {
        use ndarray::parallel::prelude::*;
        let mut out = Array2::zeros(self.shape());
        out.axis_iter_mut(ndarray::Axis(0))
            .into_par_iter()
            .enumerate()
            .for_each(|(i, mut row)| {
                let x = self.x(i);
                for (j, v) in row.iter_mut().enumerate() {
                    *v = f(x, self.p(j));
                }
            });
        out
    }
}

/// Real field on a [`PhaseGrid`], indexed `[i, j]` = `(x_i, p_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: PhaseGrid,
    pub values: Array2<f64>,
    pub label: String,
    /// Non-fatal validity notes attached during construction.
    pub warnings: Vec<String>,
}

impl ScalarField {
    pub fn new(grid: PhaseGrid, values: Array2<f64>, label: impl Into<String>) -> Result<Self> {
        if values.dim() != grid.shape() {
            return Err(Error::GridMismatch(format!(
                "values have shape {:?}, grid is {:?}",
                values.dim(),
                grid.shape()
            )));
        }
        Ok(Self {
            grid,
            values,
            label: label.into(),
            warnings: Vec::new(),
        })
    }

    pub fn from_fn(grid: PhaseGrid, label: impl Into<String>, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        Self {
            values: grid.sample(f),
            grid,
            label: label.into(),
            warnings: Vec::new(),
        }
    }

    pub fn constant(grid: PhaseGrid, value: f64, label: impl Into<String>) -> Self {
        Self::from_fn(grid, label, |_, _| value)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn map(&self, label: impl Into<String>, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.mapv(f),
            label: label.into(),
            warnings: Vec::new(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &ScalarField, label: impl Into<String>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.same_as(&other.grid)?;
        let mut values = self.values.clone();
        values.zip_mut_with(&other.values, |a, b| *a = f(*a, *b));
        Self::new(self.grid, values, label)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest `|f|` on the outermost ring of nodes.
    pub fn edge_max_abs(&self) -> f64 {
        let (nx, np) = self.grid.shape();
        let mut m = 0.0f64;
        for i in 0..nx {
            m = m.max(self.values[[i, 0]].abs()).max(self.values[[i, np - 1]].abs());
        }
        for j in 0..np {
            m = m.max(self.values[[0, j]].abs()).max(self.values[[nx - 1, j]].abs());
        }
        m
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> Result<f64> {
        self.grid.same_as(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Trapezoidal `∬ f dx dp`, summed in fixed row-major order.
    pub fn integrate(&self) -> f64 {
        trapezoid(&self.grid, &self.values)
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Two-component field `(J_x, J_p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: PhaseGrid,
    pub x: Array2<f64>,
    pub p: Array2<f64>,
    pub label: String,
}

impl VectorField {
    pub fn new(grid: PhaseGrid, x: Array2<f64>, p: Array2<f64>, label: impl Into<String>) -> Result<Self> {
        if x.dim() != grid.shape() || p.dim() != grid.shape() {
            return Err(Error::GridMismatch("vector components do not match the grid".into()));
        }
        Ok(Self {
            grid,
            x,
            p,
            label: label.into(),
        })
    }

    pub fn zeros(grid: PhaseGrid, label: impl Into<String>) -> Self {
        Self {
            grid,
            x: Array2::zeros(grid.shape()),
            p: Array2::zeros(grid.shape()),
            label: label.into(),
        }
    }

    pub fn component_x(&self) -> ScalarField {
        ScalarField::new(self.grid, self.x.clone(), format!("{}_x", self.label)).unwrap()
    }

    pub fn component_p(&self) -> ScalarField {
        ScalarField::new(self.grid, self.p.clone(), format!("{}_p", self.label)).unwrap()
    }

    /// Largest Euclidean norm over the grid.
    pub fn max_norm(&self) -> f64 {
        self.x
            .iter()
            .zip(self.p.iter())
            .fold(0.0f64, |m, (a, b)| m.max(a.hypot(*b)))
    }

    pub fn max_abs_diff(&self, other: &VectorField) -> Result<f64> {
        self.grid.same_as(&other.grid)?;
        let dx = self.x.iter().zip(other.x.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let dp = self.p.iter().zip(other.p.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        Ok(dx.max(dp))
    }

    pub fn sub(&self, other: &VectorField, label: impl Into<String>) -> Result<Self> {
        self.grid.same_as(&other.grid)?;
        Self::new(self.grid, &self.x - &other.x, &self.p - &other.p, label)
    }

    pub fn add(&self, other: &VectorField, label: impl Into<String>) -> Result<Self> {
        self.grid.same_as(&other.grid)?;
        Self::new(self.grid, &self.x + &other.x, &self.p + &other.p, label)
    }

    /// Field `(x·Jx + p·Jp) / r`, the radial component (0 at the origin).
    pub fn radial_component(&self) -> ScalarField {
        let g = self.grid;
        let mut out = Array2::zeros(g.shape());
        for ((i, j), v) in out.indexed_iter_mut() {
            let (x, p) = (g.x(i), g.p(j));
            let r = x.hypot(p);
            *v = if r > 0.0 { (x * self.x[[i, j]] + p * self.p[[i, j]]) / r } else { 0.0 };
        }
        ScalarField::new(g, out, format!("{}_r", self.label)).unwrap()
    }

    /// Field `x·Jx + p·Jp`.
    pub fn position_dot(&self) -> ScalarField {
        let g = self.grid;
        let mut out = Array2::zeros(g.shape());
        for ((i, j), v) in out.indexed_iter_mut() {
            *v = g.x(i) * self.x[[i, j]] + g.p(j) * self.p[[i, j]];
        }
        ScalarField::new(g, out, format!("r.{}", self.label)).unwrap()
    }

    /// Every `stride`-th node in each direction, for quiver plots.
    pub fn downsample(&self, stride: usize) -> Vec<(f64, f64, f64, f64)> {
        let stride = stride.max(1);
        let mut out = Vec::new();
        for i in (0..self.grid.nx).step_by(stride) {
            for j in (0..self.grid.np).step_by(stride) {
                out.push((self.grid.x(i), self.grid.p(j), self.x[[i, j]], self.p[[i, j]]));
            }
        }
        out
    }
}

/// Trapezoidal rule over the whole grid. Rows are reduced in index order, so
/// the result does not depend on thread scheduling.
pub fn trapezoid(grid: &PhaseGrid, values: &Array2<f64>) -> f64 {
    let (nx, np) = grid.shape();
    let wx = |i: usize| if i == 0 || i == nx - 1 { 0.5 } else { 1.0 };
    let wp = |j: usize| if j == 0 || j == np - 1 { 0.5 } else { 1.0 };
    let mut total = 0.0;
    for i in 0..nx {
        let mut row = 0.0;
        for j in 0..np {
            row += wp(j) * values[[i, j]];
        }
        total += wx(i) * row;
    }
    total * grid.hx() * grid.hp()
}

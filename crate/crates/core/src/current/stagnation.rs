use ndarray::Array2;
use serde::Serialize;

use crate::grid::VectorField;

/// Relative magnitude below which a node counts as stagnant.
pub const DEFAULT_STAGNATION_TOL: f64 = 1e-3;

/// Largest bounding box, in cells, of a cluster still reported as a point.
const POINT_EXTENT: usize = 3;

/// A connected group of flagged cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StagnationCluster {
    pub centroid: (f64, f64),
    pub cells: usize,
    /// Bounding box size in cells along x and p.
    pub extent: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StagnationReport {
    /// Compact clusters, reported by centroid.
    pub points: Vec<(f64, f64)>,
    /// Clusters larger than a few cells: stagnation lines and the far field
    /// where the current has decayed below the tolerance.
    pub extended: Vec<StagnationCluster>,
    /// Every cell was flagged (for instance a vanishing field).
    pub degenerate: bool,
    pub flagged_cells: usize,
}

/// Zeros of a current: grid cells where both components change sign (or
/// touch zero), or with a corner where `|J| < tol · max|J|`, grouped by
/// 8-connectivity.
pub fn stagnation_points(j: &VectorField, tol: f64) -> StagnationReport {
    let g = j.grid;
    let (nx, np) = g.shape();
    let floor = tol * j.max_norm();
    let (cx, cp) = (nx - 1, np - 1);
    let mut flag = Array2::from_elem((cx, cp), false);
    for i in 0..cx {
        for k in 0..cp {
            let idx = [(i, k), (i + 1, k), (i, k + 1), (i + 1, k + 1)];
            let small = idx.iter().any(|&c| j.x[c].hypot(j.p[c]) <= floor);
            flag[[i, k]] = small || (straddles(&j.x, &idx) && straddles(&j.p, &idx));
        }
    }
    let flagged_cells = flag.iter().filter(|f| **f).count();

    let mut seen = Array2::from_elem((cx, cp), false);
    let mut points = Vec::new();
    let mut extended = Vec::new();
    for i in 0..cx {
        for k in 0..cp {
            if !flag[[i, k]] || seen[[i, k]] {
                continue;
            }
            let cells = flood(&flag, &mut seen, (i, k));
            let (mut sx, mut sp) = (0.0, 0.0);
            let (mut i0, mut i1, mut k0, mut k1) = (usize::MAX, 0, usize::MAX, 0);
            for &(a, b) in &cells {
                sx += g.x(a) + 0.5 * g.hx();
                sp += g.p(b) + 0.5 * g.hp();
                i0 = i0.min(a);
                i1 = i1.max(a);
                k0 = k0.min(b);
                k1 = k1.max(b);
            }
            let n = cells.len() as f64;
            let cluster = StagnationCluster {
                centroid: (sx / n, sp / n),
                cells: cells.len(),
                extent: (i1 - i0 + 1, k1 - k0 + 1),
            };
            if cluster.extent.0 <= POINT_EXTENT && cluster.extent.1 <= POINT_EXTENT {
                points.push(cluster.centroid);
            } else {
                extended.push(cluster);
            }
        }
    }
    StagnationReport {
        points,
        extended,
        degenerate: flagged_cells == cx * cp,
        flagged_cells,
    }
}

fn straddles(a: &Array2<f64>, idx: &[(usize, usize); 4]) -> bool {
    let lo = idx.iter().map(|&c| a[c]).fold(f64::INFINITY, f64::min);
    let hi = idx.iter().map(|&c| a[c]).fold(f64::NEG_INFINITY, f64::max);
    lo <= 0.0 && hi >= 0.0
}

fn flood(flag: &Array2<bool>, seen: &mut Array2<bool>, start: (usize, usize)) -> Vec<(usize, usize)> {
    let (cx, cp) = flag.dim();
    let mut stack = vec![start];
    seen[start] = true;
    let mut out = Vec::new();
    while let Some((i, k)) = stack.pop() {
        out.push((i, k));
        for di in -1i64..=1 {
            for dk in -1i64..=1 {
                let (a, b) = (i as i64 + di, k as i64 + dk);
                if a < 0 || b < 0 || a >= cx as i64 || b >= cp as i64 {
                    continue;
                }
                let c = (a as usize, b as usize);
                if flag[c] && !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
    }
    out
}

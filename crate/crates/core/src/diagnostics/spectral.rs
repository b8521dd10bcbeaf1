use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{trapezoid, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Negativity {
    pub min_value: f64,
    /// `∬ max(−W, 0) dx dp`.
    pub negative_volume: f64,
}

pub fn negativity(w: &ScalarField) -> Negativity {
    let neg = w.values.mapv(|v| (-v).max(0.0));
    Negativity {
        min_value: w.min(),
        negative_volume: trapezoid(&w.grid, &neg),
    }
}

/// Radially binned power spectrum of a field. Wavenumbers are in cycles per
/// unit length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSummary {
    /// Bin centres.
    pub wavenumbers: Vec<f64>,
    pub power: Vec<f64>,
    pub centroid: f64,
    pub cutoff: f64,
    /// Fraction of the total power at wavenumbers above `cutoff`.
    pub high_fraction: f64,
}

/// 2D discrete Fourier power of `W`, binned by `|k|` in steps of the
/// fundamental `1/(n h)`. `cutoff` defaults to `4/√ħ`.
pub fn spectral_content(w: &ScalarField, cutoff: Option<f64>, hbar: f64) -> Result<SpectralSummary> {
    let g = w.grid;
    if g.nx != g.np || (g.hx() - g.hp()).abs() > 1e-12 * g.hx() {
        return Err(Error::GridMismatch("spectral content needs a square grid".into()));
    }
    let n = g.nx;
    let mut data: Array2<Complex64> = w.values.mapv(|v| Complex64::new(v, 0.0));
    let fft = FftPlanner::new().plan_fft_forward(n);
    for mut row in data.rows_mut() {
        let mut buf: Vec<Complex64> = row.to_vec();
        fft.process(&mut buf);
        row.assign(&ndarray::ArrayView1::from(&buf));
    }
    for mut col in data.columns_mut() {
        let mut buf: Vec<Complex64> = col.to_vec();
        fft.process(&mut buf);
        col.assign(&ndarray::ArrayView1::from(&buf));
    }
    let dk = 1.0 / (n as f64 * g.hx());
    let freq = |k: usize| if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
    let cutoff = cutoff.unwrap_or(4.0 / hbar.sqrt());
    let bins = n / 2 + 1;
    let mut power = vec![0.0; bins];
    let (mut total, mut high, mut weighted) = (0.0, 0.0, 0.0);
    for ((a, b), c) in data.indexed_iter() {
        let k = dk * freq(a).hypot(freq(b));
        let p = c.norm_sqr();
        total += p;
        weighted += k * p;
        if k > cutoff {
            high += p;
        }
        let bin = ((k / dk).round() as usize).min(bins - 1);
        power[bin] += p;
    }
    Ok(SpectralSummary {
        wavenumbers: (0..bins).map(|b| b as f64 * dk).collect(),
        power,
        centroid: if total > 0.0 { weighted / total } else { 0.0 },
        cutoff,
        high_fraction: if total > 0.0 { high / total } else { 0.0 },
    })
}

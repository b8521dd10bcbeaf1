use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::params::KerrParams;
use crate::wigner::Interpolator;

pub const DEFAULT_N_THETA: usize = 512;
pub const MIN_N_THETA: usize = 64;

/// Classical rotation angle `(1 + Λ²r²)t` of the circle of radius `r`.
pub fn classical_phase(r: f64, t: f64, params: &KerrParams) -> f64 {
    (1.0 + params.lambda2() * r * r) * t
}

/// `W` on a circle. Samples sit at equally spaced frame angles
/// `θ'_k = 2πk/N`; the lab angle is `θ'_k − shift`, where `shift` is the
/// classical phase in the co-rotating frame and zero otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingTrace {
    pub radius: f64,
    pub time: f64,
    pub shift: f64,
    pub frame_angles: Vec<f64>,
    pub values: Vec<f64>,
}

impl RingTrace {
    pub fn lab_angles(&self) -> Vec<f64> {
        self.frame_angles.iter().map(|a| a - self.shift).collect()
    }

    /// `∮W dθ` by the periodic trapezoid rule.
    pub fn integral(&self) -> f64 {
        TAU / self.values.len() as f64 * self.values.iter().sum::<f64>()
    }

    /// Circular mean frame angle of the positive part of the trace.
    pub fn circular_mean(&self) -> f64 {
        let (mut s, mut c) = (0.0, 0.0);
        for (a, v) in self.frame_angles.iter().zip(&self.values) {
            if *v > 0.0 {
                s += v * a.sin();
                c += v * a.cos();
            }
        }
        s.atan2(c)
    }

    /// Number of sign changes around the closed curve.
    pub fn zero_crossings(&self) -> usize {
        let n = self.values.len();
        (0..n)
            .filter(|&k| {
                let (a, b) = (self.values[k], self.values[(k + 1) % n]);
                (a < 0.0 && b >= 0.0) || (a >= 0.0 && b < 0.0)
            })
            .count()
    }

    /// Frame angles of all sign changes (linear interpolation between samples).
    pub fn zero_angles(&self) -> Vec<f64> {
        let n = self.values.len();
        let h = TAU / n as f64;
        let mut out = Vec::new();
        for k in 0..n {
            let (a, b) = (self.values[k], self.values[(k + 1) % n]);
            if (a < 0.0) != (b < 0.0) {
                out.push(self.frame_angles[k] + h * a / (a - b));
            }
        }
        out
    }

    fn spectrum(&self) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = self.values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
        buf
    }

    /// Spectral `d²W/dθ²` at the samples. The Nyquist mode is dropped.
    pub fn second_derivative(&self) -> Vec<f64> {
        let n = self.values.len();
        let mut buf = self.spectrum();
        for (k, c) in buf.iter_mut().enumerate() {
            let m = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            *c *= if 2 * k == n { 0.0 } else { -m * m };
        }
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        buf.iter().map(|c| c.re / n as f64).collect()
    }

    /// Value and `d²/dθ²` at any frame angle from the trigonometric
    /// interpolant of the trace.
    pub fn eval_with_curvature(&self, frame_angle: f64) -> (f64, f64) {
        let n = self.values.len();
        let buf = self.spectrum();
        let (mut f, mut f2) = (0.0, 0.0);
        for (m, c) in buf.iter().enumerate().take(n / 2 + 1) {
            let z = (c * Complex64::from_polar(1.0, m as f64 * frame_angle)).re;
            if m == 0 || 2 * m == n {
                f += z;
            } else {
                let mf = m as f64;
                f += 2.0 * z;
                f2 -= 2.0 * mf * mf * z;
            }
        }
        (f / n as f64, f2 / n as f64)
    }
}

/// Interpolant of one field, for repeated ring sampling.
#[derive(Debug, Clone)]
pub struct RingSampler {
    interp: Interpolator,
    time: f64,
}

impl RingSampler {
    pub fn new(w: &ScalarField, time: f64) -> Result<Self> {
        Ok(Self {
            interp: Interpolator::new(w)?,
            time,
        })
    }

    pub fn trace(&self, r: f64, n_theta: usize, shift: f64) -> Result<RingTrace> {
        if n_theta < MIN_N_THETA {
            return Err(Error::InvalidParameter(format!("need at least {MIN_N_THETA} ring samples")));
        }
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidParameter(format!("radius must be non-negative, got {r}")));
        }
        let frame_angles: Vec<f64> = (0..n_theta).map(|k| TAU * k as f64 / n_theta as f64).collect();
        let values = frame_angles
            .iter()
            .map(|a| {
                let (s, c) = (a - shift).sin_cos();
                self.interp.eval(r * c, r * s)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RingTrace {
            radius: r,
            time: self.time,
            shift,
            frame_angles,
            values,
        })
    }

    pub fn probability(&self, r: f64, n_theta: usize) -> Result<f64> {
        Ok(self.trace(r, n_theta, 0.0)?.integral())
    }
}

/// Ring trace of `W` at radius `r`; `shift` re-indexes samples into the
/// co-rotating frame (see [`classical_phase`]).
pub fn ring_trace(w: &ScalarField, r: f64, n_theta: usize, shift: Option<f64>) -> Result<RingTrace> {
    RingSampler::new(w, 0.0)?.trace(r, n_theta, shift.unwrap_or(0.0))
}

/// `∮W(r, θ) dθ`.
pub fn ring_probability(w: &ScalarField, r: f64, n_theta: usize) -> Result<f64> {
    RingSampler::new(w, 0.0)?.probability(r, n_theta)
}

/// Approximate speed along a ring,
/// `r[1 + Λ²(r² − (ħ²/4r²) W_θθ/W)]`. Fails where `|W|` drops below
/// `1e-6 · max W`, where the approximation breaks down.
pub fn ring_velocity_approx(w: &ScalarField, r: f64, theta: f64, params: &KerrParams) -> Result<f64> {
    params.require_unit_kerr()?;
    if r.is_nan() || r <= 0.0 {
        return Err(Error::InvalidParameter("ring velocity needs r > 0".into()));
    }
    let trace = ring_trace(w, r, DEFAULT_N_THETA, None)?;
    let (f, f2) = trace.eval_with_curvature(theta.rem_euclid(TAU));
    let floor = 1e-6 * w.max();
    if f.abs() < floor {
        return Err(Error::NearZero { value: f, floor });
    }
    let h2 = params.hbar * params.hbar;
    Ok(r * (1.0 + params.lambda2() * (r * r - h2 / (4.0 * r * r) * f2 / f)))
}

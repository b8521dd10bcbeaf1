use serde::Serialize;

use super::shear::ShearSeries;
use crate::error::{Error, Result};

pub const DEFAULT_SMOOTHING_WINDOW: usize = 5;
/// Rolling-median window for the baseline of a `Π` series.
pub const DEFAULT_BASELINE_WINDOW: usize = 31;
/// Events must exceed this many median absolute deviations.
pub const MAD_FACTOR: f64 = 3.0;
/// Largest denominator used when naming an event time.
pub const MAX_DENOMINATOR: u32 = 8;
/// Deviations below this fraction of `max|smoothed|` are rounding noise.
pub const NOISE_FLOOR: f64 = 1e-8;

/// Centered moving average; near the ends the window is truncated to the
/// samples that exist.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let half = window.max(1) / 2;
    let n = values.len();
    (0..n)
        .map(|i| {
            let (lo, hi) = (i.saturating_sub(half), (i + half).min(n.saturating_sub(1)));
            values[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// `smoothed − rolling median` over `baseline_window` samples. The window is
/// centred where it fits and pinned to the first or last `baseline_window`
/// samples near the ends.
pub fn deviation(series: &ShearSeries, baseline_window: usize) -> Vec<f64> {
    let s = &series.smoothed;
    let n = s.len();
    let width = baseline_window.clamp(1, n.max(1));
    let half = width / 2;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half).min(n - width);
            let mut w = s[lo..lo + width].to_vec();
            s[i] - median(&mut w)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    Recurrence,
    FractionalRevival,
    /// No recurrence time to compare against.
    Unassigned,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecialEvent {
    pub time: f64,
    pub index: usize,
    pub kind: EventKind,
    pub deviation: f64,
    /// `|deviation|` in units of the median absolute deviation.
    pub score: f64,
    /// Nearest `p/q` of the recurrence time.
    pub fraction: Option<(u32, u32)>,
}

/// Nearest fraction `p/q` to `x ≥ 0` with `q ≤ max_q`; ties go to the
/// smaller denominator.
pub fn nearest_fraction(x: f64, max_q: u32) -> (u32, u32) {
    let mut best = (x.round().max(0.0) as u32, 1u32);
    let mut err = (x - best.0 as f64).abs();
    for q in 2..=max_q {
        let p = (x * q as f64).round().max(0.0) as u32;
        let e = (x - p as f64 / q as f64).abs();
        if e < err - 1e-12 {
            let g = gcd(p, q);
            best = (p / g, q / g);
            err = e;
        }
    }
    best
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// Extrema of `|d|` that clear `3 × MAD` and the noise floor, strongest
/// first. Endpoints count
/// as extrema when they exceed their single neighbour.
pub fn detect_special_states(series: &ShearSeries, baseline_window: usize) -> Result<Vec<SpecialEvent>> {
    let needed = 3 * baseline_window.max(1);
    if series.len() < needed {
        return Err(Error::SeriesTooShort {
            needed,
            have: series.len(),
        });
    }
    let d = deviation(series, baseline_window);
    let mut tmp = d.clone();
    let centre = median(&mut tmp);
    let mut spread: Vec<f64> = d.iter().map(|v| (v - centre).abs()).collect();
    let mad = median(&mut spread);
    let scale = series.smoothed.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = (MAD_FACTOR * mad).max(NOISE_FLOOR * scale);
    let n = d.len();
    let mut events = Vec::new();
    for i in 0..n {
        let a = d[i].abs();
        let left = i == 0 || a > d[i - 1].abs();
        let right = i + 1 == n || a >= d[i + 1].abs();
        if !(left && right) || a <= threshold || a == 0.0 {
            continue;
        }
        let t = series.times[i];
        let (kind, fraction) = match series.recurrence {
            Some(period) => {
                let f = nearest_fraction(t / period, MAX_DENOMINATOR);
                let kind = if f.1 == 1 { EventKind::Recurrence } else { EventKind::FractionalRevival };
                (kind, Some(f))
            }
            None => (EventKind::Unassigned, None),
        };
        events.push(SpecialEvent {
            time: t,
            index: i,
            kind,
            deviation: d[i],
            score: if mad > 0.0 { a / mad } else { f64::INFINITY },
            fraction,
        });
    }
    events.sort_by(|a, b| b.deviation.abs().total_cmp(&a.deviation.abs()).then(a.index.cmp(&b.index)));
    Ok(events)
}

//! Special functions shared by the state constructors, the Wigner kernel and
//! the quadrature oracle.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// `ln(n!)`, exact summation below 32 and Stirling's series above.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 32 {
        (2..=n).map(|k| (k as f64).ln()).sum()
    } else {
        let x = n as f64 + 1.0;
        // ln Γ(x) by Stirling with the first four Bernoulli corrections
        let x2 = x * x;
        (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x2)
            + 1.0 / (1260.0 * x2 * x2 * x)
            - 1.0 / (1680.0 * x2 * x2 * x2 * x)
    }
}

/// Normalized harmonic-oscillator eigenfunctions `ψ_0(x) .. ψ_n(x)` for unit
/// mass and frequency, by the stable three-term recurrence.
pub fn hermite_functions(n_max: usize, x: f64, hbar: f64) -> Vec<f64> {
    let xi = x / hbar.sqrt();
    let mut out = Vec::with_capacity(n_max + 1);
    let psi0 = (PI * hbar).powf(-0.25) * (-0.5 * xi * xi).exp();
    out.push(psi0);
    if n_max == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * xi * psi0);
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * xi * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

type Rule = (Vec<f64>, Vec<f64>);

/// [`gauss_legendre`] memoized per node count.
pub fn gauss_legendre_cached(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Rule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return hit.clone();
    }
    let rule = Arc::new(gauss_legendre(n));
    cache.lock().unwrap().entry(n).or_insert(rule).clone()
}

/// Normalized associated Laguerre functions
/// `f_j(X) = √(j!/(j+k)!) · e^{-X/2} · X^{k/2} · L_j^{(k)}(X)` for `j = 0..=n`.
///
/// The recurrence runs in a rescaled representation so that neither
/// `e^{-X/2}` underflow nor growth of `L_j` overflows for `j` in the
/// hundreds. Returns `None` if the result cannot be represented.
pub fn laguerre_functions(n: usize, k: usize, x: f64) -> Option<Vec<f64>> {
    let mut out = vec![0.0; n + 1];
    laguerre_functions_into(k, x, &mut out).then_some(out)
}

/// As [`laguerre_functions`], writing `out.len()` values in place.
pub(crate) fn laguerre_functions_into(k: usize, x: f64, out: &mut [f64]) -> bool {
    let kf = k as f64;
    recur(
        k,
        x,
        out,
        0.5 * ln_factorial(k),
        |j| 1.0 / ((j as f64 + 1.0) * (j as f64 + 1.0 + kf)).sqrt(),
        |j| (j as f64 * (j as f64 + kf)).sqrt(),
    )
}

/// Recurrence coefficients for all orders below `dim`, shared across many
/// evaluation points.
pub(crate) struct LaguerreTable {
    up: Vec<Vec<f64>>,
    down: Vec<Vec<f64>>,
    half_ln_fact: Vec<f64>,
}

impl LaguerreTable {
    pub(crate) fn new(dim: usize) -> Self {
        let up = (0..dim)
            .map(|k| (0..dim).map(|j| 1.0 / ((j as f64 + 1.0) * (j as f64 + 1.0 + k as f64)).sqrt()).collect())
            .collect();
        let down = (0..dim)
            .map(|k| (0..dim).map(|j| (j as f64 * (j as f64 + k as f64)).sqrt()).collect())
            .collect();
        let half_ln_fact = (0..dim).map(|k| 0.5 * ln_factorial(k)).collect();
        Self { up, down, half_ln_fact }
    }

    /// [`laguerre_functions_into`] for `k < dim` and `out.len() <= dim`.
    pub(crate) fn fill(&self, k: usize, x: f64, out: &mut [f64]) -> bool {
        let (up, down) = (&self.up[k], &self.down[k]);
        recur(k, x, out, self.half_ln_fact[k], |j| up[j], |j| down[j])
    }
}

fn recur(
    k: usize,
    x: f64,
    out: &mut [f64],
    half_ln_fact: f64,
    up: impl Fn(usize) -> f64,
    down: impl Fn(usize) -> f64,
) -> bool {
    let len = out.len();
    if len == 0 {
        return true;
    }
    let kf = k as f64;
    // log of f_0 = e^{-X/2} X^{k/2} / √k!
    let log_f0 = if k == 0 {
        -0.5 * x
    } else if x == 0.0 {
        out.fill(0.0);
        return true;
    } else {
        -0.5 * x + 0.5 * kf * x.ln() - half_ln_fact
    };
    // Carry values as mantissa * exp(log_scale); renormalize when large.
    let mut log_scale = log_f0;
    let mut scale = log_scale.exp();
    let mut prev = 0.0;
    let mut cur = 1.0;
    let store = |v: f64, log_scale: f64, scale: f64| -> f64 {
        if log_scale > -700.0 {
            return v * scale;
        }
        let lv = log_scale + v.abs().ln();
        if v == 0.0 || lv < -745.0 {
            0.0
        } else {
            v.signum() * lv.exp()
        }
    };
    out[0] = store(cur, log_scale, scale);
    for j in 0..len - 1 {
        let next = ((2.0 * j as f64 + 1.0 + kf - x) * cur - down(j) * prev) * up(j);
        prev = cur;
        cur = next;
        let m = cur.abs().max(prev.abs());
        if m > 1e150 || (m < 1e-150 && m > 0.0) {
            prev /= m;
            cur /= m;
            log_scale += m.ln();
            scale = log_scale.exp();
        }
        if !cur.is_finite() {
            return false;
        }
        out[j + 1] = store(cur, log_scale, scale);
    }
    true
}

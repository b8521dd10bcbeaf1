//! Run configuration: a single JSON document, validated before anything runs.

use std::f64::consts::PI;
use std::path::Path;

use anyhow::{bail, Result};
use kerr_phase::classical::GaussianDensity;
use kerr_phase::io::Format;
use kerr_phase::kerr::{
    auto_cutoff, coherent_state_with_tol, fock_superposition, recurrence_time, squeezed_vacuum_with_tol,
    StateKind, StateVector, DEFAULT_TRUNCATION_TOL,
};
use kerr_phase::{KerrParams, PhaseGrid};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub state: StateSpec,
    #[serde(default)]
    pub params: KerrParams,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub times: TimeSpec,
    #[serde(default)]
    pub ring: RingSpec,
    #[serde(default)]
    pub current: CurrentSpec,
    #[serde(default)]
    pub shear: ShearSpec,
    #[serde(default)]
    pub classical: ClassicalSpec,
    #[serde(default)]
    pub output: OutputSpec,
    /// Largest discarded Fock tail mass.
    #[serde(default = "default_truncation_tol")]
    pub truncation_tol: f64,
    /// Fail with a numerical-validity error instead of warning.
    #[serde(default)]
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Coherent {
        alpha: [f64; 2],
        #[serde(default)]
        cutoff: Option<usize>,
    },
    /// Coherent state centred at `(x0, p0)`.
    Gaussian {
        x0: f64,
        p0: f64,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    Squeezed {
        zeta: f64,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    FockSuperposition { terms: Vec<FockTerm> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockTerm {
    pub level: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Symmetric box half-width; chosen from the state when absent.
    #[serde(default)]
    pub half_width: Option<f64>,
    /// `[x_min, x_max, p_min, p_max]`, overrides `half_width`.
    #[serde(default)]
    pub bounds: Option<[f64; 4]>,
    #[serde(default)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    #[default]
    Absolute,
    Pi,
    Recurrence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    #[serde(default)]
    pub list: Option<Vec<f64>>,
    #[serde(default)]
    pub start: Option<f64>,
    #[serde(default)]
    pub stop: Option<f64>,
    #[serde(default)]
    pub step: Option<f64>,
    /// Inclusive sample count between `start` and `stop`.
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub unit: TimeUnit,
}

impl Default for TimeSpec {
    fn default() -> Self {
        Self {
            list: Some(vec![0.0]),
            start: None,
            stop: None,
            step: None,
            count: None,
            unit: TimeUnit::Absolute,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    #[serde(default = "yes")]
    pub co_rotating: bool,
}

impl Default for RingSpec {
    fn default() -> Self {
        Self {
            radii: default_radii(),
            n_theta: default_n_theta(),
            co_rotating: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurrentSpec {
    #[serde(default)]
    pub sigma: f64,
    #[serde(default = "one")]
    pub quiver_stride: usize,
    #[serde(default = "default_stagnation_tol")]
    pub stagnation_tol: f64,
}

impl Default for CurrentSpec {
    fn default() -> Self {
        Self {
            sigma: 0.0,
            quiver_stride: 1,
            stagnation_tol: default_stagnation_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShearSpec {
    #[serde(default = "default_smoothing")]
    pub smoothing_window: usize,
    #[serde(default = "default_baseline")]
    pub baseline_window: usize,
    #[serde(default)]
    pub sigma: f64,
}

impl Default for ShearSpec {
    fn default() -> Self {
        Self {
            smoothing_window: default_smoothing(),
            baseline_window: default_baseline(),
            sigma: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalSpec {
    /// Also write the density snapshots, not just the shear measure.
    #[serde(default = "yes")]
    pub snapshots: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default)]
    pub format: Option<Format>,
}

fn default_radii() -> Vec<f64> {
    vec![1.0]
}
fn default_n_theta() -> usize {
    kerr_phase::diagnostics::DEFAULT_N_THETA
}
fn default_stagnation_tol() -> f64 {
    kerr_phase::current::DEFAULT_STAGNATION_TOL
}
fn default_smoothing() -> usize {
    kerr_phase::diagnostics::DEFAULT_SMOOTHING_WINDOW
}
fn default_baseline() -> usize {
    kerr_phase::diagnostics::DEFAULT_BASELINE_WINDOW
}
fn default_truncation_tol() -> f64 {
    DEFAULT_TRUNCATION_TOL
}
fn yes() -> bool {
    true
}
fn one() -> usize {
    1
}

/// Configuration problems map to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate().map_err(|e| invalid(format!("params: {e}")))?;
        self.grid()?;
        self.times()?;
        if !(self.truncation_tol > 0.0 && self.truncation_tol < 1.0) {
            return Err(invalid("truncation_tol must lie in (0, 1)"));
        }
        if self.ring.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(invalid("ring.radii must be positive"));
        }
        if !(0.0..=1.0).contains(&self.current.sigma) || !(0.0..=1.0).contains(&self.shear.sigma) {
            return Err(invalid("sigma must lie in [0, 1]"));
        }
        if self.shear.smoothing_window == 0 || self.shear.baseline_window == 0 {
            return Err(invalid("shear windows must be positive"));
        }
        self.state().map(|_| ())
    }

    /// SHA-256 of the canonical JSON form (sorted keys, no whitespace).
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(&self.canonical()).expect("config serializes");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// The configuration as a JSON value with every default filled in.
    pub fn canonical(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    fn hbar(&self) -> f64 {
        self.params.hbar
    }

    /// Displacement `α` of coherent and Gaussian states.
    pub fn alpha(&self) -> Option<Complex64> {
        match &self.state {
            StateSpec::Coherent { alpha, .. } => Some(Complex64::new(alpha[0], alpha[1])),
            StateSpec::Gaussian { x0, p0, .. } => {
                let s = (2.0 * self.hbar()).sqrt();
                Some(Complex64::new(x0 / s, p0 / s))
            }
            _ => None,
        }
    }

    pub fn state(&self) -> Result<StateVector> {
        let tol = self.truncation_tol;
        let build = |kind: StateKind, cutoff: Option<usize>| -> Result<usize> {
            match cutoff {
                Some(n) => Ok(n),
                None => auto_cutoff(&kind, tol).map_err(|e| invalid(format!("state: {e}"))),
            }
        };
        let state = match &self.state {
            StateSpec::Coherent { cutoff, .. } | StateSpec::Gaussian { cutoff, .. } => {
                let alpha = self.alpha().unwrap();
                let n = build(StateKind::Coherent { alpha }, *cutoff)?;
                coherent_state_with_tol(alpha, n, tol)
            }
            StateSpec::Squeezed { zeta, cutoff } => {
                let n = build(StateKind::Squeezed { zeta: *zeta }, *cutoff)?;
                squeezed_vacuum_with_tol(*zeta, n, tol)
            }
            StateSpec::FockSuperposition { terms } => {
                let top = terms.iter().map(|t| t.level).max().unwrap_or(0);
                let terms: Vec<_> = terms.iter().map(|t| (t.level, Complex64::new(t.re, t.im))).collect();
                fock_superposition(&terms, top)
            }
        };
        state.map_err(|e| invalid(format!("state: {e}")))
    }

    /// Classical density with the same initial Wigner distribution, where
    /// one exists.
    pub fn classical_twin(&self) -> Result<GaussianDensity> {
        let h = self.hbar();
        let g = match &self.state {
            StateSpec::Coherent { .. } | StateSpec::Gaussian { .. } => GaussianDensity::twin(self.alpha().unwrap(), h),
            StateSpec::Squeezed { zeta, .. } => {
                let (vx, vp) = (0.5 * h * (-2.0 * zeta).exp(), 0.5 * h * (2.0 * zeta).exp());
                GaussianDensity::new((0.0, 0.0), [[vx, 0.0], [0.0, vp]])
            }
            StateSpec::FockSuperposition { .. } => bail!(invalid("Fock superpositions have no classical twin")),
        };
        g.map_err(|e| invalid(format!("classical density: {e}")))
    }

    pub fn grid(&self) -> Result<PhaseGrid> {
        let n = self.grid.points.unwrap_or(kerr_phase::grid::DEFAULT_POINTS);
        let g = if let Some([x0, x1, p0, p1]) = self.grid.bounds {
            PhaseGrid::new(x0, x1, p0, p1, n, n)
        } else if let Some(h) = self.grid.half_width {
            PhaseGrid::symmetric(h, n)
        } else {
            let alpha = self.alpha().map(|a| a.norm()).unwrap_or(0.0);
            let zeta = match &self.state {
                StateSpec::Squeezed { zeta, .. } => *zeta,
                _ => 0.0,
            };
            let top = match &self.state {
                StateSpec::FockSuperposition { terms } => terms.iter().map(|t| t.level).max().unwrap_or(0),
                _ => 0,
            };
            let reach = alpha.max((top as f64 + 0.5).sqrt());
            PhaseGrid::default_for(reach, zeta, self.hbar()).map(|g| PhaseGrid { nx: n, np: n, ..g })
        };
        let g = g.map_err(|e| invalid(format!("grid: {e}")))?;
        g.validate().map_err(|e| invalid(format!("grid: {e}")))?;
        Ok(g)
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        let t = &self.times;
        let scale = match t.unit {
            TimeUnit::Absolute => 1.0,
            TimeUnit::Pi => PI,
            TimeUnit::Recurrence => recurrence_time(&self.params)
                .map_err(|e| invalid(format!("times: recurrence unit needs a Kerr term ({e})")))?,
        };
        let raw = match (&t.list, t.start, t.stop, t.step, t.count) {
            (Some(list), None, None, None, None) => list.clone(),
            (None, Some(a), Some(b), None, Some(n)) if n >= 2 && b > a => {
                (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
            }
            (None, Some(a), Some(_), None, Some(1)) => vec![a],
            (None, Some(a), Some(b), Some(h), None) if h > 0.0 && b >= a => {
                let n = ((b - a) / h + 1e-9).floor() as usize;
                (0..=n).map(|k| a + h * k as f64).collect()
            }
            _ => return Err(invalid("times: give either `list`, or `start`/`stop` with one of `step`/`count`")),
        };
        if raw.is_empty() || raw.iter().any(|v| !v.is_finite()) {
            return Err(invalid("times must be finite and non-empty"));
        }
        if raw.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
            return Err(invalid("times must be strictly increasing"));
        }
        Ok(raw.into_iter().map(|v| v * scale).collect())
    }
}

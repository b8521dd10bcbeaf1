//! One function per subcommand. Each writes its files into the output
//! directory and a `# meta:` line (or binary header) into every file.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use kerr_phase::classical::{classical_current, classical_shear_measure, liouville_pullback, shear_measure_coefficients, ClassicalDensity};
use kerr_phase::current::{current_general, stagnation_points};
use kerr_phase::diagnostics::{
    classical_phase, detect_special_states, deviation, negativity, pi_series, spectral_content, vorticity,
    PiSeriesOptions, RingSampler,
};
use kerr_phase::io::{
    write_field_binary, write_field_csv, write_ring_csv, write_series_csv, write_table_csv,
    write_vector_binary, write_vector_csv, Format,
};
use kerr_phase::kerr::evolve;
use kerr_phase::wigner::{wigner_of_state, FieldDerivatives};
use kerr_phase::{Error as CoreError, ScalarField, VectorField};
use serde_json::{json, Value};

use crate::config::{ConfigError, RunConfig};

/// Numerical problems that make an output untrustworthy; exit code 3.
#[derive(Debug)]
pub struct ValidityError(pub String);

impl std::fmt::Display for ValidityError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidityError {}

/// Largest `tangentiality` still reported as a tangential current.
pub const TANGENTIAL_TOL: f64 = 1e-10;

pub struct Run {
    cfg: RunConfig,
    out: PathBuf,
    command: &'static str,
    hash: String,
    format: Format,
}

impl Run {
    pub fn new(cfg: RunConfig, out: PathBuf, command: &'static str) -> Self {
        let hash = cfg.hash();
        let format = cfg.output.format.unwrap_or_default();
        Self {
            cfg,
            out,
            command,
            hash,
            format,
        }
    }

    fn meta(&self, extra: Value) -> Value {
        let mut m = json!({
            "command": self.command,
            "config_hash": self.hash,
            "config": self.cfg.canonical(),
            "version": env!("CARGO_PKG_VERSION"),
        });
        if let (Value::Object(m), Value::Object(extra)) = (&mut m, extra) {
            m.extend(extra);
        }
        m
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>> {
        let path = self.out.join(name);
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok(BufWriter::new(f))
    }

    fn finish(mut w: BufWriter<File>) -> Result<()> {
        w.flush()?;
        Ok(())
    }

    fn warn(&self, msg: String) -> Result<()> {
        if self.cfg.strict {
            return Err(ValidityError(msg).into());
        }
        eprintln!("warning: {msg}");
        Ok(())
    }

    fn check_scalar(&self, f: &ScalarField) -> Result<()> {
        for w in &f.warnings {
            self.warn(format!("{}: {w}", f.label))?;
        }
        if f.values.iter().any(|v| !v.is_finite()) {
            self.warn(format!("{}: non-finite values", f.label))?;
        }
        Ok(())
    }

    fn check_vector(&self, f: &VectorField) -> Result<()> {
        if f.x.iter().chain(f.p.iter()).any(|v| !v.is_finite()) {
            self.warn(format!("{}: non-finite values", f.label))?;
        }
        Ok(())
    }

    fn write_scalar(&self, stem: &str, f: &ScalarField, meta: &Value) -> Result<()> {
        self.check_scalar(f)?;
        let mut w = self.create(&format!("{stem}.{}", self.format.extension()))?;
        match self.format {
            Format::Csv => write_field_csv(&mut w, f, meta)?,
            Format::Binary => write_field_binary(&mut w, f, meta)?,
        }
        Self::finish(w)
    }

    fn write_vector(&self, stem: &str, f: &VectorField, meta: &Value) -> Result<()> {
        self.check_vector(f)?;
        let mut w = self.create(&format!("{stem}.{}", self.format.extension()))?;
        match self.format {
            Format::Csv => write_vector_csv(&mut w, f, self.cfg.current.quiver_stride.max(1), meta)?,
            Format::Binary => write_vector_binary(&mut w, f, meta)?,
        }
        Self::finish(w)
    }

    fn write_json(&self, name: &str, body: Value) -> Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, &json!({ "meta": self.meta(json!({})), "results": body }))?;
        writeln!(w)?;
        Self::finish(w)
    }

    fn wigner_at(&self, t: f64) -> Result<ScalarField> {
        let state = evolve(&self.cfg.state()?, t, &self.cfg.params)?;
        Ok(wigner_of_state(&state, &self.cfg.grid()?, self.cfg.params.hbar)?)
    }

    pub fn evolve(&self) -> Result<()> {
        let mut summary = Vec::new();
        for (k, t) in self.cfg.times()?.into_iter().enumerate() {
            let w = self.wigner_at(t)?;
            self.write_scalar(&format!("W_t{k:04}"), &w, &self.meta(json!({ "t": t, "field": "W" })))?;
            let spectrum = spectral_content(&w, None, self.cfg.params.hbar)?;
            summary.push(json!({
                "t": t,
                "negativity": negativity(&w),
                "spectral_centroid": spectrum.centroid,
                "spectral_cutoff": spectrum.cutoff,
                "high_frequency_fraction": spectrum.high_fraction,
                "warnings": w.warnings,
            }));
        }
        self.write_json("negativity.json", Value::Array(summary))
    }

    pub fn ring(&self) -> Result<()> {
        let ring = &self.cfg.ring;
        let mut rows = Vec::new();
        for (k, t) in self.cfg.times()?.into_iter().enumerate() {
            let w = self.wigner_at(t)?;
            self.check_scalar(&w)?;
            let sampler = RingSampler::new(&w, t)?;
            for (j, &r) in ring.radii.iter().enumerate() {
                let shift = if ring.co_rotating { classical_phase(r, t, &self.cfg.params) } else { 0.0 };
                let trace = sampler.trace(r, ring.n_theta, shift)?;
                let meta = self.meta(json!({ "t": t, "radius": r, "shift": shift }));
                let mut f = self.create(&format!("ring_t{k:04}_r{j:02}.csv"))?;
                write_ring_csv(&mut f, &trace, &meta)?;
                Self::finish(f)?;
                rows.push(json!({
                    "t": t,
                    "radius": r,
                    "probability": trace.integral(),
                    "circular_mean": trace.circular_mean(),
                    "zero_crossings": trace.zero_crossings(),
                }));
            }
        }
        self.write_json("ring_probabilities.json", Value::Array(rows))
    }

    pub fn current(&self) -> Result<()> {
        let sigma = self.cfg.current.sigma;
        let mut reports = Vec::new();
        for (k, t) in self.cfg.times()?.into_iter().enumerate() {
            let w = self.wigner_at(t)?;
            self.check_scalar(&w)?;
            let d = FieldDerivatives::compute(&w)?;
            let bundle = current_general(&d, &self.cfg.params, sigma)?;
            let delta = vorticity(&bundle.quantum)?;
            let meta = |field: &str| self.meta(json!({ "t": t, "field": field, "sigma": sigma }));
            self.write_vector(&format!("J_t{k:04}"), &bundle.total, &meta("J"))?;
            self.write_vector(&format!("j_t{k:04}"), &bundle.classical, &meta("j"))?;
            self.write_vector(&format!("JQ_t{k:04}"), &bundle.quantum, &meta("JQ"))?;
            self.write_scalar(&format!("delta_t{k:04}"), &delta, &meta("delta"))?;
            let stagnation = stagnation_points(&bundle.total, self.cfg.current.stagnation_tol);
            let radial = tangentiality(&bundle.total);
            reports.push(json!({
                "t": t,
                "tangentiality": radial,
                "tangential": radial <= TANGENTIAL_TOL,
                "stagnation": stagnation,
            }));
        }
        self.write_json("stagnation.json", Value::Array(reports))
    }

    pub fn shear(&self) -> Result<()> {
        let shear = &self.cfg.shear;
        let times = self.cfg.times()?;
        let options = PiSeriesOptions {
            smoothing_window: shear.smoothing_window,
            sigma: shear.sigma,
        };
        let series = pi_series(&self.cfg.state()?, &self.cfg.params, &times, &self.cfg.grid()?, options)?;
        if series.pi_values.iter().any(|v| !v.is_finite()) {
            self.warn("shear series has non-finite values".into())?;
        }
        let dev = deviation(&series, shear.baseline_window);
        let mut f = self.create("series.csv")?;
        write_series_csv(&mut f, &series, &dev, &self.meta(json!({ "recurrence": series.recurrence })))?;
        Self::finish(f)?;
        let events = detect_special_states(&series, shear.baseline_window).map_err(|e| match e {
            CoreError::SeriesTooShort { .. } => anyhow::Error::from(ConfigError(format!("shear: {e}; add times or shrink baseline_window"))),
            e => e.into(),
        })?;
        self.write_json("events.json", json!({ "recurrence": series.recurrence, "events": events }))
    }

    pub fn classical(&self) -> Result<()> {
        let params = &self.cfg.params;
        let twin = self.cfg.classical_twin()?;
        let rho0 = ClassicalDensity::Gaussian(twin);
        let grid = self.cfg.grid()?;
        let exact = shear_measure_coefficients(&twin, params);
        let times = self.cfg.times()?;
        let mut rows = Vec::new();
        for (k, &t) in times.iter().enumerate() {
            let rho = liouville_pullback(&rho0, t, &grid, params)?;
            if self.cfg.classical.snapshots {
                self.write_scalar(&format!("rho_t{k:04}"), &rho, &self.meta(json!({ "t": t, "field": "rho" })))?;
                let j = classical_current(&rho, params);
                self.write_vector(&format!("jrho_t{k:04}"), &j, &self.meta(json!({ "t": t, "field": "j" })))?;
            }
            rows.push(vec![t, classical_shear_measure(&rho, params)?, exact.at(t)]);
        }
        let meta = self.meta(json!({ "exact_coefficients": exact.coefficients }));
        let mut f = self.create("measure.csv")?;
        write_table_csv(&mut f, &["t", "measure", "exact"], &rows, &meta)?;
        Self::finish(f)?;
        let t: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let y: Vec<f64> = rows.iter().map(|r| r[2]).collect();
        let fit = linear_fit(&t, &y);
        self.write_json(
            "fit.json",
            json!({
                "exact_coefficients": exact.coefficients,
                "linear_fit": fit.map(|(slope, intercept, r2)| json!({ "slope": slope, "intercept": intercept, "r_squared": r2 })),
            }),
        )
    }
}

/// `max|x·Jx + p·Jp| / max|J|`: zero for a current tangent to circles
/// about the origin.
pub fn tangentiality(j: &VectorField) -> f64 {
    let scale = j.max_norm();
    if scale == 0.0 {
        0.0
    } else {
        j.position_dot().max_abs() / scale
    }
}

/// Least-squares line: slope, intercept and coefficient of determination.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((slope, my - slope * mx, r2))
}

//! CSV and binary field formats.
//!
//! Every file starts with a JSON metadata line (`# meta: {...}` in CSV, a
//! length-prefixed header in binary). Numbers are written with 17
//! significant digits and LF line endings, so identical inputs give
//! identical bytes.

use std::io::{Read, Write};

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::diagnostics::{RingTrace, ShearSeries};
use crate::error::{Error, Result};
use crate::grid::{PhaseGrid, ScalarField, VectorField};

pub const BINARY_MAGIC: &[u8; 4] = b"KWF1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Binary,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Binary => "kwf",
        }
    }
}

/// `{:.16e}`: 17 significant digits, round-trips every `f64`.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn meta_line(out: &mut impl Write, meta: &Value) -> Result<()> {
    writeln!(out, "# meta: {}", serde_json::to_string(meta).map_err(|e| Error::Io(e.to_string()))?)?;
    Ok(())
}

fn row(out: &mut impl Write, values: &[f64]) -> Result<()> {
    let cells: Vec<String> = values.iter().map(|v| fmt_num(*v)).collect();
    out.write_all(cells.join(",").as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Columns `x,p,value`, x-major.
pub fn write_field_csv(out: &mut impl Write, field: &ScalarField, meta: &Value) -> Result<()> {
    meta_line(out, meta)?;
    writeln!(out, "x,p,value")?;
    let g = field.grid;
    for i in 0..g.nx {
        for j in 0..g.np {
            row(out, &[g.x(i), g.p(j), field.values[[i, j]]])?;
        }
    }
    Ok(())
}

/// Columns `x,p,Jx,Jp`; `stride > 1` keeps every `stride`-th node for quiver
/// plots.
pub fn write_vector_csv(out: &mut impl Write, field: &VectorField, stride: usize, meta: &Value) -> Result<()> {
    meta_line(out, meta)?;
    writeln!(out, "x,p,Jx,Jp")?;
    for (x, p, jx, jp) in field.downsample(stride) {
        row(out, &[x, p, jx, jp])?;
    }
    Ok(())
}

/// Columns `theta,minus_theta_shifted,value`: lab angle, negated frame
/// angle, and `W`.
pub fn write_ring_csv(out: &mut impl Write, trace: &RingTrace, meta: &Value) -> Result<()> {
    meta_line(out, meta)?;
    writeln!(out, "theta,minus_theta_shifted,value")?;
    for ((lab, frame), v) in trace.lab_angles().iter().zip(&trace.frame_angles).zip(&trace.values) {
        row(out, &[*lab, -frame, *v])?;
    }
    Ok(())
}

/// Columns `t,pi,smoothed,deviation`.
pub fn write_series_csv(out: &mut impl Write, series: &ShearSeries, deviation: &[f64], meta: &Value) -> Result<()> {
    if deviation.len() != series.len() {
        return Err(Error::InvalidParameter("deviation length differs from series".into()));
    }
    meta_line(out, meta)?;
    writeln!(out, "t,pi,smoothed,deviation")?;
    for (k, dev) in deviation.iter().enumerate().take(series.len()) {
        row(out, &[series.times[k], series.pi_values[k], series.smoothed[k], *dev])?;
    }
    Ok(())
}

/// Generic table with named columns.
pub fn write_table_csv(out: &mut impl Write, columns: &[&str], rows: &[Vec<f64>], meta: &Value) -> Result<()> {
    meta_line(out, meta)?;
    writeln!(out, "{}", columns.join(","))?;
    for r in rows {
        if r.len() != columns.len() {
            return Err(Error::InvalidParameter("row width differs from header".into()));
        }
        row(out, r)?;
    }
    Ok(())
}

fn grid_json(g: &PhaseGrid) -> Value {
    json!({
        "x_min": g.x_min, "x_max": g.x_max, "p_min": g.p_min, "p_max": g.p_max,
        "nx": g.nx, "np": g.np,
    })
}

fn write_binary(out: &mut impl Write, header: &Value, arrays: &[&Array2<f64>]) -> Result<()> {
    let text = serde_json::to_vec(header).map_err(|e| Error::Io(e.to_string()))?;
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&(text.len() as u32).to_le_bytes())?;
    out.write_all(&text)?;
    for a in arrays {
        for v in a.iter() {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Magic, `u32` LE header length, JSON header, then the values as row-major
/// `f64` LE (index `[i_x, i_p]`).
pub fn write_field_binary(out: &mut impl Write, field: &ScalarField, meta: &Value) -> Result<()> {
    let header = json!({ "meta": meta, "grid": grid_json(&field.grid), "components": ["value"], "label": field.label });
    write_binary(out, &header, &[&field.values])
}

/// As [`write_field_binary`] with the two components stored one after the
/// other.
pub fn write_vector_binary(out: &mut impl Write, field: &VectorField, meta: &Value) -> Result<()> {
    let header = json!({ "meta": meta, "grid": grid_json(&field.grid), "components": ["Jx", "Jp"], "label": field.label });
    write_binary(out, &header, &[&field.x, &field.p])
}

/// Header and component arrays of a binary field file.
pub fn read_binary(input: &mut impl Read) -> Result<(Value, PhaseGrid, Vec<Array2<f64>>)> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(Error::Io("not a KWF1 file".into()));
    }
    let mut len = [0u8; 4];
    input.read_exact(&mut len)?;
    let mut text = vec![0u8; u32::from_le_bytes(len) as usize];
    input.read_exact(&mut text)?;
    let header: Value = serde_json::from_slice(&text).map_err(|e| Error::Io(e.to_string()))?;
    let gj = &header["grid"];
    let num = |k: &str| gj[k].as_f64().ok_or_else(|| Error::Io(format!("header lacks grid.{k}")));
    let grid = PhaseGrid::new(
        num("x_min")?,
        num("x_max")?,
        num("p_min")?,
        num("p_max")?,
        num("nx")? as usize,
        num("np")? as usize,
    )?;
    let n_comp = header["components"].as_array().map(|a| a.len()).unwrap_or(1);
    let mut arrays = Vec::with_capacity(n_comp);
    let mut buf = [0u8; 8];
    for _ in 0..n_comp {
        let mut a = Array2::zeros(grid.shape());
        for v in a.iter_mut() {
            input.read_exact(&mut buf)?;
            *v = f64::from_le_bytes(buf);
        }
        arrays.push(a);
    }
    Ok((header, grid, arrays))
}

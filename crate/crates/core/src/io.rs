//! File formats: signal and spectrum CSV, matrix CSV with `#` metadata,
//! binary PGM heatmaps and JSON manifests.
//!
//! Numbers are written with 17 significant digits so every `f64` reads back
//! bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::comodulogram::{argmax, GridSpec, PacMatrix};
use crate::error::{Error, Result};
use crate::measures::{MeasureConfig, Method};
use crate::signal::Signal;
use crate::spectral::Spectrum;

pub const SIGNAL_HEADER: &str = "time_s,value";
pub const SPECTRUM_HEADER: &str = "freq_hz,psd";

/// Relative tolerance on the time-column spacing.
pub const SPACING_TOL: f64 = 1e-9;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("line {line}: `{}` is not a number", s.trim())))
}

pub fn signal_to_csv(x: &Signal) -> String {
    let mut out = String::with_capacity(48 * x.len());
    out.push_str(SIGNAL_HEADER);
    out.push('\n');
    for (k, &v) in x.samples().iter().enumerate() {
        let _ = writeln!(out, "{},{}", num(x.time(k)), num(v));
    }
    out
}

/// Parses a `time_s,value` table. The sampling rate comes from the time
/// column; rates within the spacing tolerance of an integer snap to it.
pub fn signal_from_csv(text: &str) -> Result<Signal> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == SIGNAL_HEADER => {}
        Some((_, h)) => return Err(Error::Parse(format!("expected header `{SIGNAL_HEADER}`, found `{}`", h.trim()))),
        None => return Err(Error::Parse("empty signal file".into())),
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines {
        let mut cols = line.split(',');
        let (Some(t), Some(v), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(Error::Parse(format!("line {}: expected two columns", i + 1)));
        };
        times.push(parse_f64(t, i + 1)?);
        values.push(parse_f64(v, i + 1)?);
    }
    if times.len() < 2 {
        return Err(Error::Parse("need at least two samples to infer the sampling rate".into()));
    }
    let n = times.len();
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Parse("time column must increase".into()));
    }
    for (k, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > SPACING_TOL * dt {
            return Err(Error::Parse(format!("non-uniform spacing at row {}", k + 2)));
        }
    }
    let mut fs = 1.0 / dt;
    if (fs - fs.round()).abs() <= SPACING_TOL * fs {
        fs = fs.round();
    }
    Signal::new(values, fs)
}

pub fn write_signal_csv(path: &Path, x: &Signal) -> Result<()> {
    Ok(fs::write(path, signal_to_csv(x))?)
}

pub fn read_signal_csv(path: &Path) -> Result<Signal> {
    signal_from_csv(&fs::read_to_string(path)?)
}

pub fn spectrum_to_csv(s: &Spectrum) -> String {
    let mut out = String::from(SPECTRUM_HEADER);
    out.push('\n');
    for (f, v) in s.freqs.iter().zip(&s.values) {
        let _ = writeln!(out, "{},{}", num(*f), num(*v));
    }
    out
}

pub fn write_spectrum_csv(path: &Path, s: &Spectrum) -> Result<()> {
    Ok(fs::write(path, spectrum_to_csv(s))?)
}

/// Metadata lines, then one row per `n` (ascending) with one column per `m`.
pub fn matrix_to_csv(mat: &PacMatrix) -> String {
    let g = mat.grid;
    let mut out = String::new();
    let _ = writeln!(out, "# method: {}", mat.method);
    let _ = writeln!(out, "# normalized: {}", mat.normalized);
    let _ = writeln!(out, "# grid: m={}..{} n={}..{}", g.m_range.0, g.m_range.1, g.n_range.0, g.n_range.1);
    match argmax(mat) {
        Some(p) => {
            let _ = writeln!(out, "# argmax: m={} n={} value={}", p.m, p.n, num(p.value));
        }
        None => out.push_str("# argmax: none\n"),
    }
    let _ = writeln!(out, "# config: {}", serde_json::to_string(&mat.config).expect("config serializes"));
    for row in &mat.values {
        let cells: Vec<String> = row.iter().map(|&v| num(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn parse_range(s: &str) -> Option<(u32, u32)> {
    let (a, b) = s.split_once("..")?;
    Some((a.parse().ok()?, b.parse().ok()?))
}

fn parse_grid(s: &str) -> Result<GridSpec> {
    let bad = || Error::Parse(format!("bad grid line `{s}`"));
    let mut parts = s.split_whitespace();
    let m = parts.next().and_then(|p| p.strip_prefix("m=")).and_then(parse_range).ok_or_else(bad)?;
    let n = parts.next().and_then(|p| p.strip_prefix("n=")).and_then(parse_range).ok_or_else(bad)?;
    Ok(GridSpec::new(m, n))
}

pub fn matrix_from_csv(text: &str) -> Result<PacMatrix> {
    let mut method = None;
    let mut normalized = None;
    let mut grid = None;
    let mut config = MeasureConfig::default();
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let Some((key, value)) = meta.split_once(':') else { continue };
            let value = value.trim();
            match key.trim() {
                "method" => method = Some(value.parse::<Method>().map_err(|e| Error::Parse(e.to_string()))?),
                "normalized" => {
                    normalized = Some(value.parse::<bool>().map_err(|_| Error::Parse(format!("bad flag `{value}`")))?)
                }
                "grid" => grid = Some(parse_grid(value)?),
                "config" => {
                    config = serde_json::from_str(value).map_err(|e| Error::Parse(format!("bad config: {e}")))?
                }
                _ => {}
            }
            continue;
        }
        let row = line.split(',').map(|c| parse_f64(c, i + 1)).collect::<Result<Vec<f64>>>()?;
        if let Some(v) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Parse(format!("line {}: cell value {v} is not a nonnegative number", i + 1)));
        }
        rows.push(row);
    }
    let grid = grid.ok_or_else(|| Error::Parse("missing `# grid:` line".into()))?;
    let mut mat =
        PacMatrix::zeros(method.ok_or_else(|| Error::Parse("missing `# method:` line".into()))?, grid, config);
    mat.normalized = normalized.ok_or_else(|| Error::Parse("missing `# normalized:` line".into()))?;
    let (n_rows, n_cols) = (grid.n_values().len(), grid.m_values().len());
    if rows.len() != n_rows || rows.iter().any(|r| r.len() != n_cols) {
        return Err(Error::Parse(format!("matrix body must be {n_rows} rows of {n_cols} values")));
    }
    mat.values = rows;
    Ok(mat)
}

pub fn write_matrix_csv(path: &Path, mat: &PacMatrix) -> Result<()> {
    Ok(fs::write(path, matrix_to_csv(mat))?)
}

pub fn read_matrix_csv(path: &Path) -> Result<PacMatrix> {
    matrix_from_csv(&fs::read_to_string(path)?)
}

/// Binary PGM, one pixel per cell, gray level `round(255·v)` with `v`
/// clamped to `[0, 1]`. The top image row is the largest `n`.
pub fn matrix_to_pgm(mat: &PacMatrix) -> Vec<u8> {
    let height = mat.values.len();
    let width = mat.values.first().map_or(0, Vec::len);
    let g = mat.grid;
    let mut out = format!(
        "P5\n# {} PAC; rows n={}..{} bottom to top, columns m={}..{} left to right\n{width} {height}\n255\n",
        mat.method, g.n_range.0, g.n_range.1, g.m_range.0, g.m_range.1
    )
    .into_bytes();
    for row in mat.values.iter().rev() {
        out.extend(row.iter().map(|&v| (255.0 * v.clamp(0.0, 1.0)).round() as u8));
    }
    out
}

pub fn write_pgm(path: &Path, mat: &PacMatrix) -> Result<()> {
    Ok(fs::write(path, matrix_to_pgm(mat))?)
}

/// Provenance written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: u32,
    pub command: String,
    pub params: serde_json::Value,
    pub seeds: Vec<u64>,
    pub version: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// Wall-clock seconds; `None` for a dry run.
    pub duration_s: Option<f64>,
    /// Command-specific summary, e.g. the matrix argmax.
    pub result: Option<serde_json::Value>,
}

impl RunManifest {
    pub fn new(command: &str, params: serde_json::Value) -> Self {
        Self {
            schema: 1,
            command: command.to_string(),
            params,
            seeds: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            duration_s: None,
            result: None,
        }
    }
}

/// Sidecar path for an output: `out.csv` → `out.csv.json`.
pub fn manifest_path(output: &Path) -> std::path::PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".json");
    s.into()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    Ok(fs::write(path, text)?)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| Error::Parse(e.to_string()))
}

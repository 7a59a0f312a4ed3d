//! Welch power spectral density and magnitude-squared coherence.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::signal::{check_same_base, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    Hann,
    Rectangular,
}

impl Window {
    /// Periodic window of length `len`.
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            Window::Hann => (0..len).map(|j| 0.5 - 0.5 * (2.0 * PI * j as f64 / len as f64).cos()).collect(),
            Window::Rectangular => vec![1.0; len],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchSpec {
    pub window_len: usize,
    /// Fraction of a window shared by consecutive segments, in `[0, 1)`.
    pub overlap: f64,
    pub window: Window,
}

impl Default for WelchSpec {
    /// 4096-sample Hann windows with 25 % overlap.
    fn default() -> Self {
        Self { window_len: 4096, overlap: 0.25, window: Window::Hann }
    }
}

impl WelchSpec {
    pub fn new(window_len: usize, overlap: f64) -> Self {
        Self { window_len, overlap, window: Window::Hann }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_len < 8 {
            return Err(Error::InvalidInput(format!("window must be at least 8 samples, got {}", self.window_len)));
        }
        if !(self.overlap >= 0.0 && self.overlap < 1.0) {
            return Err(Error::InvalidInput(format!("overlap must be in [0, 1), got {}", self.overlap)));
        }
        Ok(())
    }

    /// Window length actually used for a signal of `len` samples.
    pub fn effective_window(&self, len: usize) -> usize {
        self.window_len.min(len)
    }

    fn step(&self, window_len: usize) -> usize {
        ((window_len as f64 * (1.0 - self.overlap)).round() as usize).max(1)
    }

    /// Number of segments for a signal of `len` samples.
    pub fn segments(&self, len: usize) -> usize {
        let w = self.effective_window(len);
        if w == 0 {
            return 0;
        }
        (len - w) / self.step(w) + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    Psd,
    Coherence,
}

/// Values on a grid of frequency bins `k·fs/L`, `k = 0..=L/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub freqs: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: SpectrumKind,
}

impl Spectrum {
    pub fn resolution(&self) -> f64 {
        if self.freqs.len() > 1 {
            self.freqs[1] - self.freqs[0]
        } else {
            0.0
        }
    }

    /// Index of the bin nearest `freq`; ties go to the lower bin.
    pub fn nearest_bin(&self, freq: f64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (k, &f) in self.freqs.iter().enumerate() {
            let d = (f - freq).abs();
            if d < best_d {
                best = k;
                best_d = d;
            }
        }
        best
    }

    pub fn value_at(&self, freq: f64) -> f64 {
        self.values[self.nearest_bin(freq)]
    }

    /// Bin with the largest value (first one on ties).
    pub fn peak_bin(&self) -> usize {
        let mut best = 0;
        for (k, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = k;
            }
        }
        best
    }

    /// Trapezoidal integral over the whole frequency axis.
    pub fn integral(&self) -> f64 {
        self.freqs.windows(2).zip(self.values.windows(2)).map(|(f, v)| 0.5 * (f[1] - f[0]) * (v[0] + v[1])).sum()
    }

    /// True if bin `k` is strictly above both neighbours.
    pub fn is_local_max(&self, k: usize) -> bool {
        k > 0 && k + 1 < self.values.len() && self.values[k] > self.values[k - 1] && self.values[k] > self.values[k + 1]
    }

    /// Least-squares slope of `log10(value)` against `log10(freq)` over the
    /// bins in `[f_lo, f_hi]` with positive values.
    pub fn loglog_slope(&self, f_lo: f64, f_hi: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .freqs
            .iter()
            .zip(&self.values)
            .filter(|(&f, &v)| f >= f_lo && f <= f_hi && f > 0.0 && v > 0.0)
            .map(|(&f, &v)| (f.log10(), v.log10()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    }
}

/// Detrended, tapered segment spectra (bins `0..=L/2`).
fn segment_spectra(x: &[f64], spec: &WelchSpec) -> Vec<Vec<Complex64>> {
    let w = spec.effective_window(x.len());
    let step = spec.step(w);
    let taper = spec.window.coefficients(w);
    let mut out = Vec::new();
    let mut start = 0;
    while start + w <= x.len() {
        let seg = &x[start..start + w];
        let mean = seg.iter().sum::<f64>() / w as f64;
        let mut buf: Vec<Complex64> =
            seg.iter().zip(&taper).map(|(&v, &t)| Complex64::new((v - mean) * t, 0.0)).collect();
        fft::forward(&mut buf);
        buf.truncate(w / 2 + 1);
        out.push(buf);
        start += step;
    }
    out
}

fn prepare(len: usize, spec: &WelchSpec) -> Result<()> {
    if len < 8 {
        return Err(Error::SignalTooShort { len, required: 8 });
    }
    spec.validate()?;
    if spec.window_len > len {
        log::warn!("Welch window of {} samples clipped to the signal length {}", spec.window_len, len);
    }
    Ok(())
}

fn bin_freqs(w: usize, fs: f64) -> Vec<f64> {
    (0..=w / 2).map(|k| k as f64 * fs / w as f64).collect()
}

/// One-sided Welch PSD, normalised so its integral over `[0, fs/2]` matches
/// the mean-square power of the input.
///
/// A window longer than the signal is clipped to the signal length.
pub fn welch_psd(x: &Signal, spec: &WelchSpec) -> Result<Spectrum> {
    prepare(x.len(), spec)?;
    let w = spec.effective_window(x.len());
    let u: f64 = spec.window.coefficients(w).iter().map(|v| v * v).sum();
    let segs = segment_spectra(x.samples(), spec);
    let scale = 1.0 / (x.fs() * u * segs.len() as f64);
    let mut values = vec![0.0; w / 2 + 1];
    for seg in &segs {
        for (acc, z) in values.iter_mut().zip(seg) {
            *acc += z.norm_sqr();
        }
    }
    let last = values.len() - 1;
    for (k, v) in values.iter_mut().enumerate() {
        *v *= scale;
        let edge = k == 0 || (w.is_multiple_of(2) && k == last);
        if !edge {
            *v *= 2.0;
        }
    }
    Ok(Spectrum { freqs: bin_freqs(w, x.fs()), values, kind: SpectrumKind::Psd })
}

/// Magnitude-squared coherence `|S_xy|² / (S_xx·S_yy)` over identical Welch
/// segmentation. Bins where either auto-spectrum vanishes are 0.
pub fn coherence(x: &Signal, y: &Signal, spec: &WelchSpec) -> Result<Spectrum> {
    check_same_base(x.len(), x.fs(), y.len(), y.fs())?;
    prepare(x.len(), spec)?;
    let segments = spec.segments(x.len());
    if segments < 2 {
        return Err(Error::UnreliableEstimate { segments });
    }
    let w = spec.effective_window(x.len());
    let sx = segment_spectra(x.samples(), spec);
    let sy = segment_spectra(y.samples(), spec);
    let bins = w / 2 + 1;
    let mut sxy = vec![Complex64::new(0.0, 0.0); bins];
    let mut sxx = vec![0.0; bins];
    let mut syy = vec![0.0; bins];
    for (a, b) in sx.iter().zip(&sy) {
        for k in 0..bins {
            sxy[k] += a[k] * b[k].conj();
            sxx[k] += a[k].norm_sqr();
            syy[k] += b[k].norm_sqr();
        }
    }
    let values = (0..bins)
        .map(|k| {
            let denom = sxx[k] * syy[k];
            if denom > 0.0 {
                (sxy[k].norm_sqr() / denom).clamp(0.0, 1.0)
            } else {
                0.0
            }
        })
        .collect();
    Ok(Spectrum { freqs: bin_freqs(w, x.fs()), values, kind: SpectrumKind::Coherence })
}

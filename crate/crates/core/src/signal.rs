//! Uniformly sampled series and the analytic-signal operators.
//!
//! The analytic signal follows the usual convention `z = x + i·H[x]`, so the
//! real part is the input itself. Some texts put the Hilbert transform in the
//! real part instead; the two differ by a constant quarter-turn, which leaves
//! the modulus unchanged and cancels out of every phase difference used by the
//! coupling measures.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;

/// A real-valued, uniformly sampled time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    fs: f64,
}

impl Signal {
    /// Builds a signal, rejecting empty, non-finite or badly sampled input.
    pub fn new(samples: Vec<f64>, fs: f64) -> Result<Self> {
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::InvalidInput(format!("sampling rate must be positive, got {fs}")));
        }
        if samples.is_empty() {
            return Err(Error::InvalidInput("signal has no samples".into()));
        }
        if let Some(k) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite sample at index {k}")));
        }
        Ok(Self { samples, fs })
    }

    /// Samples `f(t)` at `t_k = k / fs` for `k = 0..n`.
    pub fn from_fn(n: usize, fs: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..n).map(|k| f(k as f64 / fs)).collect(), fs)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn nyquist(&self) -> f64 {
        self.fs / 2.0
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }

    /// Time of sample `k` in seconds.
    pub fn time(&self, k: usize) -> f64 {
        k as f64 / self.fs
    }

    /// Multiplies every sample by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.samples.iter().map(|v| v * c).collect(), self.fs)
    }

    /// Sample-wise sum of two signals on the same time base.
    pub fn add(&self, other: &Signal) -> Result<Self> {
        check_same_base(self.len(), self.fs, other.len(), other.fs)?;
        Self::new(self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(), self.fs)
    }
}

/// A complex-valued series on the same time base as a [`Signal`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeries {
    values: Vec<Complex64>,
    fs: f64,
}

impl ComplexSeries {
    pub fn new(values: Vec<Complex64>, fs: f64) -> Result<Self> {
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::InvalidInput(format!("sampling rate must be positive, got {fs}")));
        }
        if values.is_empty() {
            return Err(Error::InvalidInput("series has no samples".into()));
        }
        if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidInput(format!("non-finite value at index {k}")));
        }
        Ok(Self { values, fs })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn real(&self) -> Signal {
        Signal { samples: self.values.iter().map(|z| z.re).collect(), fs: self.fs }
    }

    pub fn trim(&self, n_edge: usize) -> Result<Self> {
        let len = self.values.len();
        if 2 * n_edge >= len {
            return Err(Error::EmptyResult { len, n_edge });
        }
        Ok(Self { values: self.values[n_edge..len - n_edge].to_vec(), fs: self.fs })
    }
}

pub(crate) fn check_same_base(a_len: usize, a_fs: f64, b_len: usize, b_fs: f64) -> Result<()> {
    if a_len != b_len {
        return Err(Error::InvalidInput(format!("length mismatch: {a_len} vs {b_len}")));
    }
    if a_fs != b_fs {
        return Err(Error::InvalidInput(format!("sampling rate mismatch: {a_fs} vs {b_fs}")));
    }
    Ok(())
}

/// Analytic signal `x + i·H[x]` by a single full-length DFT.
///
/// Strictly positive frequency bins are doubled, strictly negative ones
/// zeroed, DC and (for even lengths) Nyquist are kept.
pub fn analytic(x: &Signal) -> Result<ComplexSeries> {
    let n = x.len();
    if n < 4 {
        return Err(Error::InvalidInput(format!("analytic signal needs at least 4 samples, got {n}")));
    }
    let mut buf = fft::to_complex(x.samples());
    fft::forward(&mut buf);
    let half = n / 2;
    let last_positive = if n.is_multiple_of(2) { half - 1 } else { half };
    for v in &mut buf[1..=last_positive] {
        *v *= 2.0;
    }
    for v in &mut buf[last_positive + 1 + usize::from(n.is_multiple_of(2))..] {
        *v = Complex64::new(0.0, 0.0);
    }
    fft::inverse(&mut buf);
    // The real part is the input by construction; restore it exactly.
    for (z, &s) in buf.iter_mut().zip(x.samples()) {
        z.re = s;
    }
    ComplexSeries::new(buf, x.fs())
}

/// Instantaneous amplitude `|z|`.
pub fn amplitude(z: &ComplexSeries) -> Signal {
    Signal { samples: z.values().iter().map(|v| v.norm()).collect(), fs: z.fs() }
}

/// Instantaneous phase `arg z`, wrapped to `[-π, π)`.
pub fn phase(z: &ComplexSeries) -> Result<Signal> {
    let mut out = Vec::with_capacity(z.len());
    for (index, v) in z.values().iter().enumerate() {
        if v.norm_sqr() == 0.0 {
            return Err(Error::DegeneratePhase { index });
        }
        out.push(wrap_phase(v.arg()));
    }
    Ok(Signal { samples: out, fs: z.fs() })
}

/// Maps an angle into `[-π, π)`.
pub fn wrap_phase(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}

/// Removes jumps larger than π by cumulative ±2π corrections.
pub fn unwrap(phase: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phase.len());
    let mut offset = 0.0;
    let mut prev = match phase.first() {
        Some(&p) => p,
        None => return out,
    };
    out.push(prev);
    for &p in &phase[1..] {
        let d = p - prev;
        if d > PI {
            offset -= 2.0 * PI * ((d + PI) / (2.0 * PI)).floor();
        } else if d < -PI {
            offset += 2.0 * PI * ((-d + PI) / (2.0 * PI)).floor();
        }
        prev = p;
        out.push(p + offset);
    }
    out
}

/// Instantaneous frequency in Hz: `(1/2π)·dφ/dt` of the unwrapped phase.
///
/// Central differences inside, one-sided differences at both ends.
pub fn instantaneous_frequency(z: &ComplexSeries) -> Result<Signal> {
    let n = z.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!("instantaneous frequency needs at least 3 samples, got {n}")));
    }
    let phi = unwrap(phase(z)?.samples());
    let scale = z.fs() / (2.0 * PI);
    let mut out = Vec::with_capacity(n);
    out.push((phi[1] - phi[0]) * scale);
    for k in 1..n - 1 {
        out.push((phi[k + 1] - phi[k - 1]) * 0.5 * scale);
    }
    out.push((phi[n - 1] - phi[n - 2]) * scale);
    Signal::new(out, z.fs())
}

/// Mean square of the samples.
pub fn power(x: &Signal) -> f64 {
    x.samples().iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

/// Drops `n_edge` samples from each end.
pub fn trim(x: &Signal, n_edge: usize) -> Result<Signal> {
    let len = x.len();
    if 2 * n_edge >= len {
        return Err(Error::EmptyResult { len, n_edge });
    }
    Ok(Signal { samples: x.samples()[n_edge..len - n_edge].to_vec(), fs: x.fs() })
}

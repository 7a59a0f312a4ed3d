//! Band-pass filtering: Gabor and Morlet kernels, zero-phase convolution and
//! the MCA triplet.
//!
//! Two bandwidth conventions are supported. In constant-bandwidth mode the
//! Gaussian envelope is chosen so the full width at half gain of the
//! magnitude response is `bw_hz` regardless of the center frequency; this is
//! what MCA uses (1 Hz by default). In proportional mode the envelope width is
//! a fixed number of cycles of the center frequency, as in Morlet wavelet
//! analysis, so the bandwidth grows with the center.

use std::f64::consts::{LN_2, PI};
use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::signal::{ComplexSeries, Signal};

/// Default kernel support, in envelope standard deviations either side.
pub const DEFAULT_TRUNCATION: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// Full width at half gain, in Hz, independent of the center.
    Constant { bw_hz: f64 },
    /// Envelope standard deviation of `cycles / (2π·center)` seconds.
    Proportional { cycles: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FilterSpec {
    pub center: f64,
    pub mode: Bandwidth,
    pub truncation: f64,
}

impl FilterSpec {
    pub fn constant(center: f64, bw_hz: f64) -> Self {
        Self { center, mode: Bandwidth::Constant { bw_hz }, truncation: DEFAULT_TRUNCATION }
    }

    pub fn proportional(center: f64, cycles: f64) -> Self {
        Self { center, mode: Bandwidth::Proportional { cycles }, truncation: DEFAULT_TRUNCATION }
    }

    pub fn with_truncation(mut self, truncation: f64) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn validate(&self, fs: f64) -> Result<()> {
        if !(self.center.is_finite() && self.center > 0.0) {
            return Err(Error::InvalidInput(format!("center must be positive, got {}", self.center)));
        }
        if self.center >= fs / 2.0 {
            return Err(Error::Aliasing { center: self.center, nyquist: fs / 2.0 });
        }
        match self.mode {
            Bandwidth::Constant { bw_hz } if !(bw_hz.is_finite() && bw_hz > 0.0) => {
                return Err(Error::InvalidInput(format!("bandwidth must be positive, got {bw_hz}")))
            }
            Bandwidth::Proportional { cycles } if !(cycles.is_finite() && cycles >= 1.0) => {
                return Err(Error::InvalidInput(format!("cycles must be at least 1, got {cycles}")))
            }
            _ => {}
        }
        if !(self.truncation.is_finite() && self.truncation > 0.0) {
            return Err(Error::InvalidInput(format!("truncation must be positive, got {}", self.truncation)));
        }
        Ok(())
    }

    /// Standard deviation of the Gaussian time envelope, in seconds.
    pub fn sigma_t(&self) -> f64 {
        match self.mode {
            Bandwidth::Constant { bw_hz } => {
                // e^{-(βt)^2} has half-gain full width bw when β = π·bw / (2√ln2).
                let beta = PI * bw_hz / (2.0 * LN_2.sqrt());
                1.0 / (beta * 2f64.sqrt())
            }
            Bandwidth::Proportional { cycles } => cycles / (2.0 * PI * self.center),
        }
    }

    /// Kernel half-length in samples at sampling rate `fs`.
    pub fn half_len(&self, fs: f64) -> usize {
        ((self.truncation * self.sigma_t() * fs).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Taps {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// An odd-length FIR kernel centred on its middle tap.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    taps: Taps,
    fs: f64,
}

impl Kernel {
    pub fn taps(&self) -> &Taps {
        &self.taps
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn len(&self) -> usize {
        match &self.taps {
            Taps::Real(t) => t.len(),
            Taps::Complex(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn half_len(&self) -> usize {
        self.len() / 2
    }

    /// Frequency response `Σ k_j e^{-i2πf t_j}` with `t_j` measured from the
    /// centre tap.
    pub fn response(&self, freq: f64) -> Complex64 {
        let h = self.half_len() as f64;
        let w = -2.0 * PI * freq / self.fs;
        let tap = |j: usize| Complex64::from_polar(1.0, w * (j as f64 - h));
        match &self.taps {
            Taps::Real(t) => t.iter().enumerate().map(|(j, &v)| tap(j) * v).sum(),
            Taps::Complex(t) => t.iter().enumerate().map(|(j, &v)| tap(j) * v).sum(),
        }
    }

    fn as_complex(&self) -> Vec<Complex64> {
        match &self.taps {
            Taps::Real(t) => fft::to_complex(t),
            Taps::Complex(t) => t.clone(),
        }
    }
}

/// Gaussian envelope and carrier of a Gabor kernel, scaled to unit gain at
/// the center frequency: returns `(g·cos, g·sin)` per tap.
fn gabor_taps(spec: &FilterSpec, fs: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    spec.validate(fs)?;
    let sigma = spec.sigma_t();
    let h = spec.half_len(fs) as i64;
    let w = 2.0 * PI * spec.center;
    let env: Vec<f64> = (-h..=h)
        .map(|j| {
            let t = j as f64 / fs;
            (-t * t / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let phase = |j: i64| w * j as f64 / fs;
    let mut re: Vec<f64> = (-h..=h).zip(&env).map(|(j, &g)| g * phase(j).cos()).collect();
    let mut im: Vec<f64> = (-h..=h).zip(&env).map(|(j, &g)| g * phase(j).sin()).collect();
    let gain: f64 = (-h..=h).zip(&re).map(|(j, &g)| g * phase(j).cos()).sum();
    for v in re.iter_mut().chain(im.iter_mut()) {
        *v /= gain;
    }
    Ok((re, im))
}

/// Real Gabor kernel `e^{-t²/(2σ²)}·cos(2π·center·t)` with unit gain at the
/// center frequency.
pub fn gabor_kernel(spec: &FilterSpec, fs: f64) -> Result<Kernel> {
    let (re, _) = gabor_taps(spec, fs)?;
    Ok(Kernel { taps: Taps::Real(re), fs })
}

/// Quadrature Gabor kernel: real part identical to [`gabor_kernel`],
/// imaginary part its sine counterpart. The output approximates the
/// analytic signal of the band without a global Hilbert transform, so edge
/// transients stay local.
pub fn gabor_analytic_kernel(spec: &FilterSpec, fs: f64) -> Result<Kernel> {
    let (re, im) = gabor_taps(spec, fs)?;
    let taps = re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect();
    Ok(Kernel { taps: Taps::Complex(taps), fs })
}

/// Complex Morlet kernel `e^{i2π·center·t}·e^{-t²/(2σ²)}`.
///
/// Scaled so the real part of the output is a unit-gain band-pass and the
/// modulus is its envelope, i.e. the gain at `+center` is 2.
pub fn morlet_kernel(spec: &FilterSpec, fs: f64) -> Result<Kernel> {
    spec.validate(fs)?;
    let sigma = spec.sigma_t();
    let h = spec.half_len(fs) as i64;
    let w = 2.0 * PI * spec.center;
    let env: Vec<f64> = (-h..=h)
        .map(|j| {
            let t = j as f64 / fs;
            (-t * t / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let norm = 2.0 / env.iter().sum::<f64>();
    let taps = (-h..=h).zip(&env).map(|(j, &e)| Complex64::from_polar(e * norm, w * j as f64 / fs)).collect();
    Ok(Kernel { taps: Taps::Complex(taps), fs })
}

/// A kernel transformed once for repeated same-length convolutions with
/// reflection padding.
#[derive(Debug, Clone)]
pub struct PreparedKernel {
    spectrum: Vec<Complex64>,
    half: usize,
    len: usize,
    real: bool,
}

impl PreparedKernel {
    /// Prepares `kernel` for signals of exactly `len` samples.
    pub fn new(kernel: &Kernel, len: usize) -> Result<Self> {
        if kernel.len() > len {
            return Err(Error::SignalTooShort { len, required: kernel.len() });
        }
        let half = kernel.half_len();
        let nfft = (len + 4 * half).next_power_of_two();
        let mut spectrum = kernel.as_complex();
        spectrum.resize(nfft, Complex64::new(0.0, 0.0));
        fft::forward(&mut spectrum);
        Ok(Self { spectrum, half, len, real: matches!(kernel.taps, Taps::Real(_)) })
    }

    pub fn half_len(&self) -> usize {
        self.half
    }

    pub fn signal_len(&self) -> usize {
        self.len
    }

    fn run(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        if x.len() != self.len {
            return Err(Error::InvalidInput(format!("prepared for {} samples, got {}", self.len, x.len())));
        }
        let h = self.half;
        let n = x.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); self.spectrum.len()];
        // x[h], .., x[1] | x | x[n-2], .., x[n-1-h]
        for (slot, k) in buf.iter_mut().zip((1..=h).rev()) {
            slot.re = x[k];
        }
        for (slot, &v) in buf[h..].iter_mut().zip(x) {
            slot.re = v;
        }
        for (slot, k) in buf[h + n..].iter_mut().zip((n - 1 - h..n - 1).rev()) {
            slot.re = x[k];
        }
        fft::forward(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.spectrum) {
            *b *= k;
        }
        fft::inverse(&mut buf);
        buf.drain(..2 * h);
        buf.truncate(n);
        Ok(buf)
    }

    /// Filters a real input with a real kernel.
    pub fn apply_real(&self, x: &[f64]) -> Result<Vec<f64>> {
        if !self.real {
            return Err(Error::InvalidInput("kernel is complex".into()));
        }
        Ok(self.run(x)?.into_iter().map(|z| z.re).collect())
    }

    /// Filters a real input with either kind of kernel.
    pub fn apply_complex(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        self.run(x)
    }
}

/// Zero-phase band-pass: same-length convolution with a symmetric Gabor
/// kernel, reflection-padded at both ends.
pub fn bandpass(x: &Signal, spec: &FilterSpec) -> Result<Signal> {
    let kernel = gabor_kernel(spec, x.fs())?;
    let out = PreparedKernel::new(&kernel, x.len())?.apply_real(x.samples())?;
    Signal::new(out, x.fs())
}

/// Complex Morlet band signal; `|out|` is the band envelope and `arg out`
/// the band phase.
pub fn morlet_bandpass(x: &Signal, center: f64, cycles: f64) -> Result<ComplexSeries> {
    let kernel = morlet_kernel(&FilterSpec::proportional(center, cycles), x.fs())?;
    let out = PreparedKernel::new(&kernel, x.len())?.apply_complex(x.samples())?;
    ComplexSeries::new(out, x.fs())
}

/// Analytic Gabor band signal from the quadrature kernel; its real part is
/// [`bandpass`] with the same spec.
pub fn gabor_analytic(x: &Signal, spec: &FilterSpec) -> Result<ComplexSeries> {
    let kernel = gabor_analytic_kernel(spec, x.fs())?;
    let out = PreparedKernel::new(&kernel, x.len())?.apply_complex(x.samples())?;
    ComplexSeries::new(out, x.fs())
}

/// Checks the triplet band constraints `m ≥ 1`, `n − m ≥ 1`, `n + m < fs/2`.
pub fn check_triplet_band(m: f64, n: f64, fs: f64) -> Result<()> {
    if m >= 1.0 && n - m >= 1.0 && n + m < fs / 2.0 {
        Ok(())
    } else {
        Err(Error::OutOfBand { m, n })
    }
}

/// Sums the triplet legs `lower + 2·center + upper`.
pub fn combine_triplet<T>(lower: &[T], center: &[T], upper: &[T]) -> Vec<T>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    lower.iter().zip(center).zip(upper).map(|((&a, &b), &c)| a + b * 2.0 + c).collect()
}

/// The MCA triplet `X_{n−m} + 2·X_n + X_{n+m}`, each leg a constant-bandwidth
/// Gabor band-pass of width `bw`.
pub fn triplet(x: &Signal, m: f64, n: f64, bw: f64) -> Result<Signal> {
    check_triplet_band(m, n, x.fs())?;
    let lower = bandpass(x, &FilterSpec::constant(n - m, bw))?;
    let center = bandpass(x, &FilterSpec::constant(n, bw))?;
    let upper = bandpass(x, &FilterSpec::constant(n + m, bw))?;
    Signal::new(combine_triplet(lower.samples(), center.samples(), upper.samples()), x.fs())
}

/// Analytic form of [`triplet`], built from quadrature Gabor legs.
pub fn triplet_analytic(x: &Signal, m: f64, n: f64, bw: f64) -> Result<ComplexSeries> {
    check_triplet_band(m, n, x.fs())?;
    let leg = |c: f64| gabor_analytic(x, &FilterSpec::constant(c, bw));
    let (lower, center, upper) = (leg(n - m)?, leg(n)?, leg(n + m)?);
    ComplexSeries::new(combine_triplet(lower.values(), center.values(), upper.values()), x.fs())
}

//! Pure phase-amplitude coupled test signals in calibrated 1/f noise.
//!
//! The deterministic part is
//! `clean_scale·[sin(2πmt) + (0.5 + ami·sin(2πmt))·cos(2πnt)]`: an `m` Hz
//! modulator plus an `n` Hz carrier whose amplitude follows the modulator's
//! phase. Pink noise of a prescribed mean-square power is added on top.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::signal::{check_same_base, power, Signal};

/// The four benchmark (m, n) pairs, in Hz.
pub const BENCHMARK_PAIRS: [(f64, f64); 4] = [(8.0, 45.0), (12.0, 45.0), (20.0, 45.0), (30.0, 45.0)];
pub const BENCHMARK_AMI: f64 = 0.25;
pub const BENCHMARK_NOISE_POWER: f64 = 6250.0;
pub const BENCHMARK_CLEAN_POWER: f64 = 630.0;
pub const BENCHMARK_DURATION: f64 = 10.0;
pub const BENCHMARK_FS: f64 = 1000.0;

/// Time-averaged power of the unit-scale clean component for integer-cycle
/// durations and `n ≠ 2m`: `1/2 + (1/4 + ami²/2)/2`.
pub fn unit_clean_power(ami: f64) -> f64 {
    0.5 + 0.5 * (0.25 + ami * ami / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisSpec {
    /// Modulating frequency, Hz.
    pub m: f64,
    /// Modulated (carrier) frequency, Hz.
    pub n: f64,
    pub ami: f64,
    /// Seconds.
    pub duration: f64,
    pub fs: f64,
    /// Mean-square power of the added pink noise.
    pub noise_power: f64,
    pub clean_scale: f64,
    pub seed: u64,
}

impl SynthesisSpec {
    /// Noise-free, unit-scale spec with the benchmark AMI, duration and rate.
    pub fn new(m: f64, n: f64) -> Self {
        Self {
            m,
            n,
            ami: BENCHMARK_AMI,
            duration: BENCHMARK_DURATION,
            fs: BENCHMARK_FS,
            noise_power: 0.0,
            clean_scale: 1.0,
            seed: 0,
        }
    }

    /// Benchmark pair `k` (1-based): AMI 0.25, 10 s at 1 kHz, clean power 630
    /// and pink-noise power 6250.
    pub fn benchmark(k: usize, seed: u64) -> Result<Self> {
        let &(m, n) = k
            .checked_sub(1)
            .and_then(|i| BENCHMARK_PAIRS.get(i))
            .ok_or_else(|| Error::InvalidInput(format!("benchmark pair must be 1..=4, got {k}")))?;
        Ok(Self::new(m, n)
            .with_noise_power(BENCHMARK_NOISE_POWER)
            .with_seed(seed)
            .with_clean_scale((BENCHMARK_CLEAN_POWER / unit_clean_power(BENCHMARK_AMI)).sqrt()))
    }

    pub fn with_ami(mut self, ami: f64) -> Self {
        self.ami = ami;
        self
    }

    pub fn with_duration(mut self, duration: f64) -> Self {
        self.duration = duration;
        self
    }

    pub fn with_fs(mut self, fs: f64) -> Self {
        self.fs = fs;
        self
    }

    pub fn with_noise_power(mut self, noise_power: f64) -> Self {
        self.noise_power = noise_power;
        self
    }

    pub fn with_clean_scale(mut self, clean_scale: f64) -> Self {
        self.clean_scale = clean_scale;
        self
    }

    /// Sets `clean_scale` so the clean component has exactly `target` power.
    pub fn with_clean_power(mut self, target: f64) -> Result<Self> {
        if !(target.is_finite() && target >= 0.0) {
            return Err(Error::InvalidInput(format!("clean power must be non-negative, got {target}")));
        }
        self.clean_scale = 1.0;
        let unit = power(&clean_component(&self)?);
        if unit == 0.0 {
            return Err(Error::InvalidInput("clean component has zero power".into()));
        }
        self.clean_scale = (target / unit).sqrt();
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn n_samples(&self) -> usize {
        (self.duration * self.fs).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if !(self.fs.is_finite() && self.fs > 0.0) {
            return bad(format!("sampling rate must be positive, got {}", self.fs));
        }
        if !(self.m.is_finite() && self.m > 0.0 && self.m < self.n && self.n < self.fs / 2.0) {
            return bad(format!("need 0 < m < n < fs/2, got m = {}, n = {}, fs = {}", self.m, self.n, self.fs));
        }
        if !(self.ami.is_finite() && self.ami >= 0.0) {
            return bad(format!("ami must be non-negative, got {}", self.ami));
        }
        if !(self.duration.is_finite() && self.n_samples() >= 2) {
            return bad(format!("duration {} s gives fewer than 2 samples", self.duration));
        }
        if !(self.noise_power.is_finite() && self.noise_power >= 0.0) {
            return bad(format!("noise power must be non-negative, got {}", self.noise_power));
        }
        if !self.clean_scale.is_finite() {
            return bad(format!("clean scale must be finite, got {}", self.clean_scale));
        }
        Ok(())
    }
}

/// A synthesized signal together with its two additive parts.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesizedSignal {
    pub composite: Signal,
    pub clean: Signal,
    pub noise: Signal,
}

impl SynthesizedSignal {
    pub fn snr(&self) -> f64 {
        snr(&self.clean, &self.noise).unwrap_or(f64::INFINITY)
    }
}

/// 1/f noise by spectral synthesis.
///
/// Each positive-frequency bin gets amplitude `1/√k` and an independent
/// uniform phase, DC is zero, and the result is rescaled so its mean-square
/// power is exactly `target_power`. The same seed always gives the same
/// samples.
pub fn pink_noise(n_samples: usize, fs: f64, target_power: f64, seed: u64) -> Result<Signal> {
    if n_samples < 2 {
        return Err(Error::InvalidInput(format!("pink noise needs at least 2 samples, got {n_samples}")));
    }
    if !(target_power.is_finite() && target_power >= 0.0) {
        return Err(Error::InvalidInput(format!("target power must be non-negative, got {target_power}")));
    }
    if target_power == 0.0 {
        return Signal::new(vec![0.0; n_samples], fs);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n_samples];
    let half = n_samples / 2;
    for k in 1..=half {
        let amp = 1.0 / (k as f64).sqrt();
        let theta = rng.random::<f64>() * 2.0 * PI;
        if 2 * k == n_samples {
            // The Nyquist bin of an even-length real signal must be real.
            spectrum[k] = Complex64::new(amp * theta.cos(), 0.0);
        } else {
            let v = Complex64::from_polar(amp, theta);
            spectrum[k] = v;
            spectrum[n_samples - k] = v.conj();
        }
    }
    fft::inverse(&mut spectrum);
    let raw: Vec<f64> = spectrum.iter().map(|z| z.re).collect();
    let p = raw.iter().map(|v| v * v).sum::<f64>() / n_samples as f64;
    let gain = if p > 0.0 { (target_power / p).sqrt() } else { 0.0 };
    Signal::new(raw.into_iter().map(|v| v * gain).collect(), fs)
}

fn clean_component(spec: &SynthesisSpec) -> Result<Signal> {
    let (m, n, ami, c) = (spec.m, spec.n, spec.ami, spec.clean_scale);
    Signal::from_fn(spec.n_samples(), spec.fs, |t| {
        let modulator = (2.0 * PI * m * t).sin();
        c * (modulator + (0.5 + ami * modulator) * (2.0 * PI * n * t).cos())
    })
}

/// Builds the coupled test signal described by `spec`.
pub fn synth_pac(spec: &SynthesisSpec) -> Result<SynthesizedSignal> {
    spec.validate()?;
    let clean = clean_component(spec)?;
    let noise = pink_noise(spec.n_samples(), spec.fs, spec.noise_power, spec.seed)?;
    let composite = clean.add(&noise)?;
    Ok(SynthesizedSignal { composite, clean, noise })
}

/// `power(clean) / power(noise)`; infinite when the noise is silent.
pub fn snr(clean: &Signal, noise: &Signal) -> Result<f64> {
    check_same_base(clean.len(), clean.fs(), noise.len(), noise.fs())?;
    let pn = power(noise);
    if pn == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(power(clean) / pn)
}

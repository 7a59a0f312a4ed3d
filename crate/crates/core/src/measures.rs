//! Phase-amplitude coupling estimators.
//!
//! MCA-PAC takes the phase of a narrow Gabor band at `m` and compares it with
//! the phase of the `m` Hz component of the triplet envelope around `n`. The
//! reference measures (EPS, MVL, CV, KLD) use proportional-bandwidth Morlet
//! bands for both the slow phase and the fast amplitude.
//!
//! Every estimator reads its band-passed inputs through a [`BandSource`], so
//! the comodulogram can share one filter bank across all cells while the
//! free functions here filter on demand.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{self, FilterSpec, PreparedKernel};
use crate::signal::{self, Signal};
use crate::spectral::{self, WelchSpec};

/// A filtered band whose RMS is below this fraction of its reference level
/// carries no usable phase.
pub const DEGENERATE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mca,
    Eps,
    Mvl,
    Cv,
    Kld,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Mca, Method::Eps, Method::Mvl, Method::Cv, Method::Kld];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mca => "mca",
            Method::Eps => "eps",
            Method::Mvl => "mvl",
            Method::Cv => "cv",
            Method::Kld => "kld",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureConfig {
    /// Constant bandwidth of the MCA Gabor bands and of the envelope filter, Hz.
    pub mca_bw: f64,
    /// Morlet width for EPS, MVL, CV and KLD.
    pub morlet_cycles: f64,
    pub kld_bins: usize,
    /// Samples dropped from each end before statistics; `None` uses the
    /// longest transient of the measure's filter paths, where two Gaussian
    /// stages in series count as `√(h₁² + h₂²)` samples.
    pub edge_trim: Option<usize>,
    /// Segmentation for the CV coherence estimate.
    pub welch: WelchSpec,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self { mca_bw: 1.0, morlet_cycles: 4.0, kld_bins: 50, edge_trim: None, welch: WelchSpec::new(1024, 0.5) }
    }
}

impl MeasureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mca_bw.is_finite() && self.mca_bw > 0.0) {
            return Err(Error::InvalidInput(format!("mca_bw must be positive, got {}", self.mca_bw)));
        }
        if !(self.morlet_cycles.is_finite() && self.morlet_cycles >= 1.0) {
            return Err(Error::InvalidInput(format!("morlet_cycles must be >= 1, got {}", self.morlet_cycles)));
        }
        if self.kld_bins < 2 {
            return Err(Error::InvalidInput(format!("kld_bins must be >= 2, got {}", self.kld_bins)));
        }
        self.welch.validate()
    }

    fn trim(&self, halves: &[usize]) -> usize {
        self.edge_trim.unwrap_or_else(|| halves.iter().copied().max().unwrap_or(0))
    }
}

/// Band-passed views of one input signal.
pub trait BandSource: Sync {
    fn signal(&self) -> &Signal;
    /// Analytic constant-bandwidth Gabor band of the input (quadrature
    /// kernel; the real part is the band-passed signal).
    fn gabor(&self, center: f64, bw: f64) -> Result<Arc<Vec<Complex64>>>;
    /// Unit phasors `e^{iφ}` of [`BandSource::gabor`].
    fn gabor_phasors(&self, center: f64, bw: f64) -> Result<Arc<Vec<Complex64>>> {
        Ok(Arc::new(unit_phasors(&self.gabor(center, bw)?)?))
    }
    /// Complex Morlet band of the input.
    fn morlet(&self, center: f64, cycles: f64) -> Result<Arc<Vec<Complex64>>>;
    /// Quadrature Gabor kernel prepared for filtering envelopes of the
    /// input's length.
    fn envelope_kernel(&self, center: f64, bw: f64) -> Result<Arc<PreparedKernel>>;
}

/// Filters on every request.
pub struct DirectBands<'a>(pub &'a Signal);

impl BandSource for DirectBands<'_> {
    fn signal(&self) -> &Signal {
        self.0
    }

    fn gabor(&self, center: f64, bw: f64) -> Result<Arc<Vec<Complex64>>> {
        Ok(Arc::new(filters::gabor_analytic(self.0, &FilterSpec::constant(center, bw))?.values().to_vec()))
    }

    fn morlet(&self, center: f64, cycles: f64) -> Result<Arc<Vec<Complex64>>> {
        Ok(Arc::new(filters::morlet_bandpass(self.0, center, cycles)?.values().to_vec()))
    }

    fn envelope_kernel(&self, center: f64, bw: f64) -> Result<Arc<PreparedKernel>> {
        let k = filters::gabor_analytic_kernel(&FilterSpec::constant(center, bw), self.0.fs())?;
        Ok(Arc::new(PreparedKernel::new(&k, self.0.len())?))
    }
}

fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

fn real_rms(x: &[Complex64]) -> f64 {
    (x.iter().map(|v| v.re * v.re).sum::<f64>() / x.len() as f64).sqrt()
}

fn complex_rms(x: &[Complex64]) -> f64 {
    (x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64).sqrt()
}

fn check_level(level: f64, reference: f64) -> Result<()> {
    if !(level > DEGENERATE_TOL * reference) {
        return Err(Error::DegeneratePhase { index: 0 });
    }
    Ok(())
}

fn interior<T>(x: &[T], trim: usize) -> Result<&[T]> {
    if 2 * trim >= x.len() {
        return Err(Error::EmptyResult { len: x.len(), n_edge: trim });
    }
    Ok(&x[trim..x.len() - trim])
}

/// `z/|z|`; a zero modulus has no phase.
pub(crate) fn unit_phasors(z: &[Complex64]) -> Result<Vec<Complex64>> {
    z.iter()
        .enumerate()
        .map(|(index, &v)| {
            let r = v.norm();
            if r > 0.0 {
                Ok(v / r)
            } else {
                Err(Error::DegeneratePhase { index })
            }
        })
        .collect()
}

/// Unit phasors of the analytic signal of a real band.
pub fn band_phasors(x: &[f64], fs: f64) -> Result<Vec<Complex64>> {
    let z = signal::analytic(&Signal::new(x.to_vec(), fs)?)?;
    unit_phasors(z.values())
}

/// PLV from unit phasors: `|⟨a·conj(b)⟩|`.
fn plv_phasors(a: &[Complex64], b: &[Complex64]) -> f64 {
    let sum: Complex64 = a.iter().zip(b).map(|(u, v)| u * v.conj()).sum();
    (sum.norm() / a.len() as f64).min(1.0)
}

/// Phase locking value `|⟨e^{i(φ_u − φ_v)}⟩|`, in `[0, 1]`.
pub fn plv(phase_u: &[f64], phase_v: &[f64]) -> Result<f64> {
    if phase_u.len() != phase_v.len() || phase_u.is_empty() {
        return Err(Error::InvalidInput(format!(
            "plv needs two equal, non-empty series, got {} and {}",
            phase_u.len(),
            phase_v.len()
        )));
    }
    let sum: Complex64 = phase_u.iter().zip(phase_v).map(|(u, v)| Complex64::from_polar(1.0, u - v)).sum();
    Ok((sum.norm() / phase_u.len() as f64).min(1.0))
}

/// Phase of the `m` Hz component of an amplitude envelope.
///
/// The envelope is band-passed at `m` with a quadrature Gabor kernel
/// (constant bandwidth `bw`), which strips its DC level and yields the phase
/// directly. An envelope without an `m`
/// component gives [`Error::DegeneratePhase`].
pub fn envelope_phase(env: &Signal, m: f64, bw: f64) -> Result<Signal> {
    let kernel = filters::gabor_analytic_kernel(&FilterSpec::constant(m, bw), env.fs())?;
    let prepared = PreparedKernel::new(&kernel, env.len())?;
    let trim = prepared.half_len();
    let phasors = envelope_phasors_with(&prepared, env.samples(), trim)?;
    Signal::new(phasors.iter().map(|z| signal::wrap_phase(z.arg())).collect(), env.fs())
}

/// Levels are compared on the interior, away from filter transients.
fn envelope_phasors_with(kernel: &PreparedKernel, env: &[f64], trim: usize) -> Result<Vec<Complex64>> {
    let filtered = kernel.apply_complex(env)?;
    check_level(real_rms(interior(&filtered, trim)?), rms(interior(env, trim)?))?;
    unit_phasors(&filtered)
}

/// `|⟨a(t)·e^{iφ(t)}⟩|`.
pub fn mean_vector_length(phase: &[f64], amp: &[f64]) -> Result<f64> {
    if phase.len() != amp.len() || phase.is_empty() {
        return Err(Error::InvalidInput(format!(
            "mean vector length needs equal, non-empty series, got {} and {}",
            phase.len(),
            amp.len()
        )));
    }
    let sum: Complex64 = phase.iter().zip(amp).map(|(&p, &a)| Complex64::from_polar(a, p)).sum();
    Ok(sum.norm() / phase.len() as f64)
}

/// Mean amplitude per phase bin, normalised to sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseAmplitudeDistribution {
    pub bin_means: Vec<f64>,
    pub bin_counts: Vec<usize>,
}

impl PhaseAmplitudeDistribution {
    pub fn n_bins(&self) -> usize {
        self.bin_means.len()
    }

    /// Center of bin `l`, in radians.
    pub fn bin_center(&self, l: usize) -> f64 {
        -PI + (l as f64 + 0.5) * 2.0 * PI / self.n_bins() as f64
    }
}

/// Bins `amp` by `phase` into `n_bins` equal intervals partitioning `[-π, π)`.
pub fn bin_amplitude_by_phase(phase: &[f64], amp: &[f64], n_bins: usize) -> Result<PhaseAmplitudeDistribution> {
    if phase.len() != amp.len() {
        return Err(Error::InvalidInput(format!("length mismatch: {} vs {}", phase.len(), amp.len())));
    }
    if n_bins < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 bins, got {n_bins}")));
    }
    let mut sums = vec![0.0; n_bins];
    let mut counts = vec![0usize; n_bins];
    for (&p, &a) in phase.iter().zip(amp) {
        let u = (signal::wrap_phase(p) + PI) / (2.0 * PI);
        let l = ((u * n_bins as f64) as usize).min(n_bins - 1);
        sums[l] += a;
        counts[l] += 1;
    }
    let mut means: Vec<f64> = sums.iter().zip(&counts).map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 }).collect();
    let total: f64 = means.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateDistribution);
    }
    for v in &mut means {
        *v /= total;
    }
    Ok(PhaseAmplitudeDistribution { bin_means: means, bin_counts: counts })
}

/// `1 − H(P)/ln N` with `H(P) = −Σ P ln P` and `0·ln 0 = 0`.
pub fn modulation_index(dist: &PhaseAmplitudeDistribution) -> f64 {
    let n = dist.n_bins() as f64;
    let h: f64 = dist.bin_means.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum();
    (1.0 - h / n.ln()).clamp(0.0, 1.0)
}

fn require_fast_band(m: f64, n: f64, fs: f64) -> Result<()> {
    if !(n > 0.0 && n < fs / 2.0) {
        return Err(Error::OutOfBand { m, n });
    }
    Ok(())
}

fn require_slow_band(m: f64, n: f64) -> Result<()> {
    if !(m >= 1.0) {
        return Err(Error::OutOfBand { m, n });
    }
    Ok(())
}

/// Morlet half-length in samples.
fn morlet_half(center: f64, cfg: &MeasureConfig, fs: f64) -> usize {
    FilterSpec::proportional(center, cfg.morlet_cycles).half_len(fs)
}

/// Transient length of two Gaussian filters in series.
fn cascade(a: usize, b: usize) -> usize {
    (a as f64).hypot(b as f64).ceil() as usize
}

fn gabor_half(cfg: &MeasureConfig, fs: f64) -> usize {
    // Constant bandwidth: every center gives the same length.
    FilterSpec::constant(1.0, cfg.mca_bw).half_len(fs)
}

/// Morlet band at the slow frequency, rejecting bands with no content.
fn slow_morlet(src: &dyn BandSource, m: f64, cfg: &MeasureConfig, trim: usize) -> Result<Arc<Vec<Complex64>>> {
    let z = src.morlet(m, cfg.morlet_cycles)?;
    check_level(complex_rms(interior(&z, trim)?), rms(interior(src.signal().samples(), trim)?))?;
    Ok(z)
}

fn fast_morlet_amp(src: &dyn BandSource, n: f64, cfg: &MeasureConfig) -> Result<Vec<f64>> {
    Ok(src.morlet(n, cfg.morlet_cycles)?.iter().map(|v| v.norm()).collect())
}

/// Computes `method` at `(m, n)` from the bands provided by `src`.
///
/// Degenerate inputs (no usable phase, zero amplitude) come back as errors
/// for which [`Error::is_degenerate`] holds; callers that want a number can
/// map them to 0.
pub fn evaluate(src: &dyn BandSource, method: Method, m: f64, n: f64, cfg: &MeasureConfig) -> Result<f64> {
    cfg.validate()?;
    let x = src.signal();
    let fs = x.fs();
    match method {
        Method::Mca => {
            filters::check_triplet_band(m, n, fs)?;
            let trim = cfg.trim(&[cascade(gabor_half(cfg, fs), gabor_half(cfg, fs))]);
            let slow = src.gabor(m, cfg.mca_bw)?;
            check_level(real_rms(interior(&slow, trim)?), rms(interior(x.samples(), trim)?))?;
            let lower = src.gabor(n - m, cfg.mca_bw)?;
            let center = src.gabor(n, cfg.mca_bw)?;
            let upper = src.gabor(n + m, cfg.mca_bw)?;
            let trip = filters::combine_triplet(&lower, &center, &upper);
            check_level(real_rms(interior(&trip, trim)?), rms(interior(x.samples(), trim)?))?;
            let env: Vec<f64> = trip.iter().map(|z| z.norm()).collect();
            let env_phase = envelope_phasors_with(&*src.envelope_kernel(m, cfg.mca_bw)?, &env, trim)?;
            let slow_phase = src.gabor_phasors(m, cfg.mca_bw)?;
            Ok(plv_phasors(interior(&slow_phase, trim)?, interior(&env_phase, trim)?))
        }
        Method::Eps => {
            require_slow_band(m, n)?;
            require_fast_band(m, n, fs)?;
            let trim = cfg.trim(&[morlet_half(m, cfg, fs), cascade(morlet_half(n, cfg, fs), gabor_half(cfg, fs))]);
            let slow_phase = unit_phasors(interior(&slow_morlet(src, m, cfg, trim)?, trim)?)?;
            let amp = fast_morlet_amp(src, n, cfg)?;
            let env_phase = envelope_phasors_with(&*src.envelope_kernel(m, cfg.mca_bw)?, &amp, trim)?;
            Ok(plv_phasors(&slow_phase, interior(&env_phase, trim)?))
        }
        Method::Mvl => {
            require_slow_band(m, n)?;
            require_fast_band(m, n, fs)?;
            let trim = cfg.trim(&[morlet_half(m, cfg, fs), morlet_half(n, cfg, fs)]);
            let slow = slow_morlet(src, m, cfg, trim)?;
            let slow_phase = unit_phasors(interior(&slow, trim)?)?;
            let amp = fast_morlet_amp(src, n, cfg)?;
            let sum: Complex64 = slow_phase.iter().zip(interior(&amp, trim)?).map(|(p, a)| p * a).sum();
            Ok(sum.norm() / slow_phase.len() as f64)
        }
        Method::Cv => {
            require_slow_band(m, n)?;
            require_fast_band(m, n, fs)?;
            let amp = fast_morlet_amp(src, n, cfg)?;
            let trim = cfg.trim(&[morlet_half(n, cfg, fs)]);
            let raw = Signal::new(interior(x.samples(), trim)?.to_vec(), fs)?;
            let env = Signal::new(interior(&amp, trim)?.to_vec(), fs)?;
            Ok(spectral::coherence(&raw, &env, &cfg.welch)?.value_at(m))
        }
        Method::Kld => {
            require_slow_band(m, n)?;
            require_fast_band(m, n, fs)?;
            let trim = cfg.trim(&[morlet_half(m, cfg, fs), morlet_half(n, cfg, fs)]);
            let slow = slow_morlet(src, m, cfg, trim)?;
            let slow_phase: Vec<f64> = slow.iter().map(|v| signal::wrap_phase(v.arg())).collect();
            let amp = fast_morlet_amp(src, n, cfg)?;
            let dist = bin_amplitude_by_phase(interior(&slow_phase, trim)?, interior(&amp, trim)?, cfg.kld_bins)?;
            Ok(modulation_index(&dist))
        }
    }
}

/// Like [`evaluate`] but degenerate cases yield 0.
pub fn evaluate_or_zero(src: &dyn BandSource, method: Method, m: f64, n: f64, cfg: &MeasureConfig) -> Result<f64> {
    match evaluate(src, method, m, n, cfg) {
        Err(e) if e.is_degenerate() => Ok(0.0),
        other => other,
    }
}

/// MCA-PAC: PLV between the Gabor phase at `m` and the `m` Hz phase of the
/// triplet envelope around `n`. An envelope without modulation scores 0.
pub fn mca_pac(x: &Signal, m: f64, n: f64, cfg: &MeasureConfig) -> Result<f64> {
    filters::check_triplet_band(m, n, x.fs())?;
    match evaluate(&DirectBands(x), Method::Mca, m, n, cfg) {
        Err(Error::DegeneratePhase { .. }) => Ok(0.0),
        other => other,
    }
}

/// Envelope phase synchronisation with Morlet bands.
pub fn eps(x: &Signal, m: f64, n: f64, cfg: &MeasureConfig) -> Result<f64> {
    evaluate(&DirectBands(x), Method::Eps, m, n, cfg)
}

/// Mean vector length with Morlet bands.
pub fn mvl(x: &Signal, m: f64, n: f64, cfg: &MeasureConfig) -> Result<f64> {
    evaluate(&DirectBands(x), Method::Mvl, m, n, cfg)
}

/// Coherence between the raw signal and the Morlet envelope at `n`, read at
/// the bin nearest `m`.
pub fn cv(x: &Signal, m: f64, n: f64, cfg: &MeasureConfig) -> Result<f64> {
    evaluate(&DirectBands(x), Method::Cv, m, n, cfg)
}

/// Entropy-based modulation index over `cfg.kld_bins` phase bins.
pub fn kld(x: &Signal, m: f64, n: f64, cfg: &MeasureConfig) -> Result<f64> {
    evaluate(&DirectBands(x), Method::Kld, m, n, cfg)
}

/// Shannon entropy bound used by the KLD normalisation, in nats.
pub fn max_entropy(n_bins: usize) -> f64 {
    (n_bins as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::{synth_pac, SynthesisSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform_sweep(n: usize) -> Vec<f64> {
        (0..n).map(|k| -PI + 2.0 * PI * k as f64 / n as f64).collect()
    }

    #[test]
    fn method_parsing() {
        assert_eq!("MCA".parse::<Method>().unwrap(), Method::Mca);
        assert_eq!("kld".parse::<Method>().unwrap(), Method::Kld);
        assert!(matches!("xyz".parse::<Method>(), Err(Error::InvalidMethod(_))));
    }

    #[test]
    fn plv_examples() {
        let u: Vec<f64> = (0..500).map(|k| (k as f64 * 0.37).sin() * 3.0).collect();
        assert!((plv(&u, &u).unwrap() - 1.0).abs() < 1e-12);
        let v: Vec<f64> = u.iter().map(|p| p + 0.7).collect();
        assert!((plv(&u, &v).unwrap() - 1.0).abs() < 1e-12);
        assert!(plv(&u, &v[1..]).is_err());
        assert!(plv(&[], &[]).is_err());
    }

    #[test]
    fn plv_of_independent_phases_is_small() {
        // E|mean| ≈ sqrt(π/4N) ≈ 0.0089 for N = 1e4; 0.03 is > 3 sd out.
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>() * 2.0 * PI - PI).collect();
            let v: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>() * 2.0 * PI - PI).collect();
            assert!(plv(&u, &v).unwrap() < 0.03);
        }
    }

    #[test]
    fn envelope_phase_tracks_modulator() {
        let fs = 1000.0;
        let env = Signal::from_fn(10_000, fs, |t| 1.0 + 0.25 * (2.0 * PI * 8.0 * t).sin()).unwrap();
        let p = envelope_phase(&env, 8.0, 1.0).unwrap();
        let reference: Vec<f64> = (0..10_000).map(|k| 2.0 * PI * 8.0 * k as f64 / fs - PI / 2.0).collect();
        let v = plv(&p.samples()[1500..8500], &reference[1500..8500]).unwrap();
        assert!(v > 0.99, "{v}");

        let env2 = Signal::from_fn(10_000, fs, |t| {
            1.0 + 0.25 * (2.0 * PI * 8.0 * t).sin() + 0.25 * (2.0 * PI * 20.0 * t).sin()
        })
        .unwrap();
        let p2 = envelope_phase(&env2, 8.0, 1.0).unwrap();
        assert!(plv(&p2.samples()[1500..8500], &reference[1500..8500]).unwrap() > 0.95);
    }

    #[test]
    fn envelope_phase_of_constant_is_degenerate() {
        let env = Signal::new(vec![2.0; 10_000], 1000.0).unwrap();
        assert!(matches!(envelope_phase(&env, 8.0, 1.0), Err(Error::DegeneratePhase { .. })));
    }

    #[test]
    fn mvl_analytic_cases() {
        let phi = uniform_sweep(10_000);
        let amp: Vec<f64> = phi.iter().map(|p| 1.0 + p.cos()).collect();
        assert!((mean_vector_length(&phi, &amp).unwrap() - 0.5).abs() < 0.01);
        let flat = vec![1.0; phi.len()];
        assert!(mean_vector_length(&phi, &flat).unwrap() < 1e-9);
        let zero = vec![0.0; phi.len()];
        assert_eq!(mean_vector_length(&phi, &zero).unwrap(), 0.0);
    }

    #[test]
    fn binning_examples() {
        let phi: Vec<f64> = (0..5000).map(|k| -PI + 2.0 * PI * (k as f64 + 0.5) / 5000.0).collect();
        let d = bin_amplitude_by_phase(&phi, &vec![3.0; 5000], 50).unwrap();
        assert!(d.bin_means.iter().all(|&v| (v - 0.02).abs() < 1e-12));
        assert!(d.bin_counts.iter().all(|&c| c == 100));

        let d = bin_amplitude_by_phase(&[0.1; 20], &[1.0; 20], 10).unwrap();
        assert_eq!(d.bin_means.iter().filter(|&&v| v == 1.0).count(), 1);
        assert_eq!(d.bin_means.iter().sum::<f64>(), 1.0);

        assert!(matches!(bin_amplitude_by_phase(&phi, &vec![0.0; 5000], 50), Err(Error::DegenerateDistribution)));
        assert!(bin_amplitude_by_phase(&phi, &[1.0], 50).is_err());
        assert!(bin_amplitude_by_phase(&phi, &vec![1.0; 5000], 1).is_err());
    }

    #[test]
    fn binning_cosine_amplitude() {
        // Closed form: the mean of 1 + cos φ over bin l is
        // 1 + sin(w/2)/(w/2)·cos(c_l), w the bin width; normalise over bins.
        let n_bins = 50;
        let phi = uniform_sweep(500_000);
        let amp: Vec<f64> = phi.iter().map(|p| 1.0 + p.cos()).collect();
        let d = bin_amplitude_by_phase(&phi, &amp, n_bins).unwrap();
        let w = 2.0 * PI / n_bins as f64;
        let sinc = (w / 2.0).sin() / (w / 2.0);
        let raw: Vec<f64> = (0..n_bins).map(|l| 1.0 + sinc * d.bin_center(l).cos()).collect();
        let total: f64 = raw.iter().sum();
        for (l, r) in raw.iter().enumerate() {
            assert!((d.bin_means[l] - r / total).abs() < 1e-6);
        }
    }

    #[test]
    fn kld_closed_forms() {
        let n = 50;
        let uniform = PhaseAmplitudeDistribution { bin_means: vec![1.0 / n as f64; n], bin_counts: vec![1; n] };
        assert!(modulation_index(&uniform).abs() < 1e-12);
        let mut delta = vec![0.0; n];
        delta[7] = 1.0;
        let delta = PhaseAmplitudeDistribution { bin_means: delta, bin_counts: vec![1; n] };
        assert_eq!(modulation_index(&delta), 1.0);
        let half: Vec<f64> = (0..n).map(|l| if l % 2 == 0 { 2.0 / n as f64 } else { 0.0 }).collect();
        let half = PhaseAmplitudeDistribution { bin_means: half, bin_counts: vec![1; n] };
        let expected = 1.0 - 25f64.ln() / 50f64.ln();
        assert!((expected - 0.177_18).abs() < 1e-5);
        assert!((modulation_index(&half) - expected).abs() < 1e-12);
        for bins in [2, 3, 18, 100] {
            let u = PhaseAmplitudeDistribution { bin_means: vec![1.0 / bins as f64; bins], bin_counts: vec![1; bins] };
            assert!(modulation_index(&u).abs() < 1e-12);
        }
    }

    #[test]
    fn mca_detects_noise_free_coupling() {
        let x = synth_pac(&SynthesisSpec::new(8.0, 45.0)).unwrap().composite;
        let v = mca_pac(&x, 8.0, 45.0, &MeasureConfig::default()).unwrap();
        assert!(v > 0.95, "{v}");
    }

    #[test]
    fn mca_without_modulation_is_zero() {
        let x = synth_pac(&SynthesisSpec::new(8.0, 45.0).with_ami(0.0)).unwrap().composite;
        assert_eq!(mca_pac(&x, 8.0, 45.0, &MeasureConfig::default()).unwrap(), 0.0);
    }

    #[test]
    fn mca_out_of_band() {
        let x = synth_pac(&SynthesisSpec::new(8.0, 45.0)).unwrap().composite;
        assert!(matches!(mca_pac(&x, 8.0, 8.5, &MeasureConfig::default()), Err(Error::OutOfBand { .. })));
        assert!(matches!(mca_pac(&x, 0.5, 45.0, &MeasureConfig::default()), Err(Error::OutOfBand { .. })));
    }

    #[test]
    fn eps_without_modulation_is_degenerate_or_small() {
        let x = synth_pac(&SynthesisSpec::new(8.0, 45.0).with_ami(0.0)).unwrap().composite;
        match eps(&x, 8.0, 45.0, &MeasureConfig::default()) {
            Ok(v) => assert!(v < 0.1, "{v}"),
            Err(e) => assert!(e.is_degenerate()),
        }
    }

    #[test]
    fn reference_measures_respond_to_slow_coupling() {
        let x = synth_pac(&SynthesisSpec::new(8.0, 45.0)).unwrap().composite;
        let cfg = MeasureConfig::default();
        assert!(eps(&x, 8.0, 45.0, &cfg).unwrap() > 0.9);
        assert!(mvl(&x, 8.0, 45.0, &cfg).unwrap() > mvl(&x, 14.0, 45.0, &cfg).unwrap());
        assert!(kld(&x, 8.0, 45.0, &cfg).unwrap() > kld(&x, 14.0, 45.0, &cfg).unwrap());
    }

    #[test]
    fn cv_peaks_at_modulating_bin() {
        let x = synth_pac(&SynthesisSpec::new(8.0, 45.0)).unwrap().composite;
        let cfg = MeasureConfig::default();
        let at = cv(&x, 8.0, 45.0, &cfg).unwrap();
        for other in [5.0, 11.0, 14.0] {
            assert!(at > cv(&x, other, 45.0, &cfg).unwrap());
        }
    }

    #[test]
    fn cv_of_unrelated_noise_is_low() {
        let x = crate::synthesis::pink_noise(10_000, 1000.0, 1.0, 77).unwrap();
        let cfg = MeasureConfig::default();
        let mean = (2..=20).map(|m| cv(&x, m as f64, 45.0, &cfg).unwrap()).sum::<f64>() / 19.0;
        assert!(mean < 0.15, "{mean}");
    }

    #[test]
    fn config_validation() {
        let cfg = MeasureConfig { kld_bins: 1, ..MeasureConfig::default() };
        let x = synth_pac(&SynthesisSpec::new(8.0, 45.0)).unwrap().composite;
        assert!(kld(&x, 8.0, 45.0, &cfg).is_err());
        let cfg = MeasureConfig { mca_bw: 0.0, ..MeasureConfig::default() };
        assert!(mca_pac(&x, 8.0, 45.0, &cfg).is_err());
    }
}

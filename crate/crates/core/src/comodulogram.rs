//! PAC matrices over an integer (m, n) grid.
//!
//! [`FilterBank`] caches every band-pass of the raw input keyed by filter
//! family, center and width, so a 50×50 MCA matrix needs about one hundred
//! Gabor filterings instead of three per cell. Cells are independent and are
//! evaluated on the rayon pool.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::filters::PreparedKernel;
use crate::measures::{self, BandSource, DirectBands, MeasureConfig, Method};
use crate::signal::Signal;
use crate::synthesis::{self, SynthesisSpec};

/// Inclusive integer frequency ranges, 1 Hz step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub m_range: (u32, u32),
    pub n_range: (u32, u32),
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { m_range: (1, 50), n_range: (1, 50) }
    }
}

impl GridSpec {
    pub fn new(m_range: (u32, u32), n_range: (u32, u32)) -> Self {
        Self { m_range, n_range }
    }

    pub fn validate(&self, fs: f64) -> Result<()> {
        for (name, (lo, hi)) in [("m", self.m_range), ("n", self.n_range)] {
            if lo < 1 || hi < lo {
                return Err(Error::InvalidInput(format!("{name} range {lo}..={hi} must satisfy 1 <= lo <= hi")));
            }
        }
        if f64::from(self.n_range.1) >= fs / 2.0 {
            return Err(Error::Aliasing { center: f64::from(self.n_range.1), nyquist: fs / 2.0 });
        }
        Ok(())
    }

    pub fn m_values(&self) -> Vec<u32> {
        (self.m_range.0..=self.m_range.1).collect()
    }

    pub fn n_values(&self) -> Vec<u32> {
        (self.n_range.0..=self.n_range.1).collect()
    }

    pub fn contains(&self, m: u32, n: u32) -> bool {
        (self.m_range.0..=self.m_range.1).contains(&m) && (self.n_range.0..=self.n_range.1).contains(&n)
    }
}

/// Coupling values with rows indexed by modulated `n` and columns by
/// modulating `m`, both ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacMatrix {
    pub method: Method,
    pub normalized: bool,
    pub grid: GridSpec,
    pub config: MeasureConfig,
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub m: u32,
    pub n: u32,
    pub value: f64,
}

impl PacMatrix {
    pub fn zeros(method: Method, grid: GridSpec, config: MeasureConfig) -> Self {
        let rows = grid.n_values().len();
        let cols = grid.m_values().len();
        Self { method, normalized: false, grid, config, values: vec![vec![0.0; cols]; rows] }
    }

    pub fn get(&self, m: u32, n: u32) -> Option<f64> {
        if !self.grid.contains(m, n) {
            return None;
        }
        Some(self.values[(n - self.grid.n_range.0) as usize][(m - self.grid.m_range.0) as usize])
    }

    pub fn set(&mut self, m: u32, n: u32, value: f64) {
        assert!(self.grid.contains(m, n), "cell ({m}, {n}) outside the grid");
        self.values[(n - self.grid.n_range.0) as usize][(m - self.grid.m_range.0) as usize] = value;
    }

    pub fn max(&self) -> f64 {
        self.values.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Median over the cells with `m < n`.
    pub fn median_support(&self) -> f64 {
        let mut v: Vec<f64> = self.cells().filter(|&(m, n, _)| m < n).map(|(_, _, v)| v).collect();
        if v.is_empty() {
            return 0.0;
        }
        v.sort_by(f64::total_cmp);
        let k = v.len() / 2;
        if v.len() % 2 == 1 {
            v[k]
        } else {
            0.5 * (v[k - 1] + v[k])
        }
    }

    /// `(m, n, value)` for every cell, rows first.
    pub fn cells(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        let (m0, n0) = (self.grid.m_range.0, self.grid.n_range.0);
        self.values
            .iter()
            .enumerate()
            .flat_map(move |(i, row)| row.iter().enumerate().map(move |(j, &v)| (m0 + j as u32, n0 + i as u32, v)))
    }

    /// True when `(m, n)` is at least as large as its eight neighbours.
    pub fn is_local_max(&self, m: u32, n: u32) -> bool {
        let Some(center) = self.get(m, n) else { return false };
        for dn in -1i64..=1 {
            for dm in -1i64..=1 {
                if dm == 0 && dn == 0 {
                    continue;
                }
                let (mm, nn) = (i64::from(m) + dm, i64::from(n) + dn);
                if mm < 1 || nn < 1 {
                    continue;
                }
                if let Some(v) = self.get(mm as u32, nn as u32) {
                    if v > center {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Divides by the global maximum. An all-zero matrix only gets the flag.
pub fn normalize(mat: &PacMatrix) -> PacMatrix {
    let mut out = mat.clone();
    out.normalized = true;
    let max = mat.max();
    if max > 0.0 && max != 1.0 {
        for v in out.values.iter_mut().flatten() {
            *v /= max;
        }
    }
    out
}

/// Largest cell; ties go to the smallest `n`, then the smallest `m`.
/// `None` when no cell is positive.
pub fn argmax(mat: &PacMatrix) -> Option<Peak> {
    let mut best: Option<Peak> = None;
    for (m, n, value) in mat.cells() {
        if value > best.map_or(0.0, |p| p.value) {
            best = Some(Peak { m, n, value });
        }
    }
    best
}

/// Manhattan distance in Hz; a missing peak is infinitely far.
pub fn localization_error(found: Option<(u32, u32)>, truth: (u32, u32)) -> f64 {
    match found {
        Some((m, n)) => f64::from(m.abs_diff(truth.0) + n.abs_diff(truth.1)),
        None => f64::INFINITY,
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum BandKey {
    Gabor(u64, u64),
    GaborPhasors(u64, u64),
    Morlet(u64, u64),
}

/// Shared band-pass outputs of one input signal. Safe for concurrent reads
/// and concurrent first fills; racing fills compute identical values and the
/// last insert wins.
pub struct FilterBank<'a> {
    x: &'a Signal,
    complex: RwLock<HashMap<BandKey, Arc<Vec<Complex64>>>>,
    kernels: RwLock<HashMap<(u64, u64), Arc<PreparedKernel>>>,
    filterings: AtomicUsize,
}

impl<'a> FilterBank<'a> {
    pub fn new(x: &'a Signal) -> Self {
        Self { x, complex: RwLock::default(), kernels: RwLock::default(), filterings: AtomicUsize::new(0) }
    }

    /// Number of band-pass filterings of the raw input performed so far.
    pub fn filterings(&self) -> usize {
        self.filterings.load(Ordering::Relaxed)
    }

    fn cached<T>(
        map: &RwLock<HashMap<BandKey, Arc<T>>>,
        key: BandKey,
        fill: impl FnOnce() -> Result<T>,
    ) -> Result<Arc<T>> {
        if let Some(hit) = map.read().expect("filter cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let value = Arc::new(fill()?);
        map.write().expect("filter cache poisoned").insert(key, Arc::clone(&value));
        Ok(value)
    }
}

impl BandSource for FilterBank<'_> {
    fn signal(&self) -> &Signal {
        self.x
    }

    fn gabor(&self, center: f64, bw: f64) -> Result<Arc<Vec<Complex64>>> {
        Self::cached(&self.complex, BandKey::Gabor(center.to_bits(), bw.to_bits()), || {
            self.filterings.fetch_add(1, Ordering::Relaxed);
            DirectBands(self.x).gabor(center, bw).map(Arc::unwrap_or_clone)
        })
    }

    fn gabor_phasors(&self, center: f64, bw: f64) -> Result<Arc<Vec<Complex64>>> {
        Self::cached(&self.complex, BandKey::GaborPhasors(center.to_bits(), bw.to_bits()), || {
            measures::unit_phasors(&self.gabor(center, bw)?)
        })
    }

    fn morlet(&self, center: f64, cycles: f64) -> Result<Arc<Vec<Complex64>>> {
        Self::cached(&self.complex, BandKey::Morlet(center.to_bits(), cycles.to_bits()), || {
            self.filterings.fetch_add(1, Ordering::Relaxed);
            DirectBands(self.x).morlet(center, cycles).map(Arc::unwrap_or_clone)
        })
    }

    fn envelope_kernel(&self, center: f64, bw: f64) -> Result<Arc<PreparedKernel>> {
        let key = (center.to_bits(), bw.to_bits());
        if let Some(hit) = self.kernels.read().expect("kernel cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let prepared = DirectBands(self.x).envelope_kernel(center, bw)?;
        self.kernels.write().expect("kernel cache poisoned").insert(key, Arc::clone(&prepared));
        Ok(prepared)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComputeOptions {
    /// Share band-passed inputs across cells.
    pub cached: bool,
    /// Evaluate cells on the rayon pool.
    pub parallel: bool,
}

impl Default for ComputeOptions {
    fn default() -> Self {
        Self { cached: true, parallel: true }
    }
}

/// Unnormalized matrix of `method` over `grid`. Cells with `m >= n`,
/// out-of-band cells and degenerate cells are 0.
pub fn compute_matrix(x: &Signal, method: Method, grid: &GridSpec, cfg: &MeasureConfig) -> Result<PacMatrix> {
    compute_matrix_with(x, method, grid, cfg, ComputeOptions::default())
}

pub fn compute_matrix_with(
    x: &Signal,
    method: Method,
    grid: &GridSpec,
    cfg: &MeasureConfig,
    opts: ComputeOptions,
) -> Result<PacMatrix> {
    if opts.cached {
        compute_from(&FilterBank::new(x), method, grid, cfg, opts.parallel)
    } else {
        compute_from(&DirectBands(x), method, grid, cfg, opts.parallel)
    }
}

/// Computes a matrix from an existing band source, e.g. a [`FilterBank`]
/// shared by several methods on the same signal.
pub fn compute_from(
    src: &dyn BandSource,
    method: Method,
    grid: &GridSpec,
    cfg: &MeasureConfig,
    parallel: bool,
) -> Result<PacMatrix> {
    grid.validate(src.signal().fs())?;
    cfg.validate()?;
    let cells: Vec<(u32, u32)> = grid
        .n_values()
        .into_iter()
        .flat_map(|n| grid.m_values().into_iter().filter(move |&m| m < n).map(move |m| (m, n)))
        .collect();
    let eval = |&(m, n): &(u32, u32)| {
        measures::evaluate_or_zero(src, method, f64::from(m), f64::from(n), cfg).map(|v| (m, n, v))
    };
    let results: Vec<(u32, u32, f64)> = if parallel {
        cells.par_iter().map(eval).collect::<Result<_>>()?
    } else {
        cells.iter().map(eval).collect::<Result<_>>()?
    };
    let mut mat = PacMatrix::zeros(method, *grid, cfg.clone());
    for (m, n, v) in results {
        mat.set(m, n, v);
    }
    log::debug!("{method} matrix done, max {:.4}", mat.max());
    Ok(mat)
}

fn ser_error<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_some(v)
    } else {
        s.serialize_none()
    }
}

fn de_error<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

/// One (pair, method, seed) run. An infinite error (no peak) is written as
/// `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub pair: (u32, u32),
    pub method: Method,
    pub seed: u64,
    pub argmax: Option<Peak>,
    #[serde(serialize_with = "ser_error", deserialize_with = "de_error")]
    pub localization_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub pair: (u32, u32),
    pub method: Method,
    pub runs: usize,
    #[serde(serialize_with = "ser_error", deserialize_with = "de_error")]
    pub mean_error: f64,
    #[serde(serialize_with = "ser_error", deserialize_with = "de_error")]
    pub median_error: f64,
    #[serde(serialize_with = "ser_error", deserialize_with = "de_error")]
    pub max_error: f64,
    /// Runs whose peak lies within 1 Hz of the truth in both coordinates.
    pub within_one_hz: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacReport {
    pub schema: u32,
    pub runs: Vec<RunRecord>,
    pub summary: Vec<MethodSummary>,
}

impl PacReport {
    pub fn from_runs(mut runs: Vec<RunRecord>) -> Self {
        runs.sort_by_key(|r| (r.pair, method_rank(r.method), r.seed));
        let mut summary = Vec::new();
        let mut i = 0;
        while i < runs.len() {
            let key = (runs[i].pair, runs[i].method);
            let j = i + runs[i..].iter().take_while(|r| (r.pair, r.method) == key).count();
            let mut errs: Vec<f64> = runs[i..j].iter().map(|r| r.localization_error).collect();
            errs.sort_by(f64::total_cmp);
            let k = errs.len() / 2;
            let median = if errs.len() % 2 == 1 { errs[k] } else { 0.5 * (errs[k - 1] + errs[k]) };
            let within = runs[i..j]
                .iter()
                .filter(|r| r.argmax.is_some_and(|p| p.m.abs_diff(r.pair.0) <= 1 && p.n.abs_diff(r.pair.1) <= 1))
                .count();
            summary.push(MethodSummary {
                pair: key.0,
                method: key.1,
                runs: j - i,
                mean_error: errs.iter().sum::<f64>() / errs.len() as f64,
                median_error: median,
                max_error: errs[errs.len() - 1],
                within_one_hz: within,
            });
            i = j;
        }
        Self { schema: 1, runs, summary }
    }

    pub fn summary_for(&self, pair: (u32, u32), method: Method) -> Option<&MethodSummary> {
        self.summary.iter().find(|s| s.pair == pair && s.method == method)
    }
}

fn method_rank(m: Method) -> usize {
    Method::ALL.iter().position(|&x| x == m).unwrap_or(usize::MAX)
}

/// Benchmark comparison: every pair is synthesized once per seed, then each
/// method is localized on that signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSpec {
    pub pairs: Vec<(u32, u32)>,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    pub ami: f64,
    pub duration: f64,
    pub fs: f64,
    pub noise_power: f64,
    /// Target clean power; `None` keeps the unit-amplitude signal.
    pub clean_power: Option<f64>,
    pub grid: GridSpec,
    pub config: MeasureConfig,
}

impl CompareSpec {
    /// The four benchmark pairs at the standard noisy preset.
    pub fn benchmark(methods: Vec<Method>, seeds: Vec<u64>) -> Self {
        Self {
            pairs: synthesis::BENCHMARK_PAIRS.iter().map(|&(m, n)| (m as u32, n as u32)).collect(),
            methods,
            seeds,
            ami: synthesis::BENCHMARK_AMI,
            duration: synthesis::BENCHMARK_DURATION,
            fs: synthesis::BENCHMARK_FS,
            noise_power: synthesis::BENCHMARK_NOISE_POWER,
            clean_power: Some(synthesis::BENCHMARK_CLEAN_POWER),
            grid: GridSpec::default(),
            config: MeasureConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pairs.is_empty() || self.methods.is_empty() || self.seeds.is_empty() {
            return Err(Error::InvalidInput("compare needs at least one pair, method and seed".into()));
        }
        for &(m, n) in &self.pairs {
            if m >= n {
                return Err(Error::InvalidInput(format!("pair ({m}, {n}) needs m < n")));
            }
        }
        self.grid.validate(self.fs)?;
        self.config.validate()
    }

    fn synthesis_spec(&self, pair: (u32, u32), seed: u64) -> Result<SynthesisSpec> {
        let spec = SynthesisSpec::new(f64::from(pair.0), f64::from(pair.1))
            .with_ami(self.ami)
            .with_duration(self.duration)
            .with_fs(self.fs)
            .with_noise_power(self.noise_power)
            .with_seed(seed);
        match self.clean_power {
            Some(p) => spec.with_clean_power(p),
            None => Ok(spec),
        }
    }
}

/// Runs the comparison on the current rayon pool. Each (pair, seed) job owns
/// one filter bank shared by all methods; cells inside a job run serially.
pub fn compare(spec: &CompareSpec) -> Result<PacReport> {
    Ok(compare_with_matrices(spec)?.0)
}

/// [`compare`], also returning every unnormalized matrix next to its record,
/// in report order.
pub fn compare_with_matrices(spec: &CompareSpec) -> Result<(PacReport, Vec<(RunRecord, PacMatrix)>)> {
    spec.validate()?;
    let jobs: Vec<((u32, u32), u64)> =
        spec.pairs.iter().flat_map(|&p| spec.seeds.iter().map(move |&s| (p, s))).collect();
    let nested: Vec<Vec<(RunRecord, PacMatrix)>> = jobs
        .par_iter()
        .map(|&(pair, seed)| {
            let x = synthesis::synth_pac(&spec.synthesis_spec(pair, seed)?)?.composite;
            let bank = FilterBank::new(&x);
            spec.methods
                .iter()
                .map(|&method| {
                    let mat = compute_from(&bank, method, &spec.grid, &spec.config, false)?;
                    let peak = argmax(&mat);
                    log::info!("pair {pair:?} seed {seed} {method}: peak {peak:?}");
                    let record = RunRecord {
                        pair,
                        method,
                        seed,
                        argmax: peak,
                        localization_error: localization_error(peak.map(|p| (p.m, p.n)), pair),
                    };
                    Ok((record, mat))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut all: Vec<(RunRecord, PacMatrix)> = nested.into_iter().flatten().collect();
    all.sort_by_key(|(r, _)| (r.pair, method_rank(r.method), r.seed));
    let report = PacReport::from_runs(all.iter().map(|(r, _)| r.clone()).collect());
    Ok((report, all))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_with(cells: &[(u32, u32, f64)]) -> PacMatrix {
        let mut m = PacMatrix::zeros(Method::Mca, GridSpec::default(), MeasureConfig::default());
        for &(a, b, v) in cells {
            m.set(a, b, v);
        }
        m
    }

    #[test]
    fn argmax_rules() {
        assert_eq!(argmax(&mat_with(&[(12, 45, 0.3)])).map(|p| (p.m, p.n)), Some((12, 45)));
        assert_eq!(argmax(&mat_with(&[(9, 45, 0.7), (8, 45, 0.7)])).map(|p| (p.m, p.n)), Some((8, 45)));
        assert_eq!(argmax(&mat_with(&[(3, 46, 0.7), (30, 45, 0.7)])).map(|p| (p.m, p.n)), Some((30, 45)));
        assert_eq!(argmax(&mat_with(&[])), None);
    }

    #[test]
    fn localization_examples() {
        assert_eq!(localization_error(Some((8, 45)), (8, 45)), 0.0);
        assert_eq!(localization_error(Some((7, 44)), (8, 45)), 2.0);
        assert_eq!(localization_error(None, (8, 45)), f64::INFINITY);
    }

    #[test]
    fn normalize_examples() {
        let m = mat_with(&[(3, 10, 0.4), (5, 20, 0.1)]);
        let n = normalize(&m);
        assert_eq!(n.max(), 1.0);
        assert_eq!(n.get(5, 20).unwrap(), 0.1 / 0.4);
        assert_eq!(normalize(&n), n);
        let z = normalize(&mat_with(&[]));
        assert!(z.normalized);
        assert_eq!(z.max(), 0.0);
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::default().validate(1000.0).is_ok());
        assert!(GridSpec::default().validate(90.0).is_err());
        assert!(GridSpec::new((0, 5), (1, 5)).validate(1000.0).is_err());
        assert!(GridSpec::new((5, 4), (1, 5)).validate(1000.0).is_err());
    }

    #[test]
    fn local_max_check() {
        let m = mat_with(&[(8, 45, 1.0), (9, 45, 0.5), (37, 45, 0.4), (36, 45, 0.3)]);
        assert!(m.is_local_max(8, 45));
        assert!(m.is_local_max(37, 45));
        assert!(!m.is_local_max(36, 45));
    }

    #[test]
    fn small_grid_masks_and_caches() {
        let x = synthesis::synth_pac(&SynthesisSpec::new(8.0, 20.0).with_duration(5.0)).unwrap().composite;
        let grid = GridSpec::new((6, 10), (8, 22));
        let cfg = MeasureConfig::default();
        let bank = FilterBank::new(&x);
        let a = compute_from(&bank, Method::Mca, &grid, &cfg, false).unwrap();
        for (m, n, v) in a.cells() {
            assert!((0.0..=1.0).contains(&v));
            if m >= n {
                assert_eq!(v, 0.0);
            }
        }
        // Distinct Gabor centers: m in 6..=10 plus n−m..=n+m over the support.
        let mut centers = std::collections::BTreeSet::new();
        for (m, n, _) in a.cells().filter(|&(m, n, _)| m < n && n > m) {
            if n - m >= 1 {
                centers.extend([m, n - m, n, n + m]);
            }
        }
        assert!(bank.filterings() <= centers.len());
        let b = compute_matrix_with(&x, Method::Mca, &grid, &cfg, ComputeOptions { cached: false, parallel: true })
            .unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn report_aggregates() {
        let rec = |m, seed, err: f64, peak: Option<(u32, u32)>| RunRecord {
            pair: (8, 45),
            method: m,
            seed,
            argmax: peak.map(|(m, n)| Peak { m, n, value: 1.0 }),
            localization_error: err,
        };
        let r = PacReport::from_runs(vec![
            rec(Method::Eps, 1, 4.0, Some((12, 45))),
            rec(Method::Mca, 2, 2.0, Some((9, 46))),
            rec(Method::Mca, 1, 0.0, Some((8, 45))),
            rec(Method::Eps, 2, f64::INFINITY, None),
        ]);
        assert_eq!(r.schema, 1);
        let mca = r.summary_for((8, 45), Method::Mca).unwrap();
        assert_eq!((mca.mean_error, mca.median_error, mca.max_error, mca.within_one_hz), (1.0, 1.0, 2.0, 2));
        let eps = r.summary_for((8, 45), Method::Eps).unwrap();
        assert!(eps.mean_error.is_infinite());
        let json = serde_json::to_string(&r).unwrap();
        let back: PacReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}

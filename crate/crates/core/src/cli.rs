//! Command-line front end.
//!
//! Every command writes its outputs plus a JSON manifest next to the main
//! output (`<output>.json`). `--dry-run` prints that manifest and stops.
//! Exit codes: 0 success, 2 usage, 3 I/O or parse, 4 numeric.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::comodulogram::{self, argmax, normalize, CompareSpec, GridSpec};
use crate::error::{Error, Result};
use crate::io::{self, RunManifest};
use crate::measures::{MeasureConfig, Method};
use crate::spectral::{self, WelchSpec};
use crate::synthesis::{self, SynthesisSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "pac-lab", version, about = "Phase-amplitude coupling analysis")]
pub struct Cli {
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, env = "PAC_LAB_JOBS", default_value_t = 0)]
    pub jobs: usize,

    /// Print the run manifest and exit without computing.
    #[arg(long, global = true)]
    pub dry_run: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a pure-PAC signal with optional pink noise.
    Synth(SynthArgs),
    /// Compute a normalized PAC matrix from a signal file.
    Pac(PacArgs),
    /// Welch power spectral density of a signal file.
    Psd(PsdArgs),
    /// Localize benchmark pairs with several methods over many seeds.
    Compare(CompareArgs),
    /// Render a matrix file as a binary PGM image.
    Heatmap(HeatmapArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    /// Benchmark pair 1..=4 at the standard noisy preset.
    #[arg(long, conflicts_with_all = ["m", "n"])]
    pub paper_pair: Option<usize>,
    /// Modulating frequency, Hz.
    #[arg(long, required_unless_present = "paper_pair")]
    pub m: Option<f64>,
    /// Modulated (carrier) frequency, Hz.
    #[arg(long, required_unless_present = "paper_pair")]
    pub n: Option<f64>,
    #[arg(long)]
    pub ami: Option<f64>,
    /// Duration, s.
    #[arg(long)]
    pub dur: Option<f64>,
    #[arg(long)]
    pub fs: Option<f64>,
    #[arg(long)]
    pub noise_power: Option<f64>,
    /// Rescale the clean part to this power.
    #[arg(long)]
    pub clean_power: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct MeasureArgs {
    /// Gabor bandwidth for MCA bands and envelope filters, Hz.
    #[arg(long, default_value_t = 1.0)]
    pub mca_bw: f64,
    /// Morlet cycles for the reference measures.
    #[arg(long, default_value_t = 4.0)]
    pub cycles: f64,
    #[arg(long, default_value_t = 50)]
    pub kld_bins: usize,
    /// Samples trimmed from each end; default is the longest filter-path transient.
    #[arg(long)]
    pub edge_trim: Option<usize>,
    /// Highest modulating frequency of the grid, Hz.
    #[arg(long, default_value_t = 50)]
    pub m_max: u32,
    /// Highest modulated frequency of the grid, Hz.
    #[arg(long, default_value_t = 50)]
    pub n_max: u32,
}

impl MeasureArgs {
    fn config(&self) -> MeasureConfig {
        MeasureConfig {
            mca_bw: self.mca_bw,
            morlet_cycles: self.cycles,
            kld_bins: self.kld_bins,
            edge_trim: self.edge_trim,
            ..MeasureConfig::default()
        }
    }

    fn grid(&self) -> GridSpec {
        GridSpec::new((1, self.m_max), (1, self.n_max))
    }
}

#[derive(Debug, Args, Serialize)]
pub struct PacArgs {
    /// mca, eps, mvl, cv or kld.
    #[arg(long, default_value = "mca")]
    pub method: String,
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub measure: MeasureArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct PsdArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Segment length in samples; clipped to the signal length.
    #[arg(long, default_value_t = 4096)]
    pub window: usize,
    #[arg(long, default_value_t = 0.25)]
    pub overlap: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    /// Comma-separated `m:n` pairs.
    #[arg(long, default_value = "8:45,12:45,20:45,30:45")]
    pub pairs: String,
    /// Number of seeds; runs use seeds 1..=N.
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    #[arg(long, default_value = "mca,eps,mvl,cv,kld")]
    pub methods: String,
    #[arg(long, default_value_t = synthesis::BENCHMARK_AMI)]
    pub ami: f64,
    #[arg(long, default_value_t = synthesis::BENCHMARK_DURATION)]
    pub dur: f64,
    #[arg(long, default_value_t = synthesis::BENCHMARK_FS)]
    pub fs: f64,
    #[arg(long, default_value_t = synthesis::BENCHMARK_NOISE_POWER)]
    pub noise_power: f64,
    #[arg(long, default_value_t = synthesis::BENCHMARK_CLEAN_POWER)]
    pub clean_power: f64,
    /// Report JSON path.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also write every normalized matrix here.
    #[arg(long)]
    pub matrices_dir: Option<PathBuf>,
    #[command(flatten)]
    pub measure: MeasureArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct HeatmapArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

/// Maps a library error onto the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::InvalidMethod(_) => EXIT_USAGE,
        Error::Io(_) | Error::Parse(_) => EXIT_IO,
        _ => EXIT_NUMERIC,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start {} worker threads: {e}", cli.jobs)))?;
    pool.install(|| match &cli.command {
        Command::Synth(a) => cmd_synth(a, cli.dry_run),
        Command::Pac(a) => cmd_pac(a, cli.dry_run),
        Command::Psd(a) => cmd_psd(a, cli.dry_run),
        Command::Compare(a) => cmd_compare(a, cli.dry_run),
        Command::Heatmap(a) => cmd_heatmap(a, cli.dry_run),
    })
}

fn params<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

/// Prints the manifest on a dry run; otherwise runs `work` and writes the
/// manifest next to `main_output`.
fn with_manifest(
    mut manifest: RunManifest,
    main_output: &Path,
    dry_run: bool,
    work: impl FnOnce(&mut RunManifest) -> Result<()>,
) -> Result<()> {
    if dry_run {
        println!("{}", serde_json::to_string_pretty(&manifest).expect("manifest serializes"));
        return Ok(());
    }
    let start = Instant::now();
    work(&mut manifest)?;
    manifest.duration_s = Some(start.elapsed().as_secs_f64());
    io::write_json(&io::manifest_path(main_output), &manifest)
}

pub fn synth_spec(a: &SynthArgs) -> Result<SynthesisSpec> {
    let mut spec = match a.paper_pair {
        Some(k) => SynthesisSpec::benchmark(k, a.seed)?,
        None => {
            let (Some(m), Some(n)) = (a.m, a.n) else {
                return Err(Error::InvalidInput("--m and --n are required without --paper-pair".into()));
            };
            SynthesisSpec::new(m, n).with_seed(a.seed)
        }
    };
    if let Some(v) = a.ami {
        spec = spec.with_ami(v);
    }
    if let Some(v) = a.dur {
        spec = spec.with_duration(v);
    }
    if let Some(v) = a.fs {
        spec = spec.with_fs(v);
    }
    if let Some(v) = a.noise_power {
        spec = spec.with_noise_power(v);
    }
    let target = a.clean_power.or(a.paper_pair.map(|_| synthesis::BENCHMARK_CLEAN_POWER));
    if let Some(p) = target {
        spec = spec.with_clean_power(p)?;
    }
    spec.validate()?;
    Ok(spec)
}

fn cmd_synth(a: &SynthArgs, dry_run: bool) -> Result<()> {
    let spec = synth_spec(a)?;
    let mut manifest = RunManifest::new("synth", json!({ "args": params(a), "spec": spec }));
    manifest.seeds = vec![spec.seed];
    manifest.outputs = vec![path_str(&a.output)];
    with_manifest(manifest, &a.output, dry_run, |man| {
        let s = synthesis::synth_pac(&spec)?;
        io::write_signal_csv(&a.output, &s.composite)?;
        man.result = Some(json!({ "samples": s.composite.len(), "snr": finite_or_null(s.snr()) }));
        Ok(())
    })
}

fn finite_or_null(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else {
        serde_json::Value::Null
    }
}

fn cmd_pac(a: &PacArgs, dry_run: bool) -> Result<()> {
    let method: Method = a.method.parse()?;
    let cfg = a.measure.config();
    cfg.validate()?;
    let grid = a.measure.grid();
    let mut manifest =
        RunManifest::new("pac", json!({ "method": method, "grid": grid, "config": cfg, "args": params(a) }));
    manifest.inputs = vec![path_str(&a.input)];
    manifest.outputs = vec![path_str(&a.output)];
    with_manifest(manifest, &a.output, dry_run, |man| {
        let x = io::read_signal_csv(&a.input)?;
        let mat = normalize(&comodulogram::compute_matrix(&x, method, &grid, &cfg)?);
        io::write_matrix_csv(&a.output, &mat)?;
        let peak = argmax(&mat);
        log::info!("{method} peak {peak:?}");
        man.result = Some(json!({ "argmax": peak }));
        Ok(())
    })
}

fn cmd_psd(a: &PsdArgs, dry_run: bool) -> Result<()> {
    let welch = WelchSpec::new(a.window, a.overlap);
    welch.validate()?;
    let mut manifest = RunManifest::new("psd", json!({ "welch": welch, "args": params(a) }));
    manifest.inputs = vec![path_str(&a.input)];
    manifest.outputs = vec![path_str(&a.output)];
    with_manifest(manifest, &a.output, dry_run, |man| {
        let x = io::read_signal_csv(&a.input)?;
        let psd = spectral::welch_psd(&x, &welch)?;
        io::write_spectrum_csv(&a.output, &psd)?;
        man.result = Some(json!({
            "window_used": welch.effective_window(x.len()),
            "segments": welch.segments(x.len()),
            "peak_hz": psd.freqs[psd.peak_bin()],
        }));
        Ok(())
    })
}

fn parse_pairs(s: &str) -> Result<Vec<(u32, u32)>> {
    let pairs = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let bad = || Error::InvalidInput(format!("pair `{p}` is not of the form m:n"));
            let (m, n) = p.split_once(':').ok_or_else(bad)?;
            Ok((m.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?))
        })
        .collect::<Result<Vec<_>>>()?;
    if pairs.is_empty() {
        return Err(Error::InvalidInput("empty pair list".into()));
    }
    Ok(pairs)
}

fn parse_methods(s: &str) -> Result<Vec<Method>> {
    let methods =
        s.split(',').map(str::trim).filter(|m| !m.is_empty()).map(str::parse).collect::<Result<Vec<Method>>>()?;
    if methods.is_empty() {
        return Err(Error::InvalidInput("empty method list".into()));
    }
    Ok(methods)
}

pub fn compare_spec(a: &CompareArgs) -> Result<CompareSpec> {
    if a.seeds == 0 {
        return Err(Error::InvalidInput("--seeds must be at least 1".into()));
    }
    let spec = CompareSpec {
        pairs: parse_pairs(&a.pairs)?,
        methods: parse_methods(&a.methods)?,
        seeds: (1..=a.seeds).collect(),
        ami: a.ami,
        duration: a.dur,
        fs: a.fs,
        noise_power: a.noise_power,
        clean_power: Some(a.clean_power),
        grid: a.measure.grid(),
        config: a.measure.config(),
    };
    spec.validate()?;
    Ok(spec)
}

fn cmd_compare(a: &CompareArgs, dry_run: bool) -> Result<()> {
    let spec = compare_spec(a)?;
    let mut manifest = RunManifest::new("compare", json!({ "spec": spec, "args": params(a) }));
    manifest.seeds = spec.seeds.clone();
    manifest.outputs = vec![path_str(&a.output)];
    with_manifest(manifest, &a.output, dry_run, |man| {
        let (report, matrices) = comodulogram::compare_with_matrices(&spec)?;
        io::write_json(&a.output, &report)?;
        if let Some(dir) = &a.matrices_dir {
            std::fs::create_dir_all(dir)?;
            for (rec, mat) in &matrices {
                let name = format!("{}_{}-{}_seed{}.csv", rec.method, rec.pair.0, rec.pair.1, rec.seed);
                let path = dir.join(name);
                io::write_matrix_csv(&path, &normalize(mat))?;
                man.outputs.push(path_str(&path));
            }
        }
        for s in &report.summary {
            println!(
                "{:>3}:{:<3} {:<4} mean error {:>6.2} Hz  within 1 Hz {}/{}",
                s.pair.0, s.pair.1, s.method, s.mean_error, s.within_one_hz, s.runs
            );
        }
        Ok(())
    })
}

fn cmd_heatmap(a: &HeatmapArgs, dry_run: bool) -> Result<()> {
    let mut manifest = RunManifest::new("heatmap", params(a));
    manifest.inputs = vec![path_str(&a.input)];
    manifest.outputs = vec![path_str(&a.output)];
    with_manifest(manifest, &a.output, dry_run, |_| {
        let mat = io::read_matrix_csv(&a.input)?;
        io::write_pgm(&a.output, &mat)
    })
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pac_lab::comodulogram::{PacMatrix, PacReport};
use pac_lab::io::{self, RunManifest};
use pac_lab::measures::Method;
use pac_lab::synthesis::{synth_pac, SynthesisSpec};
use tempfile::TempDir;

fn pac_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pac-lab"))
        .args(args)
        .env_remove("PAC_LAB_JOBS")
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &TempDir, name: &str, extra: &[&str]) -> PathBuf {
    let out = path(dir, name);
    let mut args = vec!["synth", "-o", s(&out)];
    args.extend_from_slice(extra);
    let o = pac_lab(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn synth_writes_benchmark_sized_signal_that_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = synth(
        &dir,
        "s.csv",
        &[
            "--m",
            "8",
            "--n",
            "45",
            "--ami",
            "0.25",
            "--dur",
            "10",
            "--fs",
            "1000",
            "--noise-power",
            "6250",
            "--clean-power",
            "630",
            "--seed",
            "1",
        ],
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("time_s,value"));
    assert_eq!(text.lines().count(), 10_001);

    let expected = synth_pac(
        &SynthesisSpec::new(8.0, 45.0).with_noise_power(6250.0).with_seed(1).with_clean_power(630.0).unwrap(),
    )
    .unwrap()
    .composite;
    let back = io::read_signal_csv(&out).unwrap();
    assert_eq!(back.fs(), 1000.0);
    assert!(back.samples().iter().zip(expected.samples()).all(|(a, b)| a.to_bits() == b.to_bits()));

    let manifest: RunManifest = io::read_json(&io::manifest_path(&out)).unwrap();
    assert_eq!(manifest.command, "synth");
    assert_eq!(manifest.seeds, vec![1]);
    assert!(manifest.duration_s.is_some());
}

#[test]
fn paper_pair_preset() {
    let dir = TempDir::new().unwrap();
    let out = synth(&dir, "s.csv", &["--paper-pair", "4", "--seed", "3"]);
    let manifest: RunManifest = io::read_json(&io::manifest_path(&out)).unwrap();
    let spec = &manifest.params["spec"];
    assert_eq!((spec["m"].as_f64(), spec["n"].as_f64()), (Some(30.0), Some(45.0)));
    assert_eq!(spec["noise_power"].as_f64(), Some(6250.0));
    let snr = manifest.result.unwrap()["snr"].as_f64().unwrap();
    assert!((snr - 0.1008).abs() < 0.005);
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let o = pac_lab(&["synth", "--m", "50", "--n", "45", "-o", s(&path(&dir, "x.csv"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!path(&dir, "x.csv").exists());

    let sig = synth(&dir, "s.csv", &["--m", "8", "--n", "45", "--dur", "3"]);
    let o = pac_lab(&["pac", "--method", "xyz", "-i", s(&sig), "-o", s(&path(&dir, "m.csv"))]);
    assert_eq!(o.status.code(), Some(2));

    let o = pac_lab(&["compare", "--pairs", "", "-o", s(&path(&dir, "r.json"))]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(pac_lab(&["synth"]).status.code(), Some(2));
}

#[test]
fn io_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let missing = path(&dir, "missing.csv");
    let o = pac_lab(&["pac", "-i", s(&missing), "-o", s(&path(&dir, "m.csv"))]);
    assert_eq!(o.status.code(), Some(3));

    let bad = path(&dir, "bad.csv");
    std::fs::write(&bad, "time_s,value\n0,1\n0.001,oops\n").unwrap();
    assert_eq!(pac_lab(&["psd", "-i", s(&bad), "-o", s(&path(&dir, "p.csv"))]).status.code(), Some(3));

    let bad_matrix = path(&dir, "bad_matrix.csv");
    std::fs::write(&bad_matrix, "# method: mca\n1,2,3\n").unwrap();
    assert_eq!(pac_lab(&["heatmap", "-i", s(&bad_matrix), "-o", s(&path(&dir, "h.pgm"))]).status.code(), Some(3));
}

#[test]
fn numeric_errors_exit_4() {
    let dir = TempDir::new().unwrap();
    // 200 samples are shorter than a 1 Hz Gabor kernel.
    let sig = synth(&dir, "short.csv", &["--m", "8", "--n", "45", "--dur", "0.2"]);
    let o = pac_lab(&["pac", "-i", s(&sig), "-o", s(&path(&dir, "m.csv"))]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn pac_localizes_noise_free_pair() {
    let dir = TempDir::new().unwrap();
    let sig = synth(&dir, "s.csv", &["--m", "20", "--n", "45"]);
    let out = path(&dir, "m.csv");
    let o = pac_lab(&["pac", "--method", "mca", "-i", s(&sig), "-o", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let manifest: RunManifest = io::read_json(&io::manifest_path(&out)).unwrap();
    let peak = &manifest.result.unwrap()["argmax"];
    assert_eq!((peak["m"].as_u64(), peak["n"].as_u64()), (Some(20), Some(45)));
    assert_eq!(manifest.params["method"], "mca");

    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# argmax: m=20 n=45")));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 50);
    let mat: PacMatrix = io::read_matrix_csv(&out).unwrap();
    assert!(mat.normalized);
    assert_eq!(mat.max(), 1.0);
    assert!(mat.cells().all(|(m, n, v)| m < n || v == 0.0));
}

#[test]
fn pac_kld_uses_requested_bins() {
    let dir = TempDir::new().unwrap();
    let sig = synth(&dir, "s.csv", &["--m", "8", "--n", "20", "--dur", "6"]);
    let out = path(&dir, "k.csv");
    let o = pac_lab(&[
        "pac",
        "--method",
        "kld",
        "--kld-bins",
        "18",
        "--m-max",
        "12",
        "--n-max",
        "24",
        "-i",
        s(&sig),
        "-o",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mat = io::read_matrix_csv(&out).unwrap();
    assert_eq!(mat.method, Method::Kld);
    assert_eq!(mat.config.kld_bins, 18);
    assert_eq!((mat.values.len(), mat.values[0].len()), (24, 12));
}

#[test]
fn psd_peaks_and_window_clipping() {
    let dir = TempDir::new().unwrap();
    let sig = synth(&dir, "s.csv", &["--paper-pair", "2", "--seed", "4"]);
    let out = path(&dir, "psd.csv");
    assert!(pac_lab(&["psd", "-i", s(&sig), "-o", s(&out)]).status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("freq_hz,psd"));
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (f, p) = l.split_once(',').unwrap();
            (f.parse().unwrap(), p.parse().unwrap())
        })
        .collect();
    let peak_near = |target: f64| {
        let k = rows.iter().position(|r| (r.0 - target).abs() < 0.5 * rows[1].0).unwrap();
        let local = &rows[k - 2..=k + 2];
        let best = local.iter().map(|r| r.1).fold(0.0, f64::max);
        // Above the 1/f background one octave away.
        best > 3.0 * rows[rows.iter().position(|r| r.0 >= 2.0 * target - 5.0).unwrap()].1
    };
    assert!(peak_near(12.0) && peak_near(45.0));

    let clipped = path(&dir, "psd_clip.csv");
    let o = pac_lab(&["psd", "--window", "16384", "-i", s(&sig), "-o", s(&clipped)]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("clipped"));
    let manifest: RunManifest = io::read_json(&io::manifest_path(&clipped)).unwrap();
    assert_eq!(manifest.result.unwrap()["window_used"].as_u64(), Some(10_000));
}

#[test]
fn heatmap_renders_pgm() {
    let dir = TempDir::new().unwrap();
    let sig = synth(&dir, "s.csv", &["--m", "8", "--n", "45"]);
    let mat = path(&dir, "m.csv");
    assert!(pac_lab(&["pac", "-i", s(&sig), "-o", s(&mat)]).status.success());
    let pgm = path(&dir, "m.pgm");
    assert!(pac_lab(&["heatmap", "-i", s(&mat), "-o", s(&pgm)]).status.success());
    let bytes = std::fs::read(&pgm).unwrap();
    assert!(bytes.starts_with(b"P5\n#"));
    let text_end = bytes.windows(8).position(|w| w == b"50 50\n25").unwrap() + b"50 50\n255\n".len();
    let pixels = &bytes[text_end..];
    assert_eq!(pixels.len(), 2500);
    // Row n = 45 is the sixth row from the top; column m = 8 is index 7.
    assert_eq!(pixels[5 * 50 + 7], 255);

    let zero = path(&dir, "zero.csv");
    let zeros = PacMatrix::zeros(Method::Mca, Default::default(), Default::default());
    io::write_matrix_csv(&zero, &zeros).unwrap();
    let zpgm = path(&dir, "zero.pgm");
    assert!(pac_lab(&["heatmap", "-i", s(&zero), "-o", s(&zpgm)]).status.success());
    let z = std::fs::read(&zpgm).unwrap();
    assert!(z[z.len() - 2500..].iter().all(|&p| p == 0));
}

#[test]
fn dry_run_prints_manifest_only() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "s.csv");
    let o = pac_lab(&["--dry-run", "synth", "--paper-pair", "1", "-o", s(&out)]);
    assert!(o.status.success());
    let manifest: RunManifest = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(manifest.command, "synth");
    assert!(manifest.duration_s.is_none());
    assert!(!out.exists());
    assert!(!io::manifest_path(&out).exists());

    let o = pac_lab(&["compare", "--dry-run", "--seeds", "3", "-o", s(&path(&dir, "r.json"))]);
    let manifest: RunManifest = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(manifest.seeds, vec![1, 2, 3]);
}

#[test]
fn noise_free_compare_and_reproducibility() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, jobs: &str| {
        let out = path(&dir, name);
        let o = Command::new(env!("CARGO_BIN_EXE_pac-lab"))
            .args(["compare", "--pairs", "20:45,30:45", "--seeds", "1", "--noise-power", "0", "--methods", "mca,mvl"])
            .args(["--matrices-dir", s(&path(&dir, name.trim_end_matches(".json")))])
            .args(["-o", s(&out)])
            .env("PAC_LAB_JOBS", jobs)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let a = run("a.json", "1");
    let b = run("b.json", "2");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let report: PacReport = io::read_json(&a).unwrap();
    assert_eq!(report.schema, 1);
    assert_eq!(report.runs.len(), 4);
    for pair in [(20, 45), (30, 45)] {
        assert_eq!(report.summary_for(pair, Method::Mca).unwrap().mean_error, 0.0);
    }
    let m1 = std::fs::read(path(&dir, "a").join("mca_20-45_seed1.csv")).unwrap();
    let m2 = std::fs::read(path(&dir, "b").join("mca_20-45_seed1.csv")).unwrap();
    assert_eq!(m1, m2);
}

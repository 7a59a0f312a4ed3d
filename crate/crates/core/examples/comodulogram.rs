//! Full MCA comodulogram of a noise-free benchmark pair, written as CSV and
//! PGM.
//!
//! `cargo run --example comodulogram -- [m n] [out_dir]`

use std::path::PathBuf;

use pac_lab::comodulogram::{argmax, compute_matrix, normalize, GridSpec};
use pac_lab::io;
use pac_lab::measures::{MeasureConfig, Method};
use pac_lab::synthesis::{synth_pac, SynthesisSpec};

fn main() -> pac_lab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let m: f64 = args.first().and_then(|a| a.parse().ok()).unwrap_or(20.0);
    let n: f64 = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(45.0);
    let out = args.get(2).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);

    let x = synth_pac(&SynthesisSpec::new(m, n))?.composite;
    let mat = normalize(&compute_matrix(&x, Method::Mca, &GridSpec::default(), &MeasureConfig::default())?);
    match argmax(&mat) {
        Some(p) => println!("peak at ({}, {}) with {:.9}", p.m, p.n, p.value),
        None => println!("no coupling found"),
    }

    let mut local: Vec<_> = mat.cells().filter(|&(m, n, v)| v > 0.5 && mat.is_local_max(m, n)).collect();
    local.sort_by(|a, b| b.2.total_cmp(&a.2));
    println!("local maxima above 0.5:");
    for (m, n, v) in local.iter().take(6) {
        println!("  ({m:>2}, {n:>2}) {v:.9}");
    }

    let csv = out.join("mca_matrix.csv");
    let pgm = out.join("mca_matrix.pgm");
    io::write_matrix_csv(&csv, &mat)?;
    io::write_pgm(&pgm, &mat)?;
    println!("wrote {} and {}", csv.display(), pgm.display());
    Ok(())
}

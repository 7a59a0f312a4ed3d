//! Benchmark PAC signals in pink noise, optionally written as CSV.
//!
//! `cargo run --example synthesize -- out.csv`

use pac_lab::synthesis::{synth_pac, SynthesisSpec, BENCHMARK_PAIRS};
use pac_lab::{io, signal};

fn main() -> pac_lab::Result<()> {
    for (k, (m, n)) in BENCHMARK_PAIRS.iter().enumerate() {
        let s = synth_pac(&SynthesisSpec::benchmark(k + 1, 1)?)?;
        println!(
            "pair ({m:>2}, {n}) Hz: clean power {:7.2}, noise power {:7.1}, SNR {:.4}",
            signal::power(&s.clean),
            signal::power(&s.noise),
            s.snr()
        );
    }

    if let Some(path) = std::env::args().nth(1) {
        let s = synth_pac(&SynthesisSpec::benchmark(1, 1)?)?;
        io::write_signal_csv(path.as_ref(), &s.composite)?;
        println!("wrote {} samples to {path}", s.composite.len());
    }
    Ok(())
}

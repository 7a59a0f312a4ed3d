//! Welch spectrum of a benchmark signal: the 1/f background slope and the
//! carrier peak.

use pac_lab::spectral::{welch_psd, WelchSpec};
use pac_lab::synthesis::{pink_noise, synth_pac, SynthesisSpec};

fn main() -> pac_lab::Result<()> {
    let spec = WelchSpec::new(4096, 0.25);

    let noise = pink_noise(100_000, 1000.0, 1.0, 3)?;
    let psd = welch_psd(&noise, &spec)?;
    println!("pink noise: log-log slope over 2..200 Hz = {:.3}", psd.loglog_slope(2.0, 200.0).unwrap_or(f64::NAN));
    // Power below the first bin (1/f down to 1/duration) is not resolved.
    println!("pink noise: integrated PSD {:.4} of sample power 1", psd.integral());

    let x = synth_pac(&SynthesisSpec::benchmark(2, 5)?)?.composite;
    let psd = welch_psd(&x, &spec)?;
    println!(
        "benchmark (12, 45): {} segments of {} samples, resolution {:.3} Hz",
        spec.segments(x.len()),
        spec.effective_window(x.len()),
        psd.resolution()
    );
    for f in [10.0, 12.0, 14.0, 40.0, 45.0, 50.0] {
        println!("  PSD at {f:4.1} Hz: {:10.3}", psd.value_at(f));
    }
    Ok(())
}

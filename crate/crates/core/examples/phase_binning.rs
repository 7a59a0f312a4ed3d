//! Amplitude distribution over slow-phase bins and its modulation index.

use std::f64::consts::PI;

use pac_lab::measures::{bin_amplitude_by_phase, max_entropy, modulation_index};

fn main() -> pac_lab::Result<()> {
    let phase: Vec<f64> = (0..18_000).map(|k| -PI + 2.0 * PI * (k as f64 + 0.5) / 18_000.0).collect();
    for depth in [0.0, 0.25, 0.5, 1.0] {
        let amp: Vec<f64> = phase.iter().map(|p| 1.0 + depth * p.cos()).collect();
        let dist = bin_amplitude_by_phase(&phase, &amp, 18)?;
        // 5 marks a bin at the uniform level 1/18.
        let bars: String =
            dist.bin_means.iter().map(|p| char::from(b'0' + (p * 18.0 * 5.0).round().clamp(0.0, 9.0) as u8)).collect();
        println!("depth {depth:4.2}: index {:.5}  bins {bars}", modulation_index(&dist));
    }
    println!("entropy bound for 18 bins: {:.4} nats", max_entropy(18));
    Ok(())
}

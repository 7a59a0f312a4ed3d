//! Every coupling measure at the true cell and at an uncoupled cell.

use pac_lab::measures::{evaluate_or_zero, DirectBands, MeasureConfig, Method};
use pac_lab::synthesis::{synth_pac, SynthesisSpec};

fn main() -> pac_lab::Result<()> {
    let cfg = MeasureConfig::default();
    let noisy = synth_pac(&SynthesisSpec::new(12.0, 45.0).with_noise_power(0.5).with_seed(9))?.composite;
    let bands = DirectBands(&noisy);
    println!("12 Hz -> 45 Hz coupling, pink noise power 0.5");
    println!("  method   (12, 45)   (5, 30)");
    for method in Method::ALL {
        let hit = evaluate_or_zero(&bands, method, 12.0, 45.0, &cfg)?;
        let miss = evaluate_or_zero(&bands, method, 5.0, 30.0, &cfg)?;
        println!("  {:<6} {:10.4} {:9.4}", method.as_str(), hit, miss);
    }
    Ok(())
}

//! Constant-bandwidth Gabor versus proportional Morlet band-passes, and the
//! three-band triplet that reassembles a modulated carrier.

use std::f64::consts::PI;

use pac_lab::filters::{gabor_kernel, morlet_kernel, triplet_analytic, FilterSpec};
use pac_lab::signal::amplitude;
use pac_lab::Signal;

fn main() -> pac_lab::Result<()> {
    let fs = 1000.0;
    let gabor = gabor_kernel(&FilterSpec::constant(45.0, 1.0), fs)?;
    let morlet = morlet_kernel(&FilterSpec::proportional(45.0, 4.0), fs)?;
    println!("gain around 45 Hz");
    println!("  f (Hz)    gabor 1 Hz   morlet 4 cycles");
    for f in [37.0, 40.0, 44.0, 44.5, 45.0, 45.5, 46.0, 50.0, 53.0] {
        println!("{f:8.1} {:12.2e} {:16.2e}", gabor.response(f).norm(), morlet.response(f).norm() / 2.0);
    }
    println!("kernel lengths: gabor {} taps, morlet {} taps", gabor.len(), morlet.len());

    let x = Signal::from_fn(10_000, fs, |t| (0.5 + 0.25 * (2.0 * PI * 8.0 * t).sin()) * (2.0 * PI * 45.0 * t).cos())?;
    let env = amplitude(&triplet_analytic(&x, 8.0, 45.0, 1.0)?);
    println!("\ntriplet envelope around 45 Hz with 8 Hz modulation (expect 1 + 0.25 sin 2π8t)");
    for k in (5000..5125).step_by(25) {
        let expected = 1.0 + 0.25 * (2.0 * PI * 8.0 * x.time(k)).sin();
        println!("  t = {:.3}  envelope {:.4}  expected {:.4}", x.time(k), env.samples()[k], expected);
    }
    Ok(())
}

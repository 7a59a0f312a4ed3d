//! Envelope and instantaneous frequency of an amplitude-modulated tone.

use std::f64::consts::PI;

use pac_lab::signal::{amplitude, analytic, instantaneous_frequency};
use pac_lab::Signal;

fn main() -> pac_lab::Result<()> {
    let fs = 1000.0;
    let x = Signal::from_fn(4000, fs, |t| (1.0 + 0.5 * (2.0 * PI * 3.0 * t).sin()) * (2.0 * PI * 40.0 * t).cos())?;
    let z = analytic(&x)?;
    let env = amplitude(&z);
    let freq = instantaneous_frequency(&z)?;

    println!("     t     signal   envelope   inst. freq");
    for k in (1000..=1300).step_by(50) {
        println!("{:6.3} {:10.4} {:10.4} {:12.3}", x.time(k), x.samples()[k], env.samples()[k], freq.samples()[k]);
    }
    Ok(())
}

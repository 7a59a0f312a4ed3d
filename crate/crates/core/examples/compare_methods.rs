//! Seed-averaged localization error of each method on the noisy benchmark.
//!
//! `cargo run --release --example compare_methods -- [seeds]`

use pac_lab::comodulogram::{compare, CompareSpec};
use pac_lab::measures::Method;

fn main() -> pac_lab::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let spec = CompareSpec::benchmark(vec![Method::Mca, Method::Eps, Method::Mvl, Method::Cv], (1..=seeds).collect());
    let report = compare(&spec)?;
    println!("pair       method  mean err  within 1 Hz");
    for s in &report.summary {
        println!(
            "({:>2}, {:>2})   {:<6} {:9.1} {:6}/{}",
            s.pair.0,
            s.pair.1,
            s.method.as_str(),
            s.mean_error,
            s.within_one_hz,
            s.runs
        );
    }
    Ok(())
}

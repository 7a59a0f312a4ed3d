use pac_lab::measures::{self, DirectBands, MeasureConfig, Method};
use pac_lab::spectral::{self, WelchSpec};
use pac_lab::synthesis::{pink_noise, synth_pac, SynthesisSpec};
use pac_lab::Signal;
use proptest::prelude::*;

fn coupled(m: f64, n: f64, ami: f64, noise: f64, seed: u64) -> Signal {
    let spec = SynthesisSpec::new(m, n).with_ami(ami).with_duration(6.0).with_noise_power(noise).with_seed(seed);
    synth_pac(&spec).unwrap().composite
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn measures_stay_in_range(
        m in 2u32..15,
        gap in 3u32..30,
        ami in 0.0f64..0.5,
        noise in 0.0f64..3.0,
        seed in any::<u64>(),
    ) {
        let (m, n) = (f64::from(m), f64::from(m + gap));
        let x = coupled(m, n, ami, noise, seed);
        let cfg = MeasureConfig::default();
        for method in Method::ALL {
            let v = measures::evaluate_or_zero(&DirectBands(&x), method, m, n, &cfg).unwrap();
            prop_assert!(v.is_finite() && v >= 0.0, "{method}: {v}");
            if method != Method::Mvl {
                prop_assert!(v <= 1.0, "{method}: {v}");
            }
        }
    }

    #[test]
    fn plv_is_a_modulus(u in prop::collection::vec(-10.0f64..10.0, 1..200), shift in -5.0f64..5.0) {
        let v: Vec<f64> = u.iter().map(|p| p * 0.5 + shift).collect();
        let r = measures::plv(&u, &v).unwrap();
        prop_assert!((0.0..=1.0).contains(&r));
    }

    #[test]
    fn binning_is_a_distribution(
        phase in prop::collection::vec(-3.2f64..3.2, 10..400),
        bins in 2usize..60,
    ) {
        let amp: Vec<f64> = phase.iter().map(|p| 1.5 + p.sin()).collect();
        let d = measures::bin_amplitude_by_phase(&phase, &amp, bins).unwrap();
        prop_assert!((d.bin_means.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert_eq!(d.bin_counts.iter().sum::<usize>(), phase.len());
        let k = measures::modulation_index(&d);
        prop_assert!((0.0..=1.0).contains(&k));
    }

    #[test]
    fn coherence_is_bounded(seed_a in any::<u64>(), seed_b in any::<u64>()) {
        let a = pink_noise(4096, 500.0, 1.0, seed_a).unwrap();
        let b = pink_noise(4096, 500.0, 1.0, seed_b).unwrap();
        let c = spectral::coherence(&a, &b, &WelchSpec::new(256, 0.5)).unwrap();
        prop_assert!(c.values.iter().all(|v| (0.0..=1.0 + 1e-12).contains(v)));
    }
}

#[test]
fn scale_invariance() {
    let c = 3.7;
    let cfg = MeasureConfig::default();
    let x = coupled(12.0, 45.0, 0.25, 2.0, 11);
    let y = x.scaled(c).unwrap();
    for method in [Method::Mca, Method::Eps, Method::Kld, Method::Cv] {
        let a = measures::evaluate(&DirectBands(&x), method, 12.0, 45.0, &cfg).unwrap();
        let b = measures::evaluate(&DirectBands(&y), method, 12.0, 45.0, &cfg).unwrap();
        assert!((a - b).abs() < 1e-6, "{method}: {a} vs {b}");
    }
    let a = measures::mvl(&x, 12.0, 45.0, &cfg).unwrap();
    let b = measures::mvl(&y, 12.0, 45.0, &cfg).unwrap();
    assert!((b / a - c).abs() < 1e-9);
}

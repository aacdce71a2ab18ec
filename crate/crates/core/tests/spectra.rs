use nvprobe::coupling::u_exotic_factor;
use nvprobe::exclusion::alpha_from_g;
use nvprobe::spectrum::{height_vs_g, peak_report, spectrum_scan, SidebandScan};
use nvprobe::susceptibility::SusceptibilityInputs;
use nvprobe::{default_config, PhysicalConstants};

fn inputs(g: f64) -> SusceptibilityInputs {
    SusceptibilityInputs::from_config(&default_config(), g)
}

#[test]
fn uncoupled_spectrum_is_a_straight_line() {
    for center in [-2e6, 2e6] {
        let s = spectrum_scan(&inputs(0.0), (center - 50.0, center + 50.0), 1001).unwrap();
        let first = s.points[0].absorption;
        let last = s.points[1000].absorption;
        let mean = s.points.iter().map(|p| p.absorption).sum::<f64>() / 1001.0;
        let worst = s
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.absorption - (first + (last - first) * i as f64 / 1000.0)).abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-8 * mean.abs(), "{worst:e}");
        // the Υ₂²/δ² background still tilts by ~1e-4 across the window
        let range = (first - last).abs() / mean.abs();
        assert!(range > 1e-5 && range < 1e-3, "{range:e}");
    }
}

#[test]
fn sideband_peaks_have_opposite_signs_and_equal_size() {
    let scan = SidebandScan::default();
    let samples = height_vs_g(&inputs(0.0), &[0.5, 1.0], scan).unwrap();
    for s in &samples {
        assert_eq!(s.positive.center, 2e6);
        assert_eq!(s.negative.center, -2e6);
        assert!(s.positive.height > 0.0 && s.negative.height < 0.0);
        let ratio = s.positive.height.abs() / s.negative.height.abs();
        assert!((ratio - 1.0).abs() < 1e-2, "{ratio}");
    }
    assert!(samples[1].positive.height > samples[0].positive.height);
}

#[test]
fn heights_keep_growing_with_coupling() {
    let grid = [0.3, 1.0, 10.0, 100.0, 1000.0];
    let samples = height_vs_g(&inputs(0.0), &grid, SidebandScan::default()).unwrap();
    for w in samples.windows(2) {
        assert!(w[1].positive.height > w[0].positive.height);
        assert!(w[1].negative.height.abs() > w[0].negative.height.abs());
    }
}

#[test]
fn peak_is_a_resonator_lorentzian() {
    let s = spectrum_scan(&inputs(1.0), (2e6 - 50.0, 2e6 + 50.0), 1001).unwrap();
    let base = spectrum_scan(&inputs(0.0), (2e6 - 50.0, 2e6 + 50.0), 1001).unwrap();
    let rep = peak_report(&s, 2e6).unwrap();
    // half maximum one γ_n/2 away from the center
    let at = |delta: f64| {
        let i = ((delta - (2e6 - 50.0)) / 0.1).round() as usize;
        s.points[i].absorption - base.points[i].absorption
    };
    assert!((at(2e6 + 1.0) / at(2e6) - 0.5).abs() < 1e-3);
    // the background fit soaks up the Lorentzian tails in the outer bands (~1e-3)
    assert!((rep.height / at(2e6) - 1.0).abs() < 2e-3);
}

#[test]
fn short_and_mid_range_curves_differ_by_a_constant_factor() {
    let (cfg, k) = (default_config(), PhysicalConstants::default());
    let ratios: Vec<f64> = [0.01, 0.3, 10.0, 1e3]
        .iter()
        .map(|&g| alpha_from_g(g, 1e-6, &cfg, &k).unwrap() / alpha_from_g(g, 1e-4, &cfg, &k).unwrap())
        .collect();
    let expected = (1e-4 * u_exotic_factor(1e-4, &cfg).unwrap()) / (1e-6 * u_exotic_factor(1e-6, &cfg).unwrap());
    for r in &ratios {
        assert!((r / expected - 1.0).abs() < 1e-12);
    }
    // about two percent apart: λ·u1 is still 2% short of its plateau at 1 µm
    assert!(expected > 1.015 && expected < 1.03, "{expected}");
}

fn outer_band_departure(g: f64) -> f64 {
    let mut worst = 0.0f64;
    for c in [-2e6, 2e6] {
        let s = spectrum_scan(&inputs(g), (c - 50.0, c + 50.0), 1001).unwrap();
        let base = spectrum_scan(&inputs(0.0), (c - 50.0, c + 50.0), 1001).unwrap();
        for (p, b) in s.points.iter().zip(&base.points).filter(|(p, _)| (p.delta - c).abs() >= 40.0) {
            worst = worst.max(((p.absorption - b.absorption) / b.absorption).abs());
        }
    }
    worst
}

#[test]
fn away_from_the_peaks_the_uncoupled_spectrum_returns() {
    for g in [0.3, 0.5, 1.0] {
        let d = outer_band_departure(g);
        assert!(d < 1e-6, "g = {g}: {d:e}");
    }
    // the Lorentzian tail grows as g² and reaches the 1e-6 level near g ~ 4
    assert!(outer_band_departure(100.0) > 1e-6);
}

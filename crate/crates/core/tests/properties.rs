use nvprobe::coupling::{coupling_g, zero_point_amplitude, AxialCoupling};
use nvprobe::exclusion::{alpha_from_g, exclusion_bound, g_from_alpha, ThresholdSpec};
use nvprobe::oracles::linear::linear_system_chi;
use nvprobe::susceptibility::{inversion_residual, inversion_roots, population_inversion, chi_bracket, SusceptibilityInputs};
use nvprobe::{default_config, PhysicalConstants};
use proptest::prelude::*;

fn inputs() -> impl Strategy<Value = SusceptibilityInputs> {
    (0.0..2e3f64, -3e3..3e3f64, 1.0..3e3f64, 10.0..3e3f64, 1e3..1e7f64, 1e-2..1e3f64).prop_map(
        |(g, delta_s, pump_rabi, upsilon2, omega_r, gamma_n)| SusceptibilityInputs {
            g,
            delta_s,
            pump_rabi,
            upsilon2,
            omega_r,
            gamma_n,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inversion_is_a_root_in_the_physical_interval(inp in inputs()) {
        let w = population_inversion(&inp).unwrap();
        prop_assert!((-1.0..=0.0).contains(&w));
        let scale = (inp.upsilon2 * inp.upsilon2 + inp.delta_s * inp.delta_s + 2.0 * inp.pump_rabi * inp.pump_rabi)
            * (1.0 + inp.pull() * inp.pull());
        prop_assert!(inversion_residual(w, &inp).abs() < 1e-12 * scale);
        prop_assert!(inversion_roots(&inp).iter().any(|&r| r == w));
    }

    #[test]
    fn closed_form_matches_linear_solve(inp in inputs(), x in -1.5..1.5f64) {
        let delta = x * inp.omega_r;
        if let (Ok(a), Ok(b)) = (chi_bracket(delta, &inp), linear_system_chi(delta, &inp)) {
            prop_assert!((a - b).norm() <= 1e-8 * b.norm(), "{a} vs {b}");
        }
    }

    #[test]
    fn coupling_chain_is_consistent(
        radius in 1e-7..2e-6f64,
        gap in 1e-8..5e-7f64,
        thickness in 1e-8..2e-7f64,
        mass in 1e-17..1e-13f64,
        omega_r in 1e4..1e8f64,
        alpha in 0.0..1e-12f64,
        lambda in 1e-9..1e-2f64,
    ) {
        let k = PhysicalConstants::default();
        let mut cfg = default_config();
        cfg.radius = radius;
        cfg.gap = gap;
        cfg.thickness = thickness;
        cfg.mass = mass;
        cfg.omega_r = omega_r;
        let r = coupling_g(&AxialCoupling::new(alpha, lambda).unwrap(), &cfg, &k).unwrap();
        // g = g_s μ_B G_m a₀ / ħ
        let chain = k.g_s * k.mu_b * r.gradient * zero_point_amplitude(&cfg, &k) / k.hbar;
        prop_assert!((r.g - chain).abs() <= 1e-13 * chain.max(1e-300));
        prop_assert!(r.u1 <= 0.0);
        prop_assert!(r.u2 > 0.0);
    }

    #[test]
    fn linear_inversion_round_trips(log_lambda in -9.0..-1.0f64, log_g in -2.0..4.0f64) {
        let (cfg, k) = (default_config(), PhysicalConstants::default());
        let lambda = 10f64.powf(log_lambda);
        let g = 10f64.powf(log_g);
        let alpha = alpha_from_g(g, lambda, &cfg, &k).unwrap();
        let back = g_from_alpha(&AxialCoupling::new(alpha, lambda).unwrap(), &cfg, &k).unwrap();
        prop_assert!((back - g).abs() <= 1e-12 * g);
    }

    #[test]
    fn bound_is_positive_and_reaches_threshold(log_lambda in -9.5..-1.0f64, g_c in 0.01..10.0f64) {
        let (cfg, k) = (default_config(), PhysicalConstants::default());
        let lambda = 10f64.powf(log_lambda);
        let t = ThresholdSpec::new(g_c).unwrap();
        let b = exclusion_bound(lambda, &t, &cfg, &k).unwrap();
        prop_assert!(b > 0.0 && b.is_finite());
        let g = coupling_g(&AxialCoupling::new(b, lambda).unwrap(), &cfg, &k).unwrap().g;
        prop_assert!(g >= g_c - 1e-9);
    }
}

//! Field gradient of the polarized cylinder and the resulting spin–phonon coupling.
//!
//! The NV center sits on the cylinder axis at distance `gap` below the near
//! face. The kernel `u` is the derivative of the on-axis field integral with
//! respect to that distance, per unit `ρ·P`; it is affine in the axial-vector
//! coupling constant:
//!
//! ```text
//! u = (R²/4)·μ₀νħ·u2 + α·(4πλc/ν)·u1
//! ```

use std::f64::consts::PI;

use crate::error::{ensure_positive, Error, Result};
use crate::params::{exp_flushed, ExperimentConfig, PhysicalConstants};

/// Dimensionless axial-vector coupling constant `g_A^e g_A^e / 4πħc` at range `lambda` (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxialCoupling {
    pub alpha: f64,
    pub lambda: f64,
}

impl AxialCoupling {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        ensure_positive("lambda", lambda)?;
        if !alpha.is_finite() {
            return Err(Error::Domain {
                name: "alpha",
                value: alpha,
                reason: "must be finite",
            });
        }
        Ok(Self { alpha, lambda })
    }

    /// Pure magnetic dipole–dipole case.
    pub fn none() -> Self {
        Self {
            alpha: 0.0,
            lambda: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingResult {
    /// Exotic geometric factor (dimensionless).
    pub u1: f64,
    /// Magnetic geometric factor, m⁻³.
    pub u2: f64,
    /// Signed kernel, T·m.
    pub u: f64,
    /// Field gradient magnitude ρ·P·|u|, T/m.
    pub gradient: f64,
    /// Zero-point amplitude √(ħ/2mω_r), m.
    pub a0: f64,
    /// Spin–phonon coupling, rad/s.
    pub g: f64,
}

/// Effective field of one polarized electron at distance `r` and polar angle `angle`.
pub fn b_eff_point(
    r: f64,
    angle: f64,
    coupling: &AxialCoupling,
    consts: &PhysicalConstants,
) -> Result<f64> {
    ensure_positive("r", r)?;
    let cos = angle.cos();
    let magnetic = -consts.mu0 * consts.nu * consts.hbar * (3.0 * cos * cos - 1.0) / (8.0 * PI * r.powi(3));
    let exotic = if coupling.alpha == 0.0 {
        0.0
    } else {
        coupling.alpha * (2.0 * consts.c / consts.nu) * exp_flushed(-r / coupling.lambda) / r
    };
    Ok(magnetic + exotic)
}

/// Magnetic geometric factor `u2` (m⁻³) and the magnetic part of `u` (T·m).
pub fn u_magnetic(config: &ExperimentConfig, consts: &PhysicalConstants) -> (f64, f64) {
    let r2 = config.radius * config.radius;
    let near = config.gap;
    let far = config.gap + config.thickness;
    let u2 = 1.0 / (r2 + near * near).powf(1.5) - 1.0 / (r2 + far * far).powf(1.5);
    let part = r2 / 4.0 * consts.mu0 * consts.nu * consts.hbar * u2;
    (u2, part)
}

/// Exotic geometric factor
/// `u1 = e^{-√(R²+d²)/λ} + e^{-(d+h)/λ} - e^{-√(R²+(d+h)²)/λ} - e^{-d/λ}`.
///
/// The four exponentials are combined pairwise through `exp_m1` so that the
/// large-λ cancellation keeps full relative precision.
pub fn u_exotic_factor(lambda: f64, config: &ExperimentConfig) -> Result<f64> {
    ensure_positive("lambda", lambda)?;
    let r2 = config.radius * config.radius;
    let d = config.gap;
    let dh = config.gap + config.thickness;
    let rim_near = (r2 + d * d).sqrt();
    let rim_far = (r2 + dh * dh).sqrt();

    // e^{-a/λ} - e^{-b/λ} with a < b
    let pair = |a: f64, b: f64| -> f64 {
        let lead = exp_flushed(-a / lambda);
        if lead == 0.0 {
            return 0.0;
        }
        if -b / lambda < crate::params::EXP_UNDERFLOW_ARG {
            return lead;
        }
        -lead * (-(b - a) / lambda).exp_m1()
    };
    // (e^{-rim_near} - e^{-d}) + (e^{-dh} - e^{-rim_far}); d < rim_near and dh < rim_far
    Ok(-pair(d, rim_near) + pair(dh, rim_far))
}

/// Total signed kernel `u` (T·m).
pub fn u_total(coupling: &AxialCoupling, config: &ExperimentConfig, consts: &PhysicalConstants) -> Result<f64> {
    let (_, magnetic) = u_magnetic(config, consts);
    if coupling.alpha == 0.0 {
        return Ok(magnetic);
    }
    let u1 = u_exotic_factor(coupling.lambda, config)?;
    Ok(magnetic + coupling.alpha * exotic_slope(coupling.lambda, u1, consts))
}

/// ∂u/∂α at fixed λ: `(4πλc/ν)·u1`.
pub fn exotic_slope(lambda: f64, u1: f64, consts: &PhysicalConstants) -> f64 {
    4.0 * PI * lambda * consts.c / consts.nu * u1
}

/// Zero-point amplitude √(ħ/2mω_r).
pub fn zero_point_amplitude(config: &ExperimentConfig, consts: &PhysicalConstants) -> f64 {
    (consts.hbar / (2.0 * config.mass * config.omega_r)).sqrt()
}

/// Spin–phonon coupling `g = P·g_s·μ_B·ρ·|u| / √(2mω_rħ)` with all intermediate pieces.
pub fn coupling_g(
    coupling: &AxialCoupling,
    config: &ExperimentConfig,
    consts: &PhysicalConstants,
) -> Result<CouplingResult> {
    ensure_positive("lambda", coupling.lambda)?;
    let (u2, magnetic) = u_magnetic(config, consts);
    let u1 = u_exotic_factor(coupling.lambda, config)?;
    let u = if coupling.alpha == 0.0 {
        magnetic
    } else {
        magnetic + coupling.alpha * exotic_slope(coupling.lambda, u1, consts)
    };
    let abs_u = u.abs();
    let g = config.polarization * consts.g_s * consts.mu_b * config.spin_density * abs_u
        / (2.0 * config.mass * config.omega_r * consts.hbar).sqrt();
    Ok(CouplingResult {
        u1,
        u2,
        u,
        gradient: config.spin_density * config.polarization * abs_u,
        a0: zero_point_amplitude(config, consts),
        g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::default_config;

    fn setup() -> (ExperimentConfig, PhysicalConstants) {
        (default_config(), PhysicalConstants::default())
    }

    #[test]
    fn magic_angle_zero() {
        let (_, k) = setup();
        let angle = (1.0f64 / 3.0).sqrt().acos();
        let b = b_eff_point(1e-7, angle, &AxialCoupling::none(), &k).unwrap();
        let scale = b_eff_point(1e-7, 0.0, &AxialCoupling::none(), &k).unwrap();
        assert!((b / scale).abs() < 1e-14, "{b:e}");
    }

    #[test]
    fn on_axis_magnetic_point_field() {
        let (_, k) = setup();
        let r = 8e-8;
        let b = b_eff_point(r, 0.0, &AxialCoupling::none(), &k).unwrap();
        let expected = -k.mu0 * k.nu * k.hbar / (4.0 * PI * r * r * r);
        assert!(((b - expected) / expected).abs() < 1e-14);
        assert!(b_eff_point(0.0, 0.0, &AxialCoupling::none(), &k).is_err());
    }

    #[test]
    fn exotic_point_field_term_by_term() {
        let (_, k) = setup();
        let r = 8e-8;
        let c = AxialCoupling::new(1e-30, 1e-7).unwrap();
        let b = b_eff_point(r, 0.0, &c, &k).unwrap();
        let magnetic = -(1.256_637_062_12e-6 * k.nu * 1.054_571_817e-34) * 2.0 / (8.0 * PI * r.powi(3));
        let exotic = 1e-30 * 2.0 * 299_792_458.0 / k.nu * (-0.8f64).exp() / r;
        let expected = magnetic + exotic;
        assert!(((b - expected) / expected).abs() < 1e-13);
    }

    #[test]
    fn u2_signs() {
        let (mut cfg, k) = setup();
        let (u2, part) = u_magnetic(&cfg, &k);
        assert!(u2 > 0.0 && part > 0.0);
        // independent evaluation with arbitrary-precision arithmetic
        assert!((u2 / 4.500_220_044_801_590e17 - 1.0).abs() < 1e-13, "{u2:e}");
        cfg.thickness = 0.0;
        assert_eq!(u_magnetic(&cfg, &k).0, 0.0);
    }

    #[test]
    fn u2_is_derivative_of_on_axis_integral() {
        let (cfg, k) = setup();
        // closed-form on-axis magnetic field of a uniformly polarized cylinder, per ρP
        let field = |d: f64| {
            let r2 = cfg.radius * cfg.radius;
            let h = cfg.thickness;
            -(k.mu0 * k.nu * k.hbar / 4.0) * ((d + h) / (r2 + (d + h) * (d + h)).sqrt() - d / (r2 + d * d).sqrt())
        };
        let step = cfg.gap * 1e-4;
        let fd = (field(cfg.gap + step) - field(cfg.gap - step)) / (2.0 * step);
        let (_, part) = u_magnetic(&cfg, &k);
        assert!(((fd - part) / part).abs() < 1e-6, "{fd:e} vs {part:e}");
    }

    #[test]
    fn u1_reference_values() {
        let (cfg, _) = setup();
        assert_eq!(u_exotic_factor(1e-12, &cfg).unwrap(), 0.0);
        assert!(u_exotic_factor(1e-1, &cfg).unwrap().abs() < 1e-5);
        let u1 = u_exotic_factor(1e-7, &cfg).unwrap();
        assert!((u1 + 0.176).abs() < 1e-3);
        assert!((u1 / -0.176_180_389_211_636_53 - 1.0).abs() < 1e-13, "{u1}");
        assert!(u_exotic_factor(0.0, &cfg).is_err());
        assert!(u_exotic_factor(-1.0, &cfg).is_err());
    }

    #[test]
    fn u1_matches_four_term_sum() {
        let (cfg, _) = setup();
        let direct = |l: f64| {
            let r2 = cfg.radius * cfg.radius;
            let d = cfg.gap;
            let dh = d + cfg.thickness;
            (-(r2 + d * d).sqrt() / l).exp() + (-dh / l).exp() - (-(r2 + dh * dh).sqrt() / l).exp() - (-d / l).exp()
        };
        for l in [3e-9, 1e-8, 5e-8, 1e-7, 1e-6, 1e-5] {
            let a = u_exotic_factor(l, &cfg).unwrap();
            let b = direct(l);
            assert!(((a - b) / b).abs() < 1e-9, "lambda {l}: {a:e} vs {b:e}");
        }
    }

    #[test]
    fn u_total_is_affine_in_alpha() {
        let (cfg, k) = setup();
        let at = |alpha| u_total(&AxialCoupling::new(alpha, 1e-7).unwrap(), &cfg, &k).unwrap();
        let (_, magnetic) = u_magnetic(&cfg, &k);
        assert_eq!(at(0.0), magnetic);
        let a = 3e-14;
        let lhs = at(2.0 * a) - at(0.0);
        let rhs = 2.0 * (at(a) - at(0.0));
        assert!(((lhs - rhs) / rhs).abs() < 1e-12);
        let slope = exotic_slope(1e-7, u_exotic_factor(1e-7, &cfg).unwrap(), &k);
        assert!((((at(a) - at(0.0)) / a - slope) / slope).abs() < 1e-9);
    }

    #[test]
    fn coupling_matches_gradient_chain() {
        let (cfg, k) = setup();
        let res = coupling_g(&AxialCoupling::none(), &cfg, &k).unwrap();
        // a0 -> G_m -> g = g_s μ_B G_m a0 / ħ
        let a0 = (k.hbar / (2.0 * cfg.mass * cfg.omega_r)).sqrt();
        let gm = cfg.spin_density * cfg.polarization * res.u.abs();
        let g = k.g_s * k.mu_b * gm * a0 / k.hbar;
        assert!(((res.g - g) / g).abs() < 1e-12);
        assert!((res.a0 - a0).abs() / a0 < 1e-15);
        assert!((res.gradient - gm).abs() / gm < 1e-15);
        assert!((res.g / 3.030_330_726_526_846e-3 - 1.0).abs() < 1e-12, "{}", res.g);
    }

    #[test]
    fn coupling_zero_density_and_evenness() {
        let (mut cfg, k) = setup();
        let (_, magnetic) = u_magnetic(&cfg, &k);
        let slope = exotic_slope(1e-7, u_exotic_factor(1e-7, &cfg).unwrap(), &k);
        // alpha that flips u to -u
        let alpha = -2.0 * magnetic / slope;
        let pos = coupling_g(&AxialCoupling::none(), &cfg, &k).unwrap();
        let neg = coupling_g(&AxialCoupling::new(alpha, 1e-7).unwrap(), &cfg, &k).unwrap();
        assert!(neg.u < 0.0);
        assert!(((pos.g - neg.g) / pos.g).abs() < 1e-12);

        cfg.spin_density = 0.0;
        let zero = coupling_g(&AxialCoupling::none(), &cfg, &k).unwrap();
        assert_eq!(zero.g, 0.0);
    }
}

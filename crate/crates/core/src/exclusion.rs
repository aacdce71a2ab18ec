//! Upper bounds on the axial-vector coupling constant from a detectability
//! threshold on the spin–phonon coupling.
//!
//! With the signed kernel `u = M + α·S` (magnetic part `M > 0`, exotic slope
//! `S = 4πλc·u1/ν < 0`) the linear coupling is `g = −K·u`, `K = P·g_s·μ_B·ρ/√(2mω_rħ)`.
//! Requiring `g ≥ g_c` and solving for α gives the bound.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::coupling::{coupling_g, exotic_slope, u_exotic_factor, u_magnetic, AxialCoupling};
use crate::error::{ensure_positive, Error, Result};
use crate::params::{boson_mass_from_range, ExperimentConfig, PhysicalConstants};

pub const LAMBDA_MIN: f64 = 1e-10;
pub const LAMBDA_MAX: f64 = 1e-1;
/// Smallest coupling for which the linear inversion is used.
pub const G_MIN: f64 = 1e-2;
pub const DEFAULT_GRID_POINTS: usize = 181;
/// Relative disagreement above which the validation report flags a point.
pub const VALIDATION_RELATIVE: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdSpec {
    /// Minimum identifiable coupling, rad/s.
    pub g_c: f64,
}

impl ThresholdSpec {
    pub fn new(g_c: f64) -> Result<Self> {
        ensure_positive("g_c", g_c)?;
        Ok(Self { g_c })
    }
}

impl Default for ThresholdSpec {
    fn default() -> Self {
        Self { g_c: 0.3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExclusionPoint {
    pub lambda: f64,
    pub boson_mass_ev: f64,
    /// +∞ where `u1` underflows to zero.
    pub alpha_bound: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(LAMBDA_MIN..=LAMBDA_MAX).contains(&lambda) {
        return Err(Error::Domain {
            name: "lambda",
            value: lambda,
            reason: "must lie in [1e-10, 1e-1] m",
        });
    }
    Ok(())
}

/// `K = P·g_s·μ_B·ρ / √(2mω_rħ)`, rad/s per T·m.
fn kernel_gain(config: &ExperimentConfig, consts: &PhysicalConstants) -> f64 {
    config.polarization * consts.g_s * consts.mu_b * config.spin_density
        / (2.0 * config.mass * config.omega_r * consts.hbar).sqrt()
}

fn negative_u1(lambda: f64, config: &ExperimentConfig) -> Result<f64> {
    let u1 = u_exotic_factor(lambda, config)?;
    if !(u1 < 0.0) {
        return Err(Error::SignDomain { lambda, u1 });
    }
    Ok(u1)
}

/// Signed linear coupling `g = −K·(M + α·S)`; negative values are rejected.
pub fn g_from_alpha(coupling: &AxialCoupling, config: &ExperimentConfig, consts: &PhysicalConstants) -> Result<f64> {
    ensure_positive("lambda", coupling.lambda)?;
    let (_, magnetic) = u_magnetic(config, consts);
    let u1 = u_exotic_factor(coupling.lambda, config)?;
    let k = kernel_gain(config, consts);
    let g = -k * exotic_slope(coupling.lambda, u1, consts) * coupling.alpha - k * magnetic;
    if g < 0.0 {
        return Err(Error::Regime { g });
    }
    Ok(g)
}

/// Inverse of [`g_from_alpha`] at fixed λ.
pub fn alpha_from_g(g: f64, lambda: f64, config: &ExperimentConfig, consts: &PhysicalConstants) -> Result<f64> {
    check_lambda(lambda)?;
    if !(g >= G_MIN && g.is_finite()) {
        return Err(Error::Domain {
            name: "g",
            value: g,
            reason: "the linear inversion assumes g >= 1e-2 rad/s",
        });
    }
    let u1 = negative_u1(lambda, config)?;
    let (u2, _) = u_magnetic(config, consts);
    let r2 = config.radius * config.radius;
    let sqrt_term = (2.0 * config.mass * config.omega_r * consts.hbar).sqrt();
    let spin = config.polarization * consts.g_s * consts.mu_b * config.spin_density;
    let first = -consts.nu * sqrt_term / (4.0 * PI * lambda * consts.c * spin * u1) * g;
    let second = -r2 * consts.mu0 * consts.nu * consts.nu * consts.hbar * u2 / (16.0 * PI * lambda * consts.c * u1);
    Ok(first + second)
}

/// Largest α compatible with `g < g_c`, written as the single closed expression.
pub fn exclusion_bound(
    lambda: f64,
    threshold: &ThresholdSpec,
    config: &ExperimentConfig,
    consts: &PhysicalConstants,
) -> Result<f64> {
    check_lambda(lambda)?;
    ensure_positive("g_c", threshold.g_c)?;
    let u1 = negative_u1(lambda, config)?;
    let (u2, _) = u_magnetic(config, consts);
    let r2 = config.radius * config.radius;
    let spin = config.polarization * consts.g_s * consts.mu_b * config.spin_density;
    let numerator = threshold.g_c * (2.0 * config.mass * config.omega_r * consts.hbar).sqrt() * consts.nu
        + spin * u2 * (r2 / 4.0) * consts.mu0 * consts.nu * consts.nu * consts.hbar;
    Ok(-numerator / (4.0 * PI * lambda * u1 * spin * consts.c))
}

/// `n` log-uniform ranges from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            let last = (n - 1) as f64;
            (0..n)
                .map(|i| match i {
                    0 => lo,
                    _ if i + 1 == n => hi,
                    _ => 10f64.powf(a + (b - a) * i as f64 / last),
                })
                .collect()
        }
    }
}

pub fn default_lambda_grid() -> Vec<f64> {
    log_grid(LAMBDA_MIN, LAMBDA_MAX, DEFAULT_GRID_POINTS)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    for w in grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Domain {
                name: "lambda_grid",
                value: w[1],
                reason: "must be strictly ascending",
            });
        }
    }
    grid.iter().try_for_each(|&l| check_lambda(l))
}

pub fn exclusion_curve(
    threshold: &ThresholdSpec,
    lambda_grid: &[f64],
    config: &ExperimentConfig,
    consts: &PhysicalConstants,
) -> Result<Vec<ExclusionPoint>> {
    check_grid(lambda_grid)?;
    lambda_grid
        .par_iter()
        .map(|&lambda| {
            let alpha_bound = match exclusion_bound(lambda, threshold, config, consts) {
                Err(Error::SignDomain { u1, .. }) if u1 == 0.0 => f64::INFINITY,
                other => other?,
            };
            Ok(ExclusionPoint {
                lambda,
                boson_mass_ev: boson_mass_from_range(lambda, consts)?.ev,
                alpha_bound,
            })
        })
        .collect()
}

pub fn to_csv(points: &[ExclusionPoint]) -> String {
    let mut out = String::from("lambda_m,mass_ev,alpha_upper\n");
    for p in points {
        out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", p.lambda, p.boson_mass_ev, p.alpha_bound));
    }
    out
}

/// Smallest α ≥ 0 at which the full `|u|`-based coupling reaches `g_c`, by bisection.
pub fn direct_inversion(
    lambda: f64,
    threshold: &ThresholdSpec,
    config: &ExperimentConfig,
    consts: &PhysicalConstants,
) -> Result<f64> {
    check_lambda(lambda)?;
    let u1 = negative_u1(lambda, config)?;
    let (_, magnetic) = u_magnetic(config, consts);
    let slope = exotic_slope(lambda, u1, consts);
    let g_at = |alpha: f64| -> Result<f64> { Ok(coupling_g(&AxialCoupling::new(alpha, lambda)?, config, consts)?.g) };

    // g vanishes where the exotic term cancels the magnetic one and grows beyond
    let mut lo = (-magnetic / slope).max(0.0);
    if g_at(lo)? >= threshold.g_c {
        return Ok(lo);
    }
    let mut hi = if lo > 0.0 { 2.0 * lo } else { f64::MIN_POSITIVE };
    while g_at(hi)? < threshold.g_c {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Domain {
                name: "alpha",
                value: hi,
                reason: "no finite coupling reaches the threshold",
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g_at(mid)? < threshold.g_c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationEntry {
    pub lambda: f64,
    pub closed_form: f64,
    pub direct: f64,
    pub relative_difference: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub g_c: f64,
    pub tolerance: f64,
    pub entries: Vec<ValidationEntry>,
    pub flagged: usize,
}

/// Compares the closed-form bound with the bisection inversion at every λ where `u1 < 0`.
pub fn validation_report(
    threshold: &ThresholdSpec,
    lambda_grid: &[f64],
    config: &ExperimentConfig,
    consts: &PhysicalConstants,
) -> Result<ValidationReport> {
    check_grid(lambda_grid)?;
    let entries: Vec<Option<ValidationEntry>> = lambda_grid
        .par_iter()
        .map(|&lambda| {
            let closed_form = match exclusion_bound(lambda, threshold, config, consts) {
                Err(Error::SignDomain { .. }) => return Ok(None),
                other => other?,
            };
            let direct = direct_inversion(lambda, threshold, config, consts)?;
            let relative_difference = ((closed_form - direct) / direct).abs();
            Ok(Some(ValidationEntry {
                lambda,
                closed_form,
                direct,
                relative_difference,
                flagged: !(relative_difference <= VALIDATION_RELATIVE),
            }))
        })
        .collect::<Result<_>>()?;
    let entries: Vec<ValidationEntry> = entries.into_iter().flatten().collect();
    let flagged = entries.iter().filter(|e| e.flagged).count();
    Ok(ValidationReport {
        g_c: threshold.g_c,
        tolerance: VALIDATION_RELATIVE,
        entries,
        flagged,
    })
}

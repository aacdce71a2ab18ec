//! Volume integral of the single-electron field over the polarized cylinder and
//! its finite-difference gradient.

use std::f64::consts::PI;

use serde::Serialize;

use super::quadrature::{integrate, QuadratureSpec};
use crate::coupling::{b_eff_point, u_total, AxialCoupling};
use crate::error::{ensure_positive, Result};
use crate::params::{ExperimentConfig, PhysicalConstants};

/// Relative finite-difference step in the distance.
pub const FD_RELATIVE_STEP: f64 = 1e-5;

/// On-axis field (T) at `distance` below the near face of the cylinder.
///
/// The cylinder is integrated in (axial, radial) coordinates with the 2πs
/// Jacobian; both one-dimensional integrals are adaptive.
pub fn field_integral(
    distance: f64,
    coupling: &AxialCoupling,
    config: &ExperimentConfig,
    consts: &PhysicalConstants,
    spec: &QuadratureSpec,
) -> Result<f64> {
    ensure_positive("distance", distance)?;
    ensure_positive("radius", config.radius)?;
    ensure_positive("lambda", coupling.lambda)?;
    let prefactor = config.spin_density * config.polarization;
    if prefactor == 0.0 {
        return Ok(0.0);
    }
    let radius = config.radius;
    let disc = |z: f64| -> Result<f64> {
        let ring = |s: f64| -> Result<f64> {
            let r = (s * s + z * z).sqrt();
            Ok(2.0 * PI * s * b_eff_point(r, (z / r).acos(), coupling, consts)?)
        };
        Ok(integrate(ring, 0.0, radius, spec)?.value)
    };
    let total = integrate(disc, distance, distance + config.thickness, spec)?;
    Ok(prefactor * total.value)
}

/// Closed form of the magnetic part of [`field_integral`] on the axis.
pub fn magnetic_field_closed_form(distance: f64, config: &ExperimentConfig, consts: &PhysicalConstants) -> f64 {
    let r2 = config.radius * config.radius;
    let far = distance + config.thickness;
    let bracket = far / (r2 + far * far).sqrt() - distance / (r2 + distance * distance).sqrt();
    -config.spin_density * config.polarization * consts.mu0 * consts.nu * consts.hbar / 4.0 * bracket
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientReport {
    /// ∂B/∂d from the quadrature, T/m.
    pub derivative: f64,
    /// |∂B/∂d|, T/m.
    pub gradient: f64,
    /// ρ·P·u from the closed-form kernel, T/m.
    pub closed_form: f64,
    pub relative_difference: f64,
}

/// Central difference of [`field_integral`] in the gap, Richardson-extrapolated
/// once, compared against the closed-form kernel.
pub fn gradient_oracle(
    coupling: &AxialCoupling,
    config: &ExperimentConfig,
    consts: &PhysicalConstants,
    spec: &QuadratureSpec,
) -> Result<GradientReport> {
    let d = config.gap;
    let h = d * FD_RELATIVE_STEP;
    let field = |x: f64| field_integral(x, coupling, config, consts, spec);
    let central = |step: f64| -> Result<f64> { Ok((field(d + step)? - field(d - step)?) / (2.0 * step)) };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    let derivative = (4.0 * fine - coarse) / 3.0;
    let closed_form = config.spin_density * config.polarization * u_total(coupling, config, consts)?;
    Ok(GradientReport {
        derivative,
        gradient: derivative.abs(),
        closed_form,
        relative_difference: ((derivative - closed_form) / derivative).abs(),
    })
}

//! Physical constants, unit helpers and the validated experiment configuration.
//!
//! Every rate or frequency stored here is an angular quantity in rad/s. The
//! nominal laboratory numbers ("2 MHz" resonator, "1 kHz" Rabi frequency, ...)
//! are used directly as the numeric values of those angular quantities.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// Elementary charge, used only to express energies in eV.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// One debye in C·m.
pub const DEBYE: f64 = 3.335_64e-30;

/// Arguments of `exp` below this value are treated as exact zeros.
pub const EXP_UNDERFLOW_ARG: f64 = -700.0;

/// `exp(x)` with the crate-wide underflow policy.
#[inline]
pub fn exp_flushed(x: f64) -> f64 {
    if x < EXP_UNDERFLOW_ARG {
        0.0
    } else {
        x.exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Speed of light, m/s.
    pub c: f64,
    /// Vacuum permeability, T·m/A.
    pub mu0: f64,
    /// Bohr magneton, A·m².
    pub mu_b: f64,
    /// Electron spin g-factor.
    pub g_s: f64,
    /// Electron gyromagnetic ratio g_s·μ_B/ħ, rad·s⁻¹·T⁻¹.
    pub nu: f64,
    /// C·m per debye.
    pub debye: f64,
    /// Boltzmann constant, J/K. Carried for completeness; thermal noise is not simulated.
    pub k_b: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, c: f64, mu0: f64, mu_b: f64, g_s: f64, debye: f64, k_b: f64) -> Self {
        Self {
            hbar,
            c,
            mu0,
            mu_b,
            g_s,
            nu: g_s * mu_b / hbar,
            debye,
            k_b,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("hbar", self.hbar)?;
        ensure_positive("c", self.c)?;
        ensure_positive("mu0", self.mu0)?;
        ensure_positive("mu_b", self.mu_b)?;
        ensure_positive("g_s", self.g_s)?;
        ensure_positive("nu", self.nu)?;
        ensure_positive("debye", self.debye)?;
        ensure_positive("k_b", self.k_b)?;
        let nu = self.g_s * self.mu_b / self.hbar;
        if ((self.nu - nu) / nu).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "nu = {:e} differs from g_s*mu_b/hbar = {:e}",
                self.nu, nu
            )));
        }
        Ok(())
    }
}

impl Default for PhysicalConstants {
    /// CODATA values for ħ, c, μ₀ and k_B; μ_B = 9.27e-24 A·m² and g_s = 2 as
    /// used by the reference parameter set.
    fn default() -> Self {
        Self::new(
            1.054_571_817e-34,
            299_792_458.0,
            1.256_637_062_12e-6,
            9.27e-24,
            2.0,
            DEBYE,
            1.380_649e-23,
        )
    }
}

/// Numerical settings consumed by the verification oracles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Numerics {
    pub quad_rel_tol: f64,
    /// Absolute quadrature tolerance on the field, T.
    pub quad_abs_tol: f64,
    pub quad_max_subdivisions: usize,
    /// Quality factor used by the time-domain oracle in place of `quality_factor`.
    pub td_quality_factor: f64,
    /// Spin–phonon coupling used by the time-domain oracle, rad/s.
    pub td_coupling: f64,
    /// Probe Rabi frequency over pump Rabi frequency.
    pub td_probe_ratio: f64,
    pub td_demod_cycles: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            quad_rel_tol: 1e-14,
            quad_abs_tol: 0.0,
            quad_max_subdivisions: 4000,
            td_quality_factor: 100.0,
            td_coupling: 50.0,
            td_probe_ratio: 1e-3,
            td_demod_cycles: 400,
        }
    }
}

/// Geometry, ensemble, resonator and drive parameters in SI units.
///
/// `upsilon1` and `gamma_n` are derived (`2·upsilon2` and `omega_r/Q`), so the
/// two relations hold by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Radius of the polarized cylinder, m.
    pub radius: f64,
    /// Gap between NV center and the near face of the cylinder, m.
    pub gap: f64,
    /// Crystal thickness (cylinder length), m.
    pub thickness: f64,
    /// Electron spin density, m⁻³.
    pub spin_density: f64,
    /// Ensemble polarization at the probing instant.
    pub polarization: f64,
    /// Resonator fundamental frequency, rad/s.
    pub omega_r: f64,
    pub quality_factor: f64,
    /// Resonator plus payload mass, kg.
    pub mass: f64,
    /// Spin dephasing rate, rad/s.
    pub upsilon2: f64,
    /// Spin–pump detuning, rad/s.
    pub delta_s: f64,
    /// Pump Rabi frequency, rad/s.
    pub pump_rabi: f64,
    /// Induced electric dipole moment, C·m.
    pub dipole: f64,
    pub numerics: Numerics,
}

impl ExperimentConfig {
    /// Spin relaxation rate, fixed at twice the dephasing rate.
    pub fn upsilon1(&self) -> f64 {
        2.0 * self.upsilon2
    }

    /// Resonator energy decay rate ω_r/Q.
    pub fn gamma_n(&self) -> f64 {
        self.omega_r / self.quality_factor
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("radius", self.radius)?;
        ensure_positive("gap", self.gap)?;
        ensure_positive("thickness", self.thickness)?;
        ensure_positive("spin_density", self.spin_density)?;
        ensure_positive("omega_r", self.omega_r)?;
        ensure_positive("quality_factor", self.quality_factor)?;
        ensure_positive("mass", self.mass)?;
        ensure_positive("upsilon2", self.upsilon2)?;
        ensure_positive("pump_rabi", self.pump_rabi)?;
        ensure_positive("dipole", self.dipole)?;
        if !(self.polarization > 0.0 && self.polarization <= 1.0) {
            return Err(Error::Domain {
                name: "polarization",
                value: self.polarization,
                reason: "must lie in (0, 1]",
            });
        }
        if !self.delta_s.is_finite() {
            return Err(Error::Domain {
                name: "delta_s",
                value: self.delta_s,
                reason: "must be finite",
            });
        }
        let n = &self.numerics;
        ensure_positive("quad_rel_tol", n.quad_rel_tol)?;
        if !(n.quad_abs_tol >= 0.0 && n.quad_abs_tol.is_finite()) {
            return Err(Error::Domain {
                name: "quad_abs_tol",
                value: n.quad_abs_tol,
                reason: "must be finite and >= 0",
            });
        }
        if n.quad_max_subdivisions == 0 {
            return Err(Error::InvalidConfig("quad_max_subdivisions must be >= 1".into()));
        }
        ensure_positive("td_quality_factor", n.td_quality_factor)?;
        if !(n.td_coupling >= 0.0 && n.td_coupling.is_finite()) {
            return Err(Error::Domain {
                name: "td_coupling",
                value: n.td_coupling,
                reason: "must be finite and >= 0",
            });
        }
        ensure_positive("td_probe_ratio", n.td_probe_ratio)?;
        if n.td_demod_cycles == 0 {
            return Err(Error::InvalidConfig("td_demod_cycles must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        default_config()
    }
}

/// Reference parameter set: 500 nm × 50 nm polarized cylinder 80 nm above the
/// NV, ρ = 1.62e-3 nm⁻³, P = 0.1, ω_r = 2e6, Q = 1e6, m = 1e-15 kg,
/// Ω = Υ₂ = 1e3, Δ_s = 0, μ = 10 D.
pub fn default_config() -> ExperimentConfig {
    ExperimentConfig {
        radius: 5.0e-7,
        gap: 8.0e-8,
        thickness: 5.0e-8,
        spin_density: 1.62e24,
        polarization: 0.1,
        omega_r: 2.0e6,
        quality_factor: 1.0e6,
        mass: 1.0e-15,
        upsilon2: 1.0e3,
        delta_s: 0.0,
        pump_rabi: 1.0e3,
        dipole: debye_to_si(10.0),
        numerics: Numerics::default(),
    }
}

/// Boson mass for an interaction range, in kg and as a rest energy in eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BosonMass {
    pub kg: f64,
    pub ev: f64,
}

pub fn boson_mass_from_range(lambda: f64, consts: &PhysicalConstants) -> Result<BosonMass> {
    ensure_positive("lambda", lambda)?;
    let kg = consts.hbar / (lambda * consts.c);
    Ok(BosonMass {
        kg,
        ev: kg * consts.c * consts.c / ELEMENTARY_CHARGE,
    })
}

pub fn range_from_boson_mass(mass_kg: f64, consts: &PhysicalConstants) -> Result<f64> {
    ensure_positive("mass_kg", mass_kg)?;
    Ok(consts.hbar / (mass_kg * consts.c))
}

pub fn debye_to_si(value: f64) -> f64 {
    value * DEBYE
}

//! Population inversion and the closed-form first-order probe susceptibility.
//!
//! The susceptibility is `χ = (μ²/ħ)·(ω₀A + B*C)/(CΩ − AD)` with
//!
//! ```text
//! A = 2g²ηB*Ω − 2Ω² + E(δ + iΥ₁)
//! B = Ωω₀ / (iΥ₂ − Δ_s + g²ω₀/ω_r)
//! C = 2E(g²ηB − Ω)
//! D = Δ_s − iΥ₂ − g²ω₀/ω_r − δ
//! E = Δ_s + iΥ₂ − g²ω₀/ω_r + δ
//! η = ω_r / (ω_r² − δ² − iδγ_n)
//! ```
//!
//! and ω₀ the root in [-1, 0] of `(ω₀+1)[Υ₂² + (g²ω₀/ω_r − Δ_s)²] + 2Ω²ω₀ = 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::ExperimentConfig;

/// Number of geometric continuation steps from g = 0 to the requested g.
pub const HOMOTOPY_STEPS: i32 = 16;

/// Denominators below this magnitude are reported as singular.
pub const SINGULAR_DENOMINATOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SusceptibilityInputs {
    /// Spin–phonon coupling, rad/s.
    pub g: f64,
    pub delta_s: f64,
    /// Pump Rabi frequency Ω, rad/s.
    pub pump_rabi: f64,
    pub upsilon2: f64,
    pub omega_r: f64,
    pub gamma_n: f64,
}

impl SusceptibilityInputs {
    pub fn from_config(config: &ExperimentConfig, g: f64) -> Self {
        Self {
            g,
            delta_s: config.delta_s,
            pump_rabi: config.pump_rabi,
            upsilon2: config.upsilon2,
            omega_r: config.omega_r,
            gamma_n: config.gamma_n(),
        }
    }

    pub fn with_g(self, g: f64) -> Self {
        Self { g, ..self }
    }

    /// Relaxation rate Υ₁, tied to the dephasing rate as Υ₁ = 2Υ₂.
    pub fn upsilon1(&self) -> f64 {
        2.0 * self.upsilon2
    }

    /// g²/ω_r, the static frequency pull per unit inversion.
    pub fn pull(&self) -> f64 {
        self.g * self.g / self.omega_r
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pump_rabi", self.pump_rabi),
            ("upsilon2", self.upsilon2),
            ("omega_r", self.omega_r),
            ("gamma_n", self.gamma_n),
        ];
        for (name, value) in positive {
            crate::error::ensure_positive(name, value)?;
        }
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return Err(Error::Domain {
                name: "g",
                value: self.g,
                reason: "must be finite and >= 0",
            });
        }
        if !self.delta_s.is_finite() {
            return Err(Error::Domain {
                name: "delta_s",
                value: self.delta_s,
                reason: "must be finite",
            });
        }
        Ok(())
    }
}

/// Left-hand side of the inversion equation, in factored form.
pub fn inversion_residual(w: f64, inputs: &SusceptibilityInputs) -> f64 {
    let shift = inputs.pull() * w - inputs.delta_s;
    (w + 1.0) * (inputs.upsilon2 * inputs.upsilon2 + shift * shift)
        + 2.0 * inputs.pump_rabi * inputs.pump_rabi * w
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All roots of the inversion cubic in [-1, 0], ascending.
///
/// The interval is split at the stationary points of the cubic so each piece
/// is monotone, then every piece with a sign change is bisected.
pub fn inversion_roots(inputs: &SusceptibilityInputs) -> Vec<f64> {
    let k = inputs.pull();
    let ds = inputs.delta_s;
    let a3 = k * k;
    let a2 = k * k - 2.0 * k * ds;
    let a1 = ds * ds + inputs.upsilon2 * inputs.upsilon2 - 2.0 * k * ds + 2.0 * inputs.pump_rabi * inputs.pump_rabi;

    // stationary points: 3a3 w² + 2a2 w + a1 = 0
    let mut breaks = vec![-1.0, 0.0];
    let (qa, qb, qc) = (3.0 * a3, 2.0 * a2, a1);
    if qa != 0.0 {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let q = -0.5 * (qb + qb.signum() * disc.sqrt());
            for w in [q / qa, if q != 0.0 { qc / q } else { f64::NAN }] {
                if w > -1.0 && w < 0.0 {
                    breaks.push(w);
                }
            }
        }
    } else if qb != 0.0 {
        let w = -qc / qb;
        if w > -1.0 && w < 0.0 {
            breaks.push(w);
        }
    }
    breaks.sort_by(f64::total_cmp);

    let f = |w: f64| inversion_residual(w, inputs);
    let mut roots: Vec<f64> = Vec::with_capacity(3);
    for pair in breaks.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let (f_lo, f_hi) = (f(lo), f(hi));
        if f_lo == 0.0 || f_hi == 0.0 || (f_lo < 0.0) != (f_hi < 0.0) {
            let r = bisect(f, lo, hi);
            if roots.last().is_none_or(|&last| (r - last).abs() > 4.0 * f64::EPSILON) {
                roots.push(r);
            }
        }
    }
    roots
}

/// Steady-state population inversion ω₀ ∈ [-1, 0].
///
/// With several admissible roots the one reached by continuation from the
/// unique g = 0 solution is returned.
pub fn population_inversion(inputs: &SusceptibilityInputs) -> Result<f64> {
    inputs.validate()?;
    let at_zero = inputs.with_g(0.0);
    let mut current = *inversion_roots(&at_zero)
        .first()
        .ok_or(Error::NoPhysicalRoot { g: 0.0 })?;
    if inputs.g == 0.0 {
        return Ok(current);
    }
    for step in 1..=HOMOTOPY_STEPS {
        let g = inputs.g * 2f64.powi(step - HOMOTOPY_STEPS);
        let roots = inversion_roots(&inputs.with_g(g));
        current = roots
            .iter()
            .copied()
            .min_by(|a, b| (a - current).abs().total_cmp(&(b - current).abs()))
            .ok_or(Error::NoPhysicalRoot { g })?;
    }
    Ok(current)
}

/// Mechanical response function η(δ) = ω_r/(ω_r² − δ² − iδγ_n).
pub fn eta(delta: f64, inputs: &SusceptibilityInputs) -> Complex64 {
    let wr = inputs.omega_r;
    Complex64::new(wr, 0.0) / Complex64::new(wr * wr - delta * delta, -delta * inputs.gamma_n)
}

/// Intermediate coefficients of the closed form at one detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub omega0: f64,
    pub eta: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub e: Complex64,
}

impl Coefficients {
    pub fn new(delta: f64, inputs: &SusceptibilityInputs, omega0: f64) -> Self {
        let i = Complex64::i();
        let om = inputs.pump_rabi;
        let g2 = inputs.g * inputs.g;
        let shift = inputs.pull() * omega0;
        let eta = eta(delta, inputs);
        let b = om * omega0 / Complex64::new(-inputs.delta_s + shift, inputs.upsilon2);
        let e = Complex64::new(inputs.delta_s - shift + delta, inputs.upsilon2);
        let d = Complex64::new(inputs.delta_s - shift - delta, -inputs.upsilon2);
        let a = 2.0 * g2 * eta * b.conj() * om - 2.0 * om * om + e * (delta + i * inputs.upsilon1());
        let c = 2.0 * e * (g2 * eta * b - om);
        Self {
            omega0,
            eta,
            a,
            b,
            c,
            d,
            e,
        }
    }

    pub fn numerator(&self) -> Complex64 {
        self.omega0 * self.a + self.b.conj() * self.c
    }

    pub fn denominator(&self, pump_rabi: f64) -> Complex64 {
        self.c * pump_rabi - self.a * self.d
    }

    pub fn bracket(&self, delta: f64, pump_rabi: f64) -> Result<Complex64> {
        let den = self.denominator(pump_rabi);
        if den.norm() < SINGULAR_DENOMINATOR {
            return Err(Error::Singular { delta });
        }
        Ok(self.numerator() / den)
    }
}

/// `(ω₀A + B*C)/(CΩ − AD)` in seconds; the susceptibility without the μ²/ħ prefactor.
pub fn chi_bracket(delta: f64, inputs: &SusceptibilityInputs) -> Result<Complex64> {
    let omega0 = population_inversion(inputs)?;
    chi_bracket_at(delta, inputs, omega0)
}

/// Same as [`chi_bracket`] with a precomputed inversion.
pub fn chi_bracket_at(delta: f64, inputs: &SusceptibilityInputs, omega0: f64) -> Result<Complex64> {
    Coefficients::new(delta, inputs, omega0).bracket(delta, inputs.pump_rabi)
}

/// Dimensional susceptibility (μ²/ħ)·bracket.
pub fn chi_physical(delta: f64, inputs: &SusceptibilityInputs, dipole: f64, hbar: f64) -> Result<Complex64> {
    Ok(chi_bracket(delta, inputs)? * (dipole * dipole / hbar))
}

/// Normalized absorption Υ₂·Im(bracket).
pub fn absorption(bracket: Complex64, inputs: &SusceptibilityInputs) -> f64 {
    inputs.upsilon2 * bracket.im
}

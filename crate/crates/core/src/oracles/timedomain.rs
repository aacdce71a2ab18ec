//! Noise-free mean-field integration of the driven spin–resonator equations.
//!
//! ```text
//! dS_z/dt = −Υ₁(S_z + ½) + 2Ω·Im S⁻ + 2ε·Im(S⁻e^{iδt})
//! dS⁻/dt  = −(Υ₂ + i(Δ_s + gτ))S⁻ − 2iΩS_z − 2iεS_z·e^{−iδt}
//! τ''     = −γ_nτ' − ω_r²τ − 2gω_rS_z
//! ```
//!
//! with ε the probe Rabi frequency. The state is integrated as an offset from
//! the pumped steady state so the weak probe response keeps its precision.
//! After the transients have decayed, `(S⁻ − S₀⁻)e^{iδt}/ε` is averaged over
//! whole beat periods, which isolates the `e^{−iδt}` component.

use std::f64::consts::PI;
use std::sync::atomic::AtomicBool;

use num_complex::Complex64;

use super::ode::{integrate, Settings, StepControl};
use crate::error::{Error, Result};
use crate::params::Numerics;
use crate::susceptibility::{population_inversion, SusceptibilityInputs};

/// Transient lifetimes `1/min(Υ₂, γ_n)` allowed before demodulation by default.
pub const SETTLE_LIFETIMES: f64 = 30.0;
/// Minimum admissible settle time in the same units.
pub const MIN_SETTLE_LIFETIMES: f64 = 10.0;
/// Resonator periods per step must exceed this count.
pub const MIN_STEPS_PER_PERIOD: f64 = 50.0;
pub const MAX_PROBE_RATIO: f64 = 1e-3;
/// Relative change between consecutive demodulation windows that is tolerated.
pub const DRIFT_TOLERANCE: f64 = 1e-3;
/// Above this many steps the run is refused.
pub const STEP_LIMIT: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeDomainSpec {
    /// Time at which demodulation starts, s.
    pub t_end: f64,
    /// Largest integration step, s.
    pub dt: f64,
    /// Probe Rabi frequency over the pump Rabi frequency.
    pub probe_amplitude_ratio: f64,
    /// Beat periods per demodulation window.
    pub demod_cycles: usize,
    /// Dense-output samples per beat period.
    pub samples_per_period: usize,
    pub control: StepControl,
}

impl TimeDomainSpec {
    /// Default settle time and step for `inputs`.
    pub fn for_inputs(inputs: &SusceptibilityInputs, numerics: &Numerics) -> Self {
        Self {
            t_end: SETTLE_LIFETIMES / inputs.upsilon2.min(inputs.gamma_n),
            dt: 2.0 * PI / (64.0 * inputs.omega_r),
            probe_amplitude_ratio: numerics.td_probe_ratio,
            demod_cycles: numerics.td_demod_cycles,
            samples_per_period: 64,
            control: StepControl::Adaptive { rtol: 1e-10, atol: 1e-14 },
        }
    }

    pub fn validate(&self, inputs: &SusceptibilityInputs) -> Result<()> {
        let slowest = inputs.upsilon2.min(inputs.gamma_n);
        if !(self.t_end >= MIN_SETTLE_LIFETIMES / slowest) {
            return Err(Error::Domain {
                name: "t_end",
                value: self.t_end,
                reason: "transients need at least 10/min(upsilon2, gamma_n) to decay",
            });
        }
        if !(self.dt > 0.0 && self.dt < 2.0 * PI / (MIN_STEPS_PER_PERIOD * inputs.omega_r)) {
            return Err(Error::Domain {
                name: "dt",
                value: self.dt,
                reason: "must be positive and below 2*pi/(50*omega_r)",
            });
        }
        if !(self.probe_amplitude_ratio > 0.0 && self.probe_amplitude_ratio <= MAX_PROBE_RATIO) {
            return Err(Error::Domain {
                name: "probe_amplitude_ratio",
                value: self.probe_amplitude_ratio,
                reason: "must lie in (0, 1e-3]",
            });
        }
        if self.demod_cycles == 0 || self.samples_per_period < 4 {
            return Err(Error::Domain {
                name: "demod_cycles",
                value: self.demod_cycles as f64,
                reason: "need at least one window and four samples per period",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeDomainResult {
    pub delta: f64,
    /// `ħS₊/(μE₂)`, s.
    pub bracket: Complex64,
    /// Relative change from the preceding demodulation window.
    pub drift: f64,
    pub steps: usize,
    pub rejected: usize,
}

pub fn time_domain_chi(delta: f64, inputs: &SusceptibilityInputs, spec: &TimeDomainSpec) -> Result<TimeDomainResult> {
    time_domain_chi_with_cancel(delta, inputs, spec, None)
}

pub fn time_domain_chi_with_cancel(
    delta: f64,
    inputs: &SusceptibilityInputs,
    spec: &TimeDomainSpec,
    cancel: Option<&AtomicBool>,
) -> Result<TimeDomainResult> {
    run(delta, inputs, spec, cancel, true)
}

fn run(
    delta: f64,
    inputs: &SusceptibilityInputs,
    spec: &TimeDomainSpec,
    cancel: Option<&AtomicBool>,
    check_spec: bool,
) -> Result<TimeDomainResult> {
    inputs.validate()?;
    if check_spec {
        spec.validate(inputs)?;
    }
    if !(delta != 0.0 && delta.is_finite()) {
        return Err(Error::Domain {
            name: "delta",
            value: delta,
            reason: "demodulation needs a finite nonzero beat frequency",
        });
    }
    let period = 2.0 * PI / delta.abs();
    let window = spec.demod_cycles as f64 * period;
    let t_total = spec.t_end + 2.0 * window;
    let steps = t_total / spec.dt;
    if steps > STEP_LIMIT {
        return Err(Error::ReducedQRequired {
            steps,
            limit: STEP_LIMIT,
        });
    }

    let omega0 = population_inversion(inputs)?;
    let om = inputs.pump_rabi;
    let g = inputs.g;
    let u1 = inputs.upsilon1();
    let u2 = inputs.upsilon2;
    let wr = inputs.omega_r;
    let gn = inputs.gamma_n;
    let eps = spec.probe_amplitude_ratio * om;

    let sz0 = 0.5 * omega0;
    let tau0 = -2.0 * g * sz0 / wr;
    let sm0 = -2.0 * Complex64::i() * om * sz0 / Complex64::new(u2, inputs.delta_s + g * tau0);
    let x0 = [sz0, sm0.re, sm0.im, tau0, 0.0];

    let rhs = |t: f64, y: &[f64; 5]| -> [f64; 5] {
        let sz = x0[0] + y[0];
        let sm = Complex64::new(x0[1] + y[1], x0[2] + y[2]);
        let tau = x0[3] + y[3];
        let v = y[4];
        let phase = Complex64::from_polar(1.0, delta * t);
        let dsz = -u1 * (sz + 0.5) + 2.0 * om * sm.im + 2.0 * eps * (sm * phase).im;
        let dsm = -Complex64::new(u2, inputs.delta_s + g * tau) * sm
            - 2.0 * Complex64::i() * om * sz
            - 2.0 * Complex64::i() * eps * sz * phase.conj();
        let acc = -gn * v - wr * wr * tau - 2.0 * g * wr * sz;
        [dsz, dsm.re, dsm.im, v, acc]
    };

    // ground state: S_z = −½, no coherence, resonator at rest
    let y0 = [-0.5 - x0[0], -x0[1], -x0[2], -x0[3], 0.0];

    let per_window = spec.demod_cycles * spec.samples_per_period;
    let spacing = period / spec.samples_per_period as f64;
    let samples: Vec<f64> = (0..2 * per_window).map(|k| spec.t_end + k as f64 * spacing).collect();
    let mut sums = [Complex64::default(); 2];
    let settings = Settings {
        h_max: spec.dt,
        control: spec.control,
        max_steps: (4.0 * steps) as usize + 1000,
    };
    let (_, stats) = integrate(
        rhs,
        0.0,
        y0,
        t_total,
        &settings,
        &samples,
        |k, t, y| {
            let response = Complex64::new(y[1], y[2]) * Complex64::from_polar(1.0, delta * t);
            sums[k / per_window] += response;
        },
        cancel,
    )?;
    // periodic trapezoid: the samples cover each window once without its closing endpoint
    let previous = sums[0] / (per_window as f64 * eps);
    let bracket = sums[1] / (per_window as f64 * eps);
    let drift = (bracket - previous).norm() / bracket.norm();
    if !(drift <= DRIFT_TOLERANCE) {
        return Err(Error::NotConverged { drift });
    }
    Ok(TimeDomainResult {
        delta,
        bracket,
        drift,
        steps: stats.accepted,
        rejected: stats.rejected,
    })
}

/// Step-halving study at fixed step length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderCheck {
    pub steps: [f64; 3],
    pub brackets: [Complex64; 3],
    /// `|χ(dt) − χ(dt/4)|` and `|χ(dt/2) − χ(dt/4)|`.
    pub errors: [f64; 2],
    /// `errors[0]/errors[1]`; 4 or more means at least second order.
    pub ratio: f64,
}

/// Beat periods per window used by [`order_check`]; longer windows only add roundoff.
pub const ORDER_CHECK_CYCLES: usize = 50;

/// Runs the oracle at fixed steps `dt`, `dt/2`, `dt/4`.
///
/// `dt` is the largest admissible step that divides the demodulation sample
/// spacing, and the settle time is rounded up to a whole number of steps, so
/// every sample lands on a step boundary. Otherwise the interpolation error of
/// the dense output aliases into the comparison; at the default step the
/// truncation error is also close to the demodulation roundoff.
pub fn order_check(delta: f64, inputs: &SusceptibilityInputs, spec: &TimeDomainSpec) -> Result<OrderCheck> {
    let limit = 0.99 * 2.0 * PI / (MIN_STEPS_PER_PERIOD * inputs.omega_r);
    let spacing = 2.0 * PI / (delta.abs() * spec.samples_per_period as f64);
    let coarsest = spacing / (spacing / limit).ceil();
    let mut steps = [0.0; 3];
    let mut brackets = [Complex64::default(); 3];
    for j in 0..3 {
        steps[j] = coarsest / f64::from(1u32 << j);
        let fixed = TimeDomainSpec {
            t_end: (spec.t_end / coarsest).ceil() * coarsest,
            dt: steps[j],
            demod_cycles: spec.demod_cycles.min(ORDER_CHECK_CYCLES),
            control: StepControl::Fixed,
            ..*spec
        };
        brackets[j] = time_domain_chi(delta, inputs, &fixed)?.bracket;
    }
    let errors = [(brackets[0] - brackets[2]).norm(), (brackets[1] - brackets[2]).norm()];
    Ok(OrderCheck {
        steps,
        brackets,
        errors,
        ratio: errors[0] / errors[1],
    })
}

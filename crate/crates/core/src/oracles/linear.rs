//! Direct solve of the linearized mean-field equations for the first-order
//! probe response.
//!
//! The fluctuations around the pumped steady state are written as
//! `x(t) = x₊e^{−iδt} + x₋e^{iδt}`. Collecting the `e^{−iδt}` terms of each
//! equation together with the conjugated `e^{iδt}` terms gives six complex
//! unknowns `[S₊ᶻ, (S₋ᶻ)*, S₊, (S₋)*, τ₊, (τ₋)*]`. The probe enters with unit
//! Rabi amplitude, so `S₊` is directly the bracket `ħS₊/(μE₂)`.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::susceptibility::{population_inversion, Coefficients, SusceptibilityInputs};

type Matrix6 = SMatrix<Complex64, 6, 6>;
type Vector6 = SVector<Complex64, 6>;

/// Agreement required between the closed form and the solve.
pub const AGREEMENT_RELATIVE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSolution {
    pub bracket: Complex64,
    pub unknowns: [Complex64; 6],
    /// Steady-state coherence S₀⁻.
    pub coherence: Complex64,
    /// Static resonator displacement τ₀.
    pub displacement: f64,
    matrix: Matrix6,
}

fn steady_state(inputs: &SusceptibilityInputs, omega0: f64) -> (f64, f64, Complex64) {
    let i = Complex64::i();
    let sz0 = 0.5 * omega0;
    let tau0 = -2.0 * inputs.g * sz0 / inputs.omega_r;
    // from dS⁻/dt = 0 with the static displacement shifting the spin frequency
    let sm0 = -2.0 * i * inputs.pump_rabi * sz0
        / Complex64::new(inputs.upsilon2, inputs.delta_s + inputs.g * tau0);
    (sz0, tau0, sm0)
}

fn build(delta: f64, inputs: &SusceptibilityInputs, omega0: f64) -> (Matrix6, Vector6, f64, Complex64) {
    let i = Complex64::i();
    let om = inputs.pump_rabi;
    let g = inputs.g;
    let (sz0, tau0, sm0) = steady_state(inputs, omega0);
    let sp0 = sm0.conj();
    let u1 = inputs.upsilon1();
    let u2 = inputs.upsilon2;
    let ds = inputs.delta_s;
    let wr = inputs.omega_r;
    let mech = Complex64::new(wr * wr - delta * delta, -delta * inputs.gamma_n);

    let mut m = Matrix6::zeros();
    let mut rhs = Vector6::zeros();
    // S_z, e^{−iδt}
    m[(0, 0)] = Complex64::new(u1, -delta);
    m[(0, 3)] = -i * om;
    m[(0, 2)] = i * om;
    rhs[0] = i * sp0;
    // S_z, conjugated e^{iδt}
    m[(1, 1)] = Complex64::new(u1, -delta);
    m[(1, 2)] = i * om;
    m[(1, 3)] = -i * om;
    rhs[1] = i * sp0;
    // S⁻, e^{−iδt}
    m[(2, 2)] = Complex64::new(u2, ds + g * tau0 - delta);
    m[(2, 4)] = i * g * sm0;
    m[(2, 0)] = 2.0 * i * om;
    rhs[2] = -2.0 * i * sz0;
    // S⁻, conjugated e^{iδt}
    m[(3, 3)] = Complex64::new(u2, -ds - g * tau0 - delta);
    m[(3, 5)] = -i * g * sp0;
    m[(3, 1)] = -2.0 * i * om;
    // resonator, both sidebands
    m[(4, 4)] = mech;
    m[(4, 0)] = Complex64::from(2.0 * g * wr);
    m[(5, 5)] = mech;
    m[(5, 1)] = Complex64::from(2.0 * g * wr);
    (m, rhs, tau0, sm0)
}

/// Solves the six-unknown system at a given inversion.
pub fn linear_system_solve(delta: f64, inputs: &SusceptibilityInputs, omega0: f64) -> Result<LinearSolution> {
    inputs.validate()?;
    let (m, rhs, tau0, sm0) = build(delta, inputs, omega0);
    let x = m.lu().solve(&rhs).ok_or(Error::Singular { delta })?;
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Singular { delta });
    }
    let mut unknowns = [Complex64::default(); 6];
    unknowns.copy_from_slice(x.as_slice());
    Ok(LinearSolution {
        bracket: unknowns[2],
        unknowns,
        coherence: sm0,
        displacement: tau0,
        matrix: m,
    })
}

/// Bracket `ħS₊/(μE₂)` from the direct solve, at the continuation-selected inversion.
pub fn linear_system_chi(delta: f64, inputs: &SusceptibilityInputs) -> Result<Complex64> {
    let omega0 = population_inversion(inputs)?;
    Ok(linear_system_solve(delta, inputs, omega0)?.bracket)
}

/// Closed-form coefficients re-expressed from the entries of the solved system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCoefficients {
    /// Residual of the steady-state population equation, in units of Υ₁/2.
    pub inversion_residual: f64,
    pub b: Complex64,
    pub eta: Complex64,
    pub d: Complex64,
    pub e: Complex64,
    pub a: Complex64,
    pub c: Complex64,
}

/// Residual of the steady-state population equation at `omega0`, in units of Υ₁/2.
pub fn population_balance(inputs: &SusceptibilityInputs, omega0: f64) -> f64 {
    let (sz0, _, sm0) = steady_state(inputs, omega0);
    let residual = -inputs.upsilon1() * (sz0 + 0.5) + 2.0 * inputs.pump_rabi * sm0.im;
    residual / (0.5 * inputs.upsilon1())
}

impl LinearSolution {
    pub fn coefficients(&self, inputs: &SusceptibilityInputs, omega0: f64) -> OracleCoefficients {
        let i = Complex64::i();
        let m = &self.matrix;
        let e = i * m[(3, 3)];
        let d = -i * m[(2, 2)];
        let eta = Complex64::from(inputs.omega_r) / m[(4, 4)];
        // (S₋)* in terms of (S₋ᶻ)* after eliminating (τ₋)*; by symmetry (S₋ᶻ)* = S₊ᶻ
        let follow = -(m[(3, 1)] - m[(3, 5)] * m[(5, 1)] / m[(5, 5)]) / m[(3, 3)];
        let a = i * e * (m[(0, 0)] + m[(0, 3)] * follow);
        let c = i * e * (m[(2, 0)] - m[(2, 4)] * m[(4, 0)] / m[(4, 4)]);
        OracleCoefficients {
            inversion_residual: population_balance(inputs, omega0),
            b: self.coherence,
            eta,
            d,
            e,
            a,
            c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disagreement {
    pub delta: f64,
    /// Name of the first coefficient that fails, in dependency order.
    pub coefficient: &'static str,
    /// `[re, im]`
    pub closed_form: [f64; 2],
    pub oracle: [f64; 2],
    pub relative_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub g: f64,
    pub tolerance: f64,
    pub points: usize,
    pub max_relative_difference: f64,
    pub first_disagreement: Option<Disagreement>,
}

impl DiscrepancyReport {
    pub fn passed(&self) -> bool {
        self.first_disagreement.is_none()
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Compares `closed` coefficient sets against the solve on `deltas`.
///
/// The first failing coefficient is named in the order ω₀, B, η, D, E, A, C,
/// then the bracket itself.
pub fn discrepancy_report_with<F>(
    deltas: &[f64],
    inputs: &SusceptibilityInputs,
    tolerance: f64,
    closed: F,
) -> Result<DiscrepancyReport>
where
    F: Fn(f64, &SusceptibilityInputs, f64) -> Coefficients,
{
    let omega0 = population_inversion(inputs)?;
    let mut max_relative_difference = 0.0f64;
    let mut first_disagreement = None;
    for &delta in deltas {
        let sol = linear_system_solve(delta, inputs, omega0)?;
        let oc = sol.coefficients(inputs, omega0);
        let cf = closed(delta, inputs, omega0);
        let bracket = cf.bracket(delta, inputs.pump_rabi)?;
        let balance = population_balance(inputs, cf.omega0);
        let checks = [
            ("omega0", Complex64::from(cf.omega0), Complex64::from(omega0), balance.abs()),
            ("B", cf.b, oc.b, relative(cf.b, oc.b)),
            ("eta", cf.eta, oc.eta, relative(cf.eta, oc.eta)),
            ("D", cf.d, oc.d, relative(cf.d, oc.d)),
            ("E", cf.e, oc.e, relative(cf.e, oc.e)),
            ("A", cf.a, oc.a, relative(cf.a, oc.a)),
            ("C", cf.c, oc.c, relative(cf.c, oc.c)),
            ("bracket", bracket, sol.bracket, relative(bracket, sol.bracket)),
        ];
        for (name, c, o, diff) in checks {
            max_relative_difference = max_relative_difference.max(diff);
            if first_disagreement.is_none() && !(diff <= tolerance) {
                first_disagreement = Some(Disagreement {
                    delta,
                    coefficient: name,
                    closed_form: pair(c),
                    oracle: pair(o),
                    relative_difference: diff,
                });
            }
        }
    }
    Ok(DiscrepancyReport {
        g: inputs.g,
        tolerance,
        points: deltas.len(),
        max_relative_difference,
        first_disagreement,
    })
}

pub fn discrepancy_report(deltas: &[f64], inputs: &SusceptibilityInputs) -> Result<DiscrepancyReport> {
    discrepancy_report_with(deltas, inputs, AGREEMENT_RELATIVE, Coefficients::new)
}

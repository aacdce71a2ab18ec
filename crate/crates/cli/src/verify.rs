//! Oracle comparisons behind `nvprobe verify`.

use clap::ValueEnum;
use nvprobe::coupling::AxialCoupling;
use nvprobe::oracles::field::{field_integral, gradient_oracle, magnetic_field_closed_form};
use nvprobe::oracles::linear::{discrepancy_report, linear_system_chi, AGREEMENT_RELATIVE};
use nvprobe::oracles::quadrature::QuadratureSpec;
use nvprobe::oracles::timedomain::{order_check, time_domain_chi, TimeDomainSpec};
use nvprobe::spectrum::detuning_grid;
use nvprobe::susceptibility::{chi_bracket, SusceptibilityInputs};
use nvprobe::{ExperimentConfig, PhysicalConstants};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

pub const GRADIENT_TOLERANCE: f64 = 1e-5;
pub const FIELD_TOLERANCE: f64 = 1e-10;
pub const TIME_DOMAIN_TOLERANCE: f64 = 1e-2;
/// Error ratio under step halving that certifies at least second order.
pub const ORDER_RATIO: f64 = 4.0;
pub const LINEAR_COUPLINGS: [f64; 4] = [0.0, 0.3, 1.0, 100.0];
pub const TIME_DOMAIN_DETUNINGS: [f64; 3] = [0.9, 1.0, 1.1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Quadrature,
    Linear,
    Timedomain,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    pub suite: &'static str,
    pub name: String,
    pub expected: Value,
    pub actual: Value,
    pub relative_error: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub passed: bool,
    pub failures: usize,
    pub entries: Vec<Entry>,
}

fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn failed(suite: &'static str, name: String, tolerance: f64, message: String) -> Entry {
    Entry {
        suite,
        name,
        expected: Value::Null,
        actual: Value::Null,
        relative_error: None,
        tolerance,
        passed: false,
        message: Some(message),
    }
}

fn compare(suite: &'static str, name: String, expected: Value, actual: Value, err: f64, tolerance: f64) -> Entry {
    Entry {
        suite,
        name,
        expected,
        actual,
        relative_error: Some(err),
        tolerance,
        passed: err < tolerance,
        message: None,
    }
}

pub fn quadrature_suite(config: &ExperimentConfig, consts: &PhysicalConstants) -> Vec<Entry> {
    let spec = QuadratureSpec::from_numerics(&config.numerics);
    let mut out = Vec::new();

    let name = format!("field integral, magnetic, d = {:e} m", config.gap);
    out.push(match field_integral(config.gap, &AxialCoupling::none(), config, consts, &spec) {
        Ok(b) => {
            let exact = magnetic_field_closed_form(config.gap, config, consts);
            compare("quadrature", name, json!(exact), json!(b), ((b - exact) / exact).abs(), FIELD_TOLERANCE)
        }
        Err(e) => failed("quadrature", name, FIELD_TOLERANCE, e.to_string()),
    });

    let cases = [
        ("gradient, alpha = 0", AxialCoupling::none()),
        ("gradient, alpha = 1e-40, lambda = 1e-7 m", AxialCoupling { alpha: 1e-40, lambda: 1e-7 }),
        ("gradient, alpha = 1e-14, lambda = 1e-7 m", AxialCoupling { alpha: 1e-14, lambda: 1e-7 }),
    ];
    for (name, coupling) in cases {
        out.push(match gradient_oracle(&coupling, config, consts, &spec) {
            Ok(r) => compare(
                "quadrature",
                name.into(),
                json!(r.closed_form),
                json!(r.derivative),
                r.relative_difference,
                GRADIENT_TOLERANCE,
            ),
            Err(e) => failed("quadrature", name.into(), GRADIENT_TOLERANCE, e.to_string()),
        });
    }
    out
}

pub fn linear_suite(config: &ExperimentConfig) -> Vec<Entry> {
    let wr = config.omega_r;
    let grid = detuning_grid(-wr - 50.0, wr + 50.0, 41);
    let mut out = Vec::new();
    for g in LINEAR_COUPLINGS {
        let inputs = SusceptibilityInputs::from_config(config, g);
        let name = format!("closed form vs linear solve, g = {g}, 41 detunings");
        let mut worst: Option<(f64, Complex64, Complex64, f64)> = None;
        let mut error = None;
        for &delta in &grid {
            match (chi_bracket(delta, &inputs), linear_system_chi(delta, &inputs)) {
                (Ok(c), Ok(o)) => {
                    let e = rel(c, o);
                    if worst.is_none_or(|w| e > w.3) {
                        worst = Some((delta, c, o, e));
                    }
                }
                (Err(e), _) | (_, Err(e)) => {
                    error = Some(format!("delta = {delta:e}: {e}"));
                    break;
                }
            }
        }
        let entry = match (error, worst) {
            (Some(msg), _) => failed("linear", name, AGREEMENT_RELATIVE, msg),
            (None, None) => failed("linear", name, AGREEMENT_RELATIVE, "empty grid".into()),
            (None, Some((delta, c, o, e))) => {
                let mut entry = compare("linear", name, complex(c), complex(o), e, AGREEMENT_RELATIVE);
                if !entry.passed {
                    let located = discrepancy_report(&grid, &inputs)
                        .ok()
                        .and_then(|r| r.first_disagreement)
                        .map(|d| format!("first differing coefficient: {} at delta = {:e}", d.coefficient, d.delta));
                    entry.message = Some(located.unwrap_or_else(|| format!("worst at delta = {delta:e}")));
                } else {
                    entry.message = Some(format!("worst at delta = {delta:e}"));
                }
                entry
            }
        };
        out.push(entry);
    }
    out
}

/// Inputs for the time-domain oracle: the configured resonator with the
/// reduced quality factor and the oracle coupling.
pub fn time_domain_inputs(config: &ExperimentConfig) -> SusceptibilityInputs {
    let mut inputs = SusceptibilityInputs::from_config(config, config.numerics.td_coupling);
    inputs.gamma_n = config.omega_r / config.numerics.td_quality_factor;
    inputs
}

pub fn timedomain_suite(config: &ExperimentConfig) -> Vec<Entry> {
    let inputs = time_domain_inputs(config);
    let spec = TimeDomainSpec::for_inputs(&inputs, &config.numerics);
    let q = config.numerics.td_quality_factor;
    let mut out = Vec::new();
    for x in TIME_DOMAIN_DETUNINGS {
        let delta = x * config.omega_r;
        let name = format!("time domain vs linear solve, Q = {q}, g = {}, delta = {x} omega_r", inputs.g);
        let entry = match (time_domain_chi(delta, &inputs, &spec), linear_system_chi(delta, &inputs)) {
            (Ok(t), Ok(l)) => {
                let mut e = compare("timedomain", name, complex(l), complex(t.bracket), rel(t.bracket, l), TIME_DOMAIN_TOLERANCE);
                e.message = Some(format!("{} steps, window drift {:e}", t.steps, t.drift));
                e
            }
            (Err(e), _) | (_, Err(e)) => failed("timedomain", name, TIME_DOMAIN_TOLERANCE, e.to_string()),
        };
        out.push(entry);
    }
    let name = format!("step halving at delta = omega_r, Q = {q}");
    out.push(match order_check(config.omega_r, &inputs, &spec) {
        Ok(c) => Entry {
            suite: "timedomain",
            name,
            expected: json!(ORDER_RATIO),
            actual: json!(c.ratio),
            relative_error: None,
            tolerance: ORDER_RATIO,
            passed: c.ratio >= ORDER_RATIO,
            message: Some(format!("errors {:e}, {:e}", c.errors[0], c.errors[1])),
        },
        Err(e) => failed("timedomain", name, ORDER_RATIO, e.to_string()),
    });
    out
}

pub fn run_suite(suite: Suite, config: &ExperimentConfig, consts: &PhysicalConstants) -> Report {
    let mut entries = Vec::new();
    if matches!(suite, Suite::Quadrature | Suite::All) {
        entries.extend(quadrature_suite(config, consts));
    }
    if matches!(suite, Suite::Linear | Suite::All) {
        entries.extend(linear_suite(config));
    }
    if matches!(suite, Suite::Timedomain | Suite::All) {
        entries.extend(timedomain_suite(config));
    }
    let failures = entries.iter().filter(|e| !e.passed).count();
    Report {
        suite,
        passed: failures == 0,
        failures,
        entries,
    }
}

//! `key = value` configuration files.
//!
//! The format is flat TOML: one SI-valued key per line, `#` comments allowed.
//! Every key is optional and falls back to [`default_config`]; unknown keys
//! are rejected.
//!
//! | key | unit | default |
//! |-----|------|---------|
//! | `radius` | m | 5e-7 |
//! | `gap` | m | 8e-8 |
//! | `thickness` | m | 5e-8 |
//! | `spin_density` | m⁻³ | 1.62e24 |
//! | `polarization` | 1 | 0.1 |
//! | `omega_r` | rad/s | 2e6 |
//! | `quality_factor` | 1 | 1e6 |
//! | `mass` | kg | 1e-15 |
//! | `upsilon1` | rad/s | 2·upsilon2 (must equal it if given) |
//! | `upsilon2` | rad/s | 1e3 |
//! | `delta_s` | rad/s | 0 |
//! | `pump_rabi` | rad/s | 1e3 |
//! | `dipole` | C·m | 3.33564e-29 (10 D) |
//! | `quad_rel_tol` | 1 | 1e-14 |
//! | `quad_abs_tol` | T | 0 |
//! | `quad_max_subdivisions` | count | 4000 |
//! | `td_quality_factor` | 1 | 100 |
//! | `td_coupling` | rad/s | 50 |
//! | `td_probe_ratio` | 1 | 1e-3 |
//! | `td_demod_cycles` | count | 400 |

use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::params::{default_config, ExperimentConfig};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    radius: Option<f64>,
    gap: Option<f64>,
    thickness: Option<f64>,
    spin_density: Option<f64>,
    polarization: Option<f64>,
    omega_r: Option<f64>,
    quality_factor: Option<f64>,
    mass: Option<f64>,
    upsilon1: Option<f64>,
    upsilon2: Option<f64>,
    delta_s: Option<f64>,
    pump_rabi: Option<f64>,
    dipole: Option<f64>,
    quad_rel_tol: Option<f64>,
    quad_abs_tol: Option<f64>,
    quad_max_subdivisions: Option<usize>,
    td_quality_factor: Option<f64>,
    td_coupling: Option<f64>,
    td_probe_ratio: Option<f64>,
    td_demod_cycles: Option<usize>,
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
    (line, column)
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e
            .span()
            .map(|span| line_column(text, span.start))
            .unwrap_or((1, 1));
        Error::ConfigParse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;

    let mut cfg = default_config();
    macro_rules! take {
        ($($field:ident => $target:expr),* $(,)?) => {
            $(if let Some(v) = raw.$field { $target = v; })*
        };
    }
    take! {
        radius => cfg.radius,
        gap => cfg.gap,
        thickness => cfg.thickness,
        spin_density => cfg.spin_density,
        polarization => cfg.polarization,
        omega_r => cfg.omega_r,
        quality_factor => cfg.quality_factor,
        mass => cfg.mass,
        upsilon2 => cfg.upsilon2,
        delta_s => cfg.delta_s,
        pump_rabi => cfg.pump_rabi,
        dipole => cfg.dipole,
        quad_rel_tol => cfg.numerics.quad_rel_tol,
        quad_abs_tol => cfg.numerics.quad_abs_tol,
        quad_max_subdivisions => cfg.numerics.quad_max_subdivisions,
        td_quality_factor => cfg.numerics.td_quality_factor,
        td_coupling => cfg.numerics.td_coupling,
        td_probe_ratio => cfg.numerics.td_probe_ratio,
        td_demod_cycles => cfg.numerics.td_demod_cycles,
    }
    if let Some(u1) = raw.upsilon1 {
        let expected = cfg.upsilon1();
        if !(((u1 - expected) / expected).abs() <= 1e-12) {
            return Err(Error::InvalidConfig(format!(
                "upsilon1 = {u1:e} must equal 2*upsilon2 = {expected:e}"
            )));
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Serializes a configuration so that [`parse_config`] reproduces it exactly.
pub fn write_config(cfg: &ExperimentConfig) -> String {
    let n = &cfg.numerics;
    let entries: [(&str, String); 20] = [
        ("radius", format!("{:?}", cfg.radius)),
        ("gap", format!("{:?}", cfg.gap)),
        ("thickness", format!("{:?}", cfg.thickness)),
        ("spin_density", format!("{:?}", cfg.spin_density)),
        ("polarization", format!("{:?}", cfg.polarization)),
        ("omega_r", format!("{:?}", cfg.omega_r)),
        ("quality_factor", format!("{:?}", cfg.quality_factor)),
        ("mass", format!("{:?}", cfg.mass)),
        ("upsilon1", format!("{:?}", cfg.upsilon1())),
        ("upsilon2", format!("{:?}", cfg.upsilon2)),
        ("delta_s", format!("{:?}", cfg.delta_s)),
        ("pump_rabi", format!("{:?}", cfg.pump_rabi)),
        ("dipole", format!("{:?}", cfg.dipole)),
        ("quad_rel_tol", format!("{:?}", n.quad_rel_tol)),
        ("quad_abs_tol", format!("{:?}", n.quad_abs_tol)),
        ("quad_max_subdivisions", n.quad_max_subdivisions.to_string()),
        ("td_quality_factor", format!("{:?}", n.td_quality_factor)),
        ("td_coupling", format!("{:?}", n.td_coupling)),
        ("td_probe_ratio", format!("{:?}", n.td_probe_ratio)),
        ("td_demod_cycles", n.td_demod_cycles.to_string()),
    ];
    let mut out = String::from("# resolved configuration (SI units, angular rates in rad/s)\n");
    for (key, value) in entries {
        let _ = writeln!(out, "{key} = {value}");
    }
    out
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value:e} is outside its domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("population inversion has no real root in [-1, 0] (g = {g:e})")]
    NoPhysicalRoot { g: f64 },

    #[error("susceptibility is singular at delta = {delta:e} rad/s")]
    Singular { delta: f64 },

    #[error("peak extremum sits on the window edge at delta = {delta:e}; widen the window")]
    WindowTooNarrow { delta: f64 },

    #[error("quadrature did not reach tolerance within {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})")]
    Accuracy {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },

    #[error("demodulated response drifted by {drift:e} between consecutive windows")]
    NotConverged { drift: f64 },

    #[error("time-domain oracle needs a reduced quality factor: {steps:e} steps required (limit {limit:e}); set Q <= ~1e3")]
    ReducedQRequired { steps: f64, limit: f64 },

    #[error("linear coupling formula does not apply: g = {g:e} < 0 (magnetic term dominates)")]
    Regime { g: f64 },

    #[error("computation cancelled")]
    Cancelled,

    #[error("u1 = {u1:e} is not negative at lambda = {lambda:e} m")]
    SignDomain { lambda: f64, u1: f64 },
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

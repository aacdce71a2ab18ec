//! Slower, independent re-computations used to certify the closed forms.

pub mod field;
pub mod quadrature;
pub mod linear;
pub mod ode;
pub mod timedomain;

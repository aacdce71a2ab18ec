//! Probe-absorption spectroscopy of an NV-center/cantilever hybrid coupled to a
//! polarized electron ensemble, and exclusion limits on an axial-vector
//! dipole–dipole coupling derived from it.
//!
//! All rates and frequencies are angular (rad/s); everything else is SI.

pub mod config_file;
pub mod coupling;
pub mod error;
pub mod exclusion;
pub mod oracles;
pub mod params;
pub mod spectrum;
pub mod susceptibility;

pub use error::{Error, Result};
pub use params::{default_config, ExperimentConfig, PhysicalConstants};

//! Experiment harness for the torus nodal-set toolkit: seeded generators,
//! parameter sweeps, file formats (CSV/JSON/SVG, field serialization) and
//! the `nodal` command-line interface.

pub mod cli;
pub mod cmd;
pub mod config;
pub mod error;
pub mod gen;
pub mod io;
pub mod rng;
pub mod sweep;

pub use config::{Experiment, ExperimentConfig};
pub use error::{Error, Result};

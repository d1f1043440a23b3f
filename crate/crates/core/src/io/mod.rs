//! Configuration files, trajectory persistence, CSV tables and SVG output.

pub mod config;
pub mod csv;
pub mod svg;
pub mod trajectory;

pub use config::{load_sweep, sweep_from_toml, sweep_to_toml, InitSpec, RunConfig};

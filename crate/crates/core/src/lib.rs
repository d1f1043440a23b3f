//! Simulation and analysis of swarms of binary-sensing unicycle agents.
//!
//! Each agent moves at constant speed and turns left at a fixed rate while
//! its cone-shaped sensor sees another agent, right otherwise. The crate
//! simulates that system, measures macroscopic observables, classifies the
//! resulting macrostate (milling, ellipsoidal, separated, ...), predicts the
//! mill radius in closed form and sweeps parameter planes into phase
//! diagrams.

pub mod classify;
pub mod dynamics;
pub mod error;
pub mod geom;
pub mod graph;
pub mod init;
pub mod io;
pub mod metrics;
pub mod mill;
pub mod params;
pub mod seed;
pub mod state;
pub mod sweep;

pub use classify::{classify, classify_run, ClassifierThresholds, Macrostate, RunOutcome, TailStats};
pub use dynamics::{run, step, Trajectory};
pub use error::{Result, SwarmError};
pub use geom::{in_fov, wrap_angle, Point};
pub use init::{counterexample_config, random_connected_init, regular_polygon_mill, Spin};
pub use params::{SimConfig, SwarmParams};
pub use state::{AgentState, Microstate};

//! Simulation of a resonant-beam link that carries power and data on the
//! same intracavity beam.
//!
//! The pieces compose bottom-up: [`optics`] finds the cavity mode,
//! [`resonator`] solves the intracavity powers, [`channel`] and [`pv`]
//! evaluate the two receiver branches, and [`link`] ties them together.
//! [`sweep`] runs parameter sweeps over [`config::SystemParams`].

pub mod channel;
pub mod config;
pub mod constants;
pub mod error;
pub mod link;
mod numeric;
pub mod optics;
pub mod pv;
pub mod resonator;
pub mod safety;
pub mod sweep;

pub use error::{Error, Result};
pub use config::{Scenario, SystemParams};
pub use link::{evaluate_link, evaluate_safety, LinkResult, LinkStatus};
pub use numeric::linspace;
pub use sweep::{run_sweep, run_sweep_serial, SweepAxis, SweepRow, SweepSpec};

//! Experiment harness for the gradient-flow MIMO detection library:
//! spec resolution (defaults < config file < CLI), deterministic seeded
//! runners for each experiment kind, and CSV/summary reporting.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

pub use config::{resolve, ExperimentKind, ExperimentSpec, Overrides};
pub use error::HarnessError;
pub use experiments::{run, RunOutput};

//! Experiment harness for `nlsrelax-core`: configuration files, canned
//! experiments, diagnostics and snapshot output, and time-step refinement
//! studies.

pub mod config;
pub mod convergence;
pub mod error;
pub mod experiments;
pub mod initial;
pub mod io;
pub mod run;

pub use config::{parse_config, parse_config_str, ExperimentConfig};
pub use convergence::{convergence_study, ConvergenceTable};
pub use error::{HarnessError, Result};
pub use run::{run_experiment, simulate, RunOutput};

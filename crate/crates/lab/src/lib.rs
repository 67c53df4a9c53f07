//! Batch front end for `perpetuity-core`: JSON run configs, CSV tables and
//! run manifests.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use commands::execute;
pub use config::{Command, ModelDesc, RunConfig};
pub use error::LabError;
pub use output::{CheckLine, Outcome, Status, Table};
pub use run::{run, RunSummary};

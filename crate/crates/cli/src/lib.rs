//! Command line front end for `pursuit-core`: scenario files, trajectory
//! tables, metadata, SVG plots, exact value tables and batch runs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod artifacts;
pub mod bundled;
pub mod commands;
pub mod error;
pub mod scenario_file;

pub use commands::{BatchSummary, Loaded, RunArtifacts, RunOptions, RunStatus, ValueTable};
pub use error::CliError;
pub use scenario_file::{ParseError, Purpose, ScenarioFile};

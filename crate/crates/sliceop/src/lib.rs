//! File formats, verification tasks and the batch runner behind the
//! `sliceop` command.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fixtures;
pub mod formats;
pub mod runner;
pub mod scan;
pub mod tasks;

pub use error::CliError;
pub use runner::{run_plans, write_artifacts, JobConfig, RunOutput};
pub use tasks::{TaskCtx, TaskPlan};

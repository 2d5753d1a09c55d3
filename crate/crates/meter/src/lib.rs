//! Ingestion, configuration, report bundles and the command-line surface of
//! the AAI meter. The computations live in `aai-core`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod config;
pub mod error;
pub mod ingest;
pub mod pipeline;
pub mod plots;
pub mod runner;
pub mod simulate;

pub use config::Config;
pub use error::{MeterError, Result};
pub use ingest::Inputs;
pub use pipeline::{run_report, ReportBundle, Stages};

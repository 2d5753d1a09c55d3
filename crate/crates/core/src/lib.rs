//! Scoring engine for the Autonomous AI (AAI) scale.
//!
//! Everything in this crate is pure computation over in-memory values and
//! builds without `std`. File formats, the CLI and report bundles live in the
//! `aai-meter` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod axes;
pub mod axis;
pub mod battery;
pub mod composite;
pub mod dynamics;
pub mod error;
pub mod frontier;
pub mod gates;
pub mod num;
pub mod simulate;
pub mod stats;
pub mod trace;

pub use axis::{Anchor, Axis, Preset};
pub use battery::Battery;
pub use error::{Error, Result};
pub use trace::{EpisodeTrace, RevisionEvent};

//! Robust statistics used throughout the engine.

mod bootstrap;
mod isotonic;
mod theil_sen;

pub use bootstrap::{
    bootstrap, percentile_interval, replicate_rng, resample_indices, Bootstrap, BootstrapPlan, Resampling, Runner, Sequential,
};
pub use isotonic::{isotonic_fit, Order};
pub use theil_sen::theil_sen;

/// Difference-in-differences of a revised system against a matched control.
pub fn did_delta(revised_pre: f64, revised_post: f64, control_pre: f64, control_post: f64) -> f64 {
    (revised_post - revised_pre) - (control_post - control_pre)
}

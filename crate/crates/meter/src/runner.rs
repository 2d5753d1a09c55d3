//! Bootstrap scheduling on a rayon pool.

use aai_core::stats::{Runner, Sequential};
use rayon::prelude::*;

/// Runs replicates on the global rayon pool. Results keep replicate order,
/// so output does not depend on the number of threads.
#[derive(Debug, Clone, Copy, Default)]
pub struct Parallel;

impl Runner for Parallel {
    fn run(&self, count: usize, f: &(dyn Fn(usize) -> Option<f64> + Sync)) -> Vec<Option<f64>> {
        (0..count).into_par_iter().map(f).collect()
    }
}

/// `Sequential` for one job, `Parallel` otherwise.
pub fn runner_for(jobs: usize) -> &'static dyn Runner {
    if jobs == 1 {
        &Sequential
    } else {
        &Parallel
    }
}

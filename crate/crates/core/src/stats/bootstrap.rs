//! Seeded percentile bootstrap.
//!
//! Replicate `i` draws from its own ChaCha stream keyed on `(seed, i)`, so the
//! replicate set does not depend on how replicates are scheduled. A
//! [`Runner`] decides the schedule; [`Sequential`] runs them in order.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::num::quantile_sorted;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Resampling {
    Iid,
    /// Circular block bootstrap. Block length defaults to `ceil(n^(1/3))`.
    Block {
        length: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapPlan {
    pub replicates: usize,
    pub level: f64,
    pub resampling: Resampling,
    pub seed: u64,
}

impl Default for BootstrapPlan {
    fn default() -> Self {
        Self { replicates: 1000, level: 0.95, resampling: Resampling::Iid, seed: 0 }
    }
}

impl BootstrapPlan {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn block(mut self) -> Self {
        self.resampling = Resampling::Block { length: None };
        self
    }

    /// Derives an independent plan for a named sub-analysis.
    pub fn derive(&self, salt: u64) -> Self {
        let mut p = *self;
        p.seed = splitmix(self.seed ^ splitmix(salt));
        p
    }
}

/// Executes `count` replicate closures and returns results in index order.
pub trait Runner: Sync {
    fn run(&self, count: usize, f: &(dyn Fn(usize) -> Option<f64> + Sync)) -> Vec<Option<f64>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Runner for Sequential {
    fn run(&self, count: usize, f: &(dyn Fn(usize) -> Option<f64> + Sync)) -> Vec<Option<f64>> {
        (0..count).map(f).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bootstrap {
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
    /// Replicate statistics in replicate order; failed replicates are dropped.
    pub draws: Vec<f64>,
}

impl Bootstrap {
    pub fn point_only(point: f64) -> Self {
        Self { point, lo: point, hi: point, draws: Vec::new() }
    }

    /// Share of replicates satisfying `pred`; `None` without replicates.
    pub fn share(&self, pred: impl Fn(f64) -> bool) -> Option<f64> {
        if self.draws.is_empty() {
            return None;
        }
        Some(self.draws.iter().filter(|d| pred(**d)).count() as f64 / self.draws.len() as f64)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn replicate_rng(seed: u64, replicate: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate as u64);
    rng
}

pub fn resample_indices<R: Rng>(n: usize, mode: Resampling, rng: &mut R) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    match mode {
        Resampling::Iid => (0..n).map(|_| rng.gen_range(0..n)).collect(),
        Resampling::Block { length } => {
            let len = length.unwrap_or_else(|| libm::ceil(libm::cbrt(n as f64)) as usize).clamp(1, n);
            let mut out = Vec::with_capacity(n + len);
            while out.len() < n {
                let start = rng.gen_range(0..n);
                out.extend((0..len).map(|k| (start + k) % n));
            }
            out.truncate(n);
            out
        }
    }
}

/// Percentile interval of the replicate distribution at `level`.
pub fn percentile_interval(draws: &[f64], level: f64) -> Option<(f64, f64)> {
    if draws.is_empty() {
        return None;
    }
    let s = crate::num::sorted(draws);
    let tail = 0.5 * (1.0 - level);
    Some((quantile_sorted(&s, tail), quantile_sorted(&s, 1.0 - tail)))
}

/// Percentile bootstrap of `stat` over `data`.
///
/// Returns `None` when `stat` is undefined on the full sample. With fewer
/// than two observations only the point estimate is reported. The interval
/// is widened if needed so that it always contains the point estimate.
pub fn bootstrap<T, F>(data: &[T], stat: F, plan: &BootstrapPlan, runner: &dyn Runner) -> Option<Bootstrap>
where
    T: Clone + Sync,
    F: Fn(&[T]) -> Option<f64> + Sync,
{
    let point = stat(data)?;
    if data.len() < 2 || plan.replicates == 0 {
        return Some(Bootstrap::point_only(point));
    }
    let n = data.len();
    let replicate = |i: usize| {
        let mut rng = replicate_rng(plan.seed, i);
        let sample: Vec<T> = resample_indices(n, plan.resampling, &mut rng).into_iter().map(|j| data[j].clone()).collect();
        stat(&sample).filter(|v| v.is_finite())
    };
    let draws: Vec<f64> = runner.run(plan.replicates, &replicate).into_iter().flatten().collect();
    let (lo, hi) = percentile_interval(&draws, plan.level).unwrap_or((point, point));
    Some(Bootstrap { point, lo: lo.min(point), hi: hi.max(point), draws })
}

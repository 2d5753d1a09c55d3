//! World-model fidelity: Brier skill against a reference predictor.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::battery::TaskIndex;
use crate::error::{domain, Result};
use crate::trace::EpisodeTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldReading {
    pub score: f64,
    pub brier: f64,
    pub brier_ref: f64,
    pub episodes: usize,
}

/// `1 - min(1, B / max(B_ref, 1e-12))`.
pub fn brier_skill(brier: f64, brier_ref: f64) -> f64 {
    1.0 - (brier / brier_ref.max(1e-12)).min(1.0)
}

/// Every probed task must declare a reference probability.
pub fn world_model(index: &TaskIndex<'_>, traces: &[&EpisodeTrace]) -> Result<Option<WorldReading>> {
    let mut pairs: Vec<(f64, f64, f64)> = Vec::new();
    for t in traces {
        let (Some(p), Some(y)) = (t.stated_prob, t.truth) else { continue };
        let r = index.task(&t.task_id)?.reference_prob.ok_or_else(|| domain!("task `{}` has no reference predictor", t.task_id))?;
        pairs.push((p, y, r));
    }
    if pairs.is_empty() {
        return Ok(None);
    }
    let n = pairs.len() as f64;
    let brier = pairs.iter().map(|(p, y, _)| (p - y) * (p - y)).sum::<f64>() / n;
    let brier_ref = pairs.iter().map(|(_, y, r)| (r - y) * (r - y)).sum::<f64>() / n;
    Ok(Some(WorldReading { score: brier_skill(brier, brier_ref), brier, brier_ref, episodes: pairs.len() }))
}

use alloc::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::axis::{Axis, Weights};
use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub shares: BTreeMap<Axis, f64>,
    /// Set when every weighted elasticity was zero and the budget was split evenly.
    pub uniform_fallback: bool,
}

/// Splits `budget` across axes in proportion to `w_x * eta_x`. Axes without
/// a weight get weight zero.
pub fn suggest_allocation(weights: &Weights, elasticities: &BTreeMap<Axis, f64>, budget: f64) -> Result<Allocation> {
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(domain!("allocation budget must be positive, got {budget}"));
    }
    if elasticities.is_empty() {
        return Err(domain!("no elasticities supplied"));
    }
    if let Some((axis, eta)) = elasticities.iter().find(|(_, e)| !(**e >= 0.0)) {
        return Err(domain!("negative elasticity {eta} on axis {}", axis.letter()));
    }
    let scores: BTreeMap<Axis, f64> = elasticities.iter().map(|(&a, &e)| (a, weights.get(&a).copied().unwrap_or(0.0) * e)).collect();
    let total: f64 = scores.values().sum();
    let uniform_fallback = total <= 0.0;
    let n = scores.len() as f64;
    let mut shares: BTreeMap<Axis, f64> =
        scores.iter().map(|(&a, &s)| (a, if uniform_fallback { budget / n } else { budget * s / total })).collect();
    // Put the rounding residue on the largest share so the split sums to the budget.
    let largest = shares.iter().max_by(|a, b| a.1.total_cmp(b.1)).map(|(&a, _)| a);
    if let Some(axis) = largest {
        let rest: f64 = shares.iter().filter(|(&a, _)| a != axis).map(|(_, v)| v).sum();
        shares.insert(axis, budget - rest);
    }
    Ok(Allocation { shares, uniform_fallback })
}

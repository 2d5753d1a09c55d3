//! Autonomy, planning and generality.

use alloc::vec::Vec;

use crate::battery::{family_aggregate, Battery, FamilyAggregate};
use crate::error::Result;
use crate::num::mean;
use crate::trace::EpisodeTrace;

/// Mean capped horizon `min(a / H, 1)`.
pub fn autonomy(traces: &[&EpisodeTrace], horizon_cap: f64) -> Option<f64> {
    let v: Vec<f64> = traces.iter().map(|t| (t.uninterrupted_actions as f64 / horizon_cap).min(1.0)).collect();
    mean(&v)
}

/// Mean capped plan depth `min(d / D, 1)`.
pub fn planning(traces: &[&EpisodeTrace], depth_anchor: f64) -> Option<f64> {
    let v: Vec<f64> = traces.iter().map(|t| (t.plan_depth as f64 / depth_anchor).min(1.0)).collect();
    mean(&v)
}

/// Fraction of families (with data) whose mean quality clears the threshold.
pub fn generality(battery: &Battery, traces: &[&EpisodeTrace]) -> Result<Option<(f64, Vec<FamilyAggregate>)>> {
    let agg = family_aggregate(battery, traces)?;
    if agg.is_empty() {
        return Ok(None);
    }
    let covered = agg.iter().filter(|f| f.covered).count();
    Ok(Some((covered as f64 / agg.len() as f64, agg)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battery::fixtures::battery;

    fn with_actions(a: &[u64]) -> Vec<EpisodeTrace> {
        a.iter()
            .map(|a| {
                let mut t = EpisodeTrace::new("f0t0", 0.5);
                t.uninterrupted_actions = *a;
                t.plan_depth = *a;
                t
            })
            .collect()
    }

    #[test]
    fn autonomy_caps_horizon() {
        let ts = with_actions(&[5, 10]);
        let refs: Vec<_> = ts.iter().collect();
        assert!((autonomy(&refs, 10.0).unwrap() - 0.75).abs() < 1e-12);
        let ts = with_actions(&[50]);
        let refs: Vec<_> = ts.iter().collect();
        assert_eq!(autonomy(&refs, 10.0), Some(1.0));
        assert_eq!(autonomy(&[], 10.0), None);
    }

    #[test]
    fn planning_depth() {
        let ts = with_actions(&[2, 4]);
        let refs: Vec<_> = ts.iter().collect();
        assert!((planning(&refs, 8.0).unwrap() - 0.375).abs() < 1e-12);
    }

    #[test]
    fn generality_counts_covered_families() {
        let b = battery(4);
        let qs = [0.9, 0.2, 0.8, 0.1];
        let ts: Vec<EpisodeTrace> = qs.iter().enumerate().map(|(f, q)| EpisodeTrace::new(alloc::format!("f{f}t0"), *q)).collect();
        let refs: Vec<_> = ts.iter().collect();
        let (g, agg) = generality(&b, &refs).unwrap().unwrap();
        assert_eq!(g, 0.5);
        assert_eq!(agg.len(), 4);
    }
}

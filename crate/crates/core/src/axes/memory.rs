//! Memory and persistence: exponential retention fit per family.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::battery::TaskIndex;
use crate::error::Result;
use crate::num::{mean, median, ols};
use crate::trace::EpisodeTrace;

/// Quality floor applied before taking logs.
pub const QUALITY_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyPersistence {
    pub family: String,
    /// Fitted decay rate per day.
    pub lambda: f64,
    pub retention: f64,
    pub recall: f64,
    pub score: f64,
    pub half_life_days: Option<f64>,
    pub max_lag_days: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryReading {
    pub score: f64,
    pub families: Vec<FamilyPersistence>,
    /// Families skipped for lack of distinct lags.
    pub skipped: Vec<String>,
    pub max_lag_days: f64,
}

/// `exp(-lambda / lambda_max)`, capped at one for improving retention.
pub fn retention_score(lambda: f64, lambda_max: f64) -> f64 {
    libm::exp(-lambda / lambda_max).min(1.0)
}

/// Decay rate from an OLS fit of `ln q` on lag.
pub fn fit_decay(lags: &[f64], qualities: &[f64]) -> Option<f64> {
    let logs: Vec<f64> = qualities.iter().map(|q| libm::log(q.max(QUALITY_FLOOR))).collect();
    ols(lags, &logs).map(|(slope, _)| -slope)
}

/// Lag at which the mean quality first falls to half its value at the
/// shortest lag, by linear interpolation between observed lags.
pub fn empirical_half_life(lags: &[f64], qualities: &[f64]) -> Option<f64> {
    let mut by_lag: BTreeMap<u64, (f64, f64, usize)> = BTreeMap::new();
    for (l, q) in lags.iter().zip(qualities) {
        let e = by_lag.entry(l.to_bits()).or_insert((*l, 0.0, 0));
        e.1 += q;
        e.2 += 1;
    }
    let mut curve: Vec<(f64, f64)> = by_lag.values().map(|(l, s, n)| (*l, s / *n as f64)).collect();
    curve.sort_by(|a, b| a.0.total_cmp(&b.0));
    let target = 0.5 * curve.first()?.1;
    for w in curve.windows(2) {
        let ((l0, q0), (l1, q1)) = (w[0], w[1]);
        if q1 <= target {
            if q0 == q1 {
                return Some(l0);
            }
            return Some(l0 + (q0 - target) / (q0 - q1) * (l1 - l0));
        }
    }
    None
}

/// Median over families of `(retention + recall) / 2`.
///
/// Recall@K comes from logged retrieval outcomes in the family, falling back
/// to the battery value. Families need at least two distinct lags.
pub fn memory(index: &TaskIndex<'_>, traces: &[&EpisodeTrace]) -> Result<Option<MemoryReading>> {
    let battery = index.battery();
    let mut groups: BTreeMap<usize, Vec<&EpisodeTrace>> = BTreeMap::new();
    for t in traces.iter().filter(|t| t.is_persistence()) {
        groups.entry(index.family_of(&t.task_id)?).or_default().push(t);
    }
    let mut families = Vec::new();
    let mut skipped = Vec::new();
    let mut max_lag = 0.0f64;
    for (f, group) in groups {
        let name = battery.families[f].name.clone();
        let lags: Vec<f64> = group.iter().map(|t| t.lag_days.unwrap_or(0.0)).collect();
        let qs: Vec<f64> = group.iter().map(|t| t.quality).collect();
        let Some(lambda) = fit_decay(&lags, &qs) else {
            skipped.push(name);
            continue;
        };
        let hits: Vec<f64> = group.iter().filter_map(|t| t.retrieval_hit).map(|h| f64::from(u8::from(h))).collect();
        let Some(recall) = mean(&hits).or(battery.recall_at_k) else {
            skipped.push(name);
            continue;
        };
        let retention = retention_score(lambda, battery.lambda_max);
        let family_max = lags.iter().copied().fold(0.0, f64::max);
        max_lag = max_lag.max(family_max);
        families.push(FamilyPersistence {
            family: name,
            lambda,
            retention,
            recall,
            score: 0.5 * (retention + recall),
            half_life_days: empirical_half_life(&lags, &qs),
            max_lag_days: family_max,
        });
    }
    let scores: Vec<f64> = families.iter().map(|f| f.score).collect();
    Ok(median(&scores).map(|score| MemoryReading { score, families, skipped, max_lag_days: max_lag }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retention_anchors() {
        let lm = 0.2;
        assert_eq!(retention_score(0.0, lm), 1.0);
        assert!((retention_score(lm, lm) - libm::exp(-1.0)).abs() < 1e-12);
        assert!((retention_score(lm / 2.0, lm) - libm::exp(-0.5)).abs() < 1e-12);
    }

    #[test]
    fn exact_exponential_recovers_rate() {
        let lags = [0.0, 1.0, 2.0, 5.0];
        let qs: Vec<f64> = lags.iter().map(|l| 0.9 * libm::exp(-0.3 * l)).collect();
        assert!((fit_decay(&lags, &qs).unwrap() - 0.3).abs() < 1e-12);
        let hl = empirical_half_life(&lags, &qs).unwrap();
        assert!(hl > 2.0 && hl < 5.0);
    }

    #[test]
    fn single_lag_family_is_skipped() {
        let b = crate::battery::fixtures::battery(2);
        let idx = b.index();
        let mut ts = Vec::new();
        for (task, lag, q) in [("f0t0", 1.0, 0.8), ("f0t1", 1.0, 0.6), ("f1t0", 0.0, 0.8), ("f1t1", 2.0, 0.4)] {
            let mut t = EpisodeTrace::new(task, q);
            t.lag_days = Some(lag);
            t.retrieval_hit = Some(true);
            ts.push(t);
        }
        let refs: Vec<_> = ts.iter().collect();
        let r = memory(&idx, &refs).unwrap().unwrap();
        assert_eq!(r.skipped, ["f0"]);
        assert_eq!(r.families.len(), 1);
    }
}

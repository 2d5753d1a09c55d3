//! Tool economy: coverage of required categories, success under drift and
//! a log size prior on the tool set.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::battery::TaskIndex;
use crate::error::Result;
use crate::trace::EpisodeTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftSuccess {
    pub drift: String,
    pub magnitude: Option<f64>,
    pub success: f64,
    pub episodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolReading {
    pub score: f64,
    pub coverage: f64,
    pub success: f64,
    pub size_prior: f64,
    pub categories_used: Vec<String>,
    /// Success curve ordered by drift magnitude.
    pub by_drift: Vec<DriftSuccess>,
    /// Success at the mildest nonzero drift present, else the mildest drift.
    pub mild_shift_success: Option<f64>,
}

/// `(coverage * success * size_prior)^(1/3)`.
pub fn tool_score(coverage: f64, success: f64, size_prior: f64) -> f64 {
    libm::cbrt(coverage * success * size_prior)
}

/// `ln(1 + |T|) / ln(1 + S_max)`, capped at one.
pub fn size_prior(tools: usize, size_prior_max: f64) -> f64 {
    (libm::log1p(tools as f64) / libm::log1p(size_prior_max)).min(1.0)
}

pub fn tool_economy(index: &TaskIndex<'_>, traces: &[&EpisodeTrace]) -> Result<Option<ToolReading>> {
    if traces.is_empty() {
        return Ok(None);
    }
    let battery = index.battery();
    let required: BTreeSet<&str> = battery.tasks.iter().flat_map(|t| t.required_tools.iter().map(String::as_str)).collect();
    let used: BTreeSet<&str> = traces.iter().flat_map(|t| t.tool_categories_used.iter().map(String::as_str)).collect();
    let coverage = if required.is_empty() { 1.0 } else { required.intersection(&used).count() as f64 / required.len() as f64 };

    let mut per_drift: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let mut wins = 0usize;
    for t in traces {
        let ok = index.success(t)?;
        wins += usize::from(ok);
        let e = per_drift.entry(t.drift_tag.as_str()).or_default();
        e.0 += usize::from(ok);
        e.1 += 1;
    }
    // Trace-weighted mean of per-drift success rates is the pooled rate.
    let success = wins as f64 / traces.len() as f64;
    let prior = size_prior(used.len(), battery.size_prior_max);

    let magnitude = |tag: &str| battery.drifts.iter().find(|d| d.name == tag).map(|d| d.magnitude);
    let mut by_drift: Vec<DriftSuccess> = per_drift
        .into_iter()
        .map(|(tag, (w, n))| DriftSuccess { drift: tag.into(), magnitude: magnitude(tag), success: w as f64 / n as f64, episodes: n })
        .collect();
    by_drift.sort_by(|a, b| {
        let key = |d: &DriftSuccess| d.magnitude.unwrap_or(f64::INFINITY);
        key(a).total_cmp(&key(b)).then_with(|| a.drift.cmp(&b.drift))
    });
    let known = || by_drift.iter().filter(|d| d.magnitude.is_some());
    let mild_shift_success = known().find(|d| d.magnitude.unwrap_or(0.0) > 0.0).or_else(|| known().next()).map(|d| d.success);

    Ok(Some(ToolReading {
        score: tool_score(coverage, success, prior),
        coverage,
        success,
        size_prior: prior,
        categories_used: used.into_iter().map(String::from).collect(),
        by_drift,
        mild_shift_success,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let s = size_prior(3, 7.0);
        assert!((s - 2.0 / 3.0).abs() < 1e-12);
        assert!((tool_score(0.5, 0.8, s) - 0.643_659).abs() < 1e-5);
    }

    #[test]
    fn coverage_and_success() {
        let mut b = crate::battery::fixtures::battery(1);
        b.tasks[0].required_tools = alloc::vec!["api".into(), "db".into()];
        let idx = b.index();
        let mut t1 = EpisodeTrace::new("f0t0", 0.9);
        t1.tool_categories_used = alloc::vec!["api".into(), "shell".into()];
        let t2 = EpisodeTrace::new("f0t0", 0.1);
        let r = tool_economy(&idx, &[&t1, &t2]).unwrap().unwrap();
        assert_eq!(r.coverage, 0.5);
        assert_eq!(r.success, 0.5);
        assert_eq!(r.categories_used.len(), 2);
        assert_eq!(r.mild_shift_success, Some(0.5));
    }
}

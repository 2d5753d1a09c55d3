//! Autonomy-quality frontier `F(tau)` and the delegability frontier `q*(a)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::stats::{bootstrap, isotonic_fit, theil_sen, BootstrapPlan, Order, Runner};
use crate::trace::EpisodeTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TaskQualities {
    weight: f64,
    sorted: Vec<f64>,
}

impl TaskQualities {
    fn share_at_least(&self, tau: f64) -> f64 {
        let below = self.sorted.partition_point(|&q| q < tau);
        (self.sorted.len() - below) as f64 / self.sorted.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityFrontier {
    /// `(tau, F(tau))` on an even grid over `[0, 1]`.
    pub curve: Vec<[f64; 2]>,
    /// Exact area under the step function, equal to the weighted mean quality.
    pub auf: f64,
    #[serde(skip)]
    tasks: Vec<TaskQualities>,
}

impl QualityFrontier {
    /// Weighted share of runs reaching `tau`.
    pub fn at(&self, tau: f64) -> f64 {
        self.tasks.iter().map(|t| t.weight * t.share_at_least(tau)).sum()
    }

    /// `F_other(tau*) - F_self(tau*)`.
    pub fn shift_to(&self, other: &QualityFrontier, tau_star: f64) -> f64 {
        other.at(tau_star) - self.at(tau_star)
    }
}

/// Builds `F(tau) = sum_t w_t P(q_t >= tau)`. Weights default to uniform over
/// the tasks present and must otherwise cover each of them and sum to 1.
pub fn quality_frontier(traces: &[EpisodeTrace], weights: Option<&BTreeMap<String, f64>>, grid_points: usize) -> Result<QualityFrontier> {
    if traces.is_empty() {
        return Err(Error::Insufficient("quality frontier needs traces".into()));
    }
    if grid_points < 2 {
        return Err(domain!("frontier grid needs at least two points"));
    }
    let mut by_task: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for t in traces {
        if !(0.0..=1.0).contains(&t.quality) {
            return Err(domain!("quality {} outside [0, 1] on task `{}`", t.quality, t.task_id));
        }
        by_task.entry(&t.task_id).or_default().push(t.quality);
    }
    let n = by_task.len() as f64;
    let mut tasks = Vec::with_capacity(by_task.len());
    for (task, mut qs) in by_task {
        let weight = match weights {
            None => 1.0 / n,
            Some(w) => *w.get(task).ok_or_else(|| domain!("no frontier weight for task `{task}`"))?,
        };
        if !(weight >= 0.0) {
            return Err(domain!("negative frontier weight for task `{task}`"));
        }
        qs.sort_by(f64::total_cmp);
        tasks.push(TaskQualities { weight, sorted: qs });
    }
    let total: f64 = tasks.iter().map(|t| t.weight).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(domain!("frontier weights over observed tasks sum to {total}, not 1"));
    }
    let mut f = QualityFrontier { curve: Vec::new(), auf: 0.0, tasks };
    // F is a step function with jumps at the observed qualities.
    let mut levels: Vec<f64> = f.tasks.iter().flat_map(|t| t.sorted.iter().copied()).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut prev = 0.0;
    for q in levels {
        f.auf += (q - prev) * f.at(q);
        prev = q;
    }
    f.curve = (0..grid_points)
        .map(|i| {
            let tau = i as f64 / (grid_points - 1) as f64;
            [tau, f.at(tau)]
        })
        .collect();
    Ok(f)
}

/// One policy evaluated over the battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyRun {
    pub policy: String,
    pub quality: f64,
    pub interventions: f64,
}

/// Intervention allowance `H_max(a) = (1 - a) h_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterventionBudget {
    pub h_max: f64,
}

impl InterventionBudget {
    pub fn new(h_max: f64) -> Result<Self> {
        if !(h_max > 0.0 && h_max.is_finite()) {
            return Err(domain!("h_max must be positive, got {h_max}"));
        }
        Ok(Self { h_max })
    }

    pub fn allowance(&self, a: f64) -> f64 {
        (1.0 - a) * self.h_max
    }
}

pub const DEFAULT_BINS: usize = 11;
pub const MONOTONE_LABEL: &str = "upper-envelope (monotone)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierEstimate {
    pub bins: Vec<f64>,
    /// Best admissible quality per bin before projection.
    pub raw: Vec<Option<f64>>,
    /// Projected frontier, nonincreasing in autonomy demand.
    pub q_star: Vec<Option<f64>>,
    pub lo: Vec<Option<f64>>,
    pub hi: Vec<Option<f64>>,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
}

pub fn even_bins(count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(domain!("need at least two autonomy bins"));
    }
    Ok((0..count).map(|j| j as f64 / (count - 1) as f64).collect())
}

fn raw_frontier(runs: &[PolicyRun], bins: &[f64], budget: InterventionBudget) -> Vec<Option<f64>> {
    bins.iter()
        .map(|&a| {
            let cap = budget.allowance(a) + 1e-12;
            runs.iter().filter(|r| r.interventions <= cap).map(|r| r.quality).reduce(f64::max)
        })
        .collect()
}

/// Nonincreasing projection over the nonempty bins; empty bins stay empty.
fn project(raw: &[Option<f64>]) -> Vec<Option<f64>> {
    let present: Vec<f64> = raw.iter().flatten().copied().collect();
    if present.is_empty() {
        return raw.to_vec();
    }
    let fitted = isotonic_fit(&present, None, Order::Decreasing).unwrap_or(present);
    let mut it = fitted.into_iter();
    raw.iter().map(|v| v.and_then(|_| it.next())).collect()
}

impl FrontierEstimate {
    /// An estimate from known frontier values, with no bands.
    pub fn from_values(bins: Vec<f64>, values: Vec<Option<f64>>) -> Result<Self> {
        if bins.len() != values.len() {
            return Err(Error::Mismatch(format!("{} bins vs {} values", bins.len(), values.len())));
        }
        Ok(Self {
            raw: values.clone(),
            lo: values.clone(),
            hi: values.clone(),
            q_star: values,
            bins,
            label: MONOTONE_LABEL.into(),
            window: None,
        })
    }

    /// Share of bins with at least one admissible run.
    pub fn coverage(&self) -> f64 {
        self.q_star.iter().filter(|v| v.is_some()).count() as f64 / self.q_star.len() as f64
    }
}

/// Best admissible quality per autonomy bin with bootstrap bands over runs.
pub fn delegability_frontier(
    runs: &[PolicyRun],
    budget: InterventionBudget,
    bins: &[f64],
    plan: &BootstrapPlan,
    runner: &dyn Runner,
) -> Result<FrontierEstimate> {
    if runs.is_empty() {
        return Err(Error::Insufficient("delegability frontier needs policy runs".into()));
    }
    if bins.len() < 2 || bins.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(domain!("autonomy bins must lie in [0, 1], at least two"));
    }
    for r in runs {
        if !(0.0..=1.0).contains(&r.quality) || !(r.interventions >= 0.0) {
            return Err(domain!("invalid run for policy `{}`", r.policy));
        }
    }
    let raw = raw_frontier(runs, bins, budget);
    let q_star = project(&raw);
    let mut lo = Vec::with_capacity(bins.len());
    let mut hi = Vec::with_capacity(bins.len());
    for (j, v) in q_star.iter().enumerate() {
        let band = v.and_then(|_| bootstrap(runs, |s| project(&raw_frontier(s, bins, budget))[j], plan, runner));
        lo.push(band.as_ref().map(|b| b.lo));
        hi.push(band.as_ref().map(|b| b.hi));
    }
    Ok(FrontierEstimate { bins: bins.to_vec(), raw, q_star, lo, hi, label: MONOTONE_LABEL.into(), window: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierSummary {
    pub q_target: f64,
    /// Fraction of autonomy demands delegable at the target.
    pub fd: f64,
    /// Area of the frontier above the target.
    pub auf: f64,
    /// False when empty bins were dropped from the integrals.
    pub complete: bool,
}

/// Trapezoid weights over the bin grid.
pub fn trapezoid_weights(bins: &[f64]) -> Vec<f64> {
    let n = bins.len();
    (0..n)
        .map(|j| {
            let left = if j > 0 { bins[j] - bins[j - 1] } else { 0.0 };
            let right = if j + 1 < n { bins[j + 1] - bins[j] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

/// FD and AUF above `q_target` under the bin weighting `nu` (trapezoid by
/// default). Empty bins are dropped and the remaining weights renormalized.
pub fn frontier_summaries(est: &FrontierEstimate, q_target: f64, nu: Option<&[f64]>) -> Result<FrontierSummary> {
    let weights = match nu {
        Some(w) if w.len() != est.bins.len() => {
            return Err(Error::Mismatch(format!("{} weights for {} bins", w.len(), est.bins.len())));
        }
        Some(w) if w.iter().any(|x| !(*x >= 0.0)) => return Err(domain!("negative autonomy weight")),
        Some(w) => w.to_vec(),
        None => trapezoid_weights(&est.bins),
    };
    let present: Vec<(f64, f64)> = est.q_star.iter().zip(&weights).filter_map(|(q, &w)| q.map(|q| (q, w))).collect();
    if present.len() < 2 {
        return Err(Error::Insufficient("frontier summaries need two nonempty bins".into()));
    }
    let total: f64 = present.iter().map(|p| p.1).sum();
    if !(total > 0.0) {
        return Err(domain!("autonomy weights vanish on the nonempty bins"));
    }
    let fd = present.iter().filter(|(q, _)| *q >= q_target).map(|(_, w)| w).sum::<f64>() / total;
    let auf = present.iter().map(|(q, w)| w * (q - q_target).max(0.0)).sum::<f64>() / total;
    Ok(FrontierSummary { q_target, fd, auf, complete: present.len() == est.bins.len() })
}

/// `AUF(later) - AUF(earlier)` at the same target and weighting.
pub fn frontier_shift(earlier: &FrontierEstimate, later: &FrontierEstimate, q_target: f64, nu: Option<&[f64]>) -> Result<f64> {
    if earlier.bins != later.bins {
        return Err(Error::Mismatch("frontier estimates use different bins".into()));
    }
    Ok(frontier_summaries(later, q_target, nu)?.auf - frontier_summaries(earlier, q_target, nu)?.auf)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierSlope {
    pub slope: f64,
    pub lo: f64,
    pub hi: f64,
    pub floor: f64,
    /// Point slope at or above the floor.
    pub passes: bool,
    /// Lower interval bound at or above the floor.
    pub passes_ci: bool,
}

/// Theil-Sen slope of AUF against cumulative resource, checked against `floor`.
pub fn frontier_slope(points: &[(f64, f64)], floor: f64, plan: &BootstrapPlan, runner: &dyn Runner) -> Result<FrontierSlope> {
    if points.len() < 2 {
        return Err(Error::Insufficient("frontier slope needs two points".into()));
    }
    let split = |s: &[(f64, f64)]| -> (Vec<f64>, Vec<f64>) { s.iter().copied().unzip() };
    let (r, y) = split(points);
    theil_sen(&r, &y)?;
    let b = bootstrap(
        points,
        |s| {
            let (r, y) = split(s);
            theil_sen(&r, &y).ok()
        },
        plan,
        runner,
    )
    .ok_or_else(|| Error::Insufficient("frontier slope undefined".into()))?;
    Ok(FrontierSlope { slope: b.point, lo: b.lo, hi: b.hi, floor, passes: b.point >= floor, passes_ci: b.lo >= floor })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Sequential;
    use alloc::vec;

    fn traces(qs: &[(&str, f64)]) -> Vec<EpisodeTrace> {
        qs.iter().map(|(t, q)| EpisodeTrace::new(*t, *q)).collect()
    }

    #[test]
    fn step_function_frontier() {
        let f = quality_frontier(&traces(&[("a", 0.8), ("b", 0.8), ("b", 0.8)]), None, 101).unwrap();
        assert_eq!(f.auf, 0.8);
        assert_eq!(f.at(0.8), 1.0);
        assert_eq!(f.at(0.8 + 1e-12), 0.0);
        let zero = quality_frontier(&traces(&[("a", 0.0)]), None, 11).unwrap();
        assert_eq!(zero.auf, 0.0);
        assert_eq!(f.shift_to(&f, 0.5), 0.0);
        assert!(quality_frontier(&[], None, 11).is_err());
    }

    #[test]
    fn weights_must_sum_to_one() {
        let t = traces(&[("a", 0.2), ("b", 0.6)]);
        let w: BTreeMap<String, f64> = [("a".into(), 0.25), ("b".into(), 0.75)].into_iter().collect();
        let f = quality_frontier(&t, Some(&w), 11).unwrap();
        assert!((f.auf - 0.5).abs() < 1e-12);
        assert!((f.at(0.5) - 0.75).abs() < 1e-12);
        let bad: BTreeMap<String, f64> = [("a".into(), 0.5), ("b".into(), 0.6)].into_iter().collect();
        assert!(quality_frontier(&t, Some(&bad), 11).is_err());
    }

    fn run(h: f64, q: f64) -> PolicyRun {
        PolicyRun { policy: "p".into(), quality: q, interventions: h }
    }

    #[test]
    fn delegability_examples() {
        let bins = even_bins(DEFAULT_BINS).unwrap();
        let budget = InterventionBudget::new(4.0).unwrap();
        let plan = BootstrapPlan { replicates: 50, ..BootstrapPlan::default() };
        let est = delegability_frontier(&[run(0.0, 0.9)], budget, &bins, &plan, &Sequential).unwrap();
        assert!(est.q_star.iter().all(|q| *q == Some(0.9)));
        let est = delegability_frontier(&[run(0.0, 0.6), run(4.0, 0.9)], budget, &bins, &plan, &Sequential).unwrap();
        assert_eq!(est.q_star[0], Some(0.9));
        assert_eq!(est.q_star[10], Some(0.6));
        assert!(est.q_star.windows(2).all(|w| w[1] <= w[0]));
        assert!(delegability_frontier(&[], budget, &bins, &plan, &Sequential).is_err());
    }

    #[test]
    fn empty_bins_are_flagged() {
        let bins = even_bins(DEFAULT_BINS).unwrap();
        let est =
            delegability_frontier(&[run(1.0, 0.7)], InterventionBudget::new(2.0).unwrap(), &bins, &BootstrapPlan::default(), &Sequential)
                .unwrap();
        assert_eq!(est.q_star[5], Some(0.7));
        assert_eq!(est.q_star[6], None);
        let s = frontier_summaries(&est, 0.65, None).unwrap();
        assert!(!s.complete);
        assert!((s.fd - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_frontier_integrals() {
        let bins = even_bins(DEFAULT_BINS).unwrap();
        let est = FrontierEstimate::from_values(bins.clone(), vec![Some(0.9); 11]).unwrap();
        let s = frontier_summaries(&est, 0.65, None).unwrap();
        assert!((s.fd - 1.0).abs() < 1e-9 && (s.auf - 0.25).abs() < 1e-9);
        let low = FrontierEstimate::from_values(bins.clone(), vec![Some(0.5); 11]).unwrap();
        let s = frontier_summaries(&low, 0.65, None).unwrap();
        assert_eq!((s.fd, s.auf), (0.0, 0.0));
        assert!(frontier_shift(&low, &est, 0.65, None).unwrap() > 0.0);
        let other = FrontierEstimate::from_values(even_bins(5).unwrap(), vec![Some(0.5); 5]).unwrap();
        assert!(frontier_shift(&other, &est, 0.65, None).is_err());
    }

    #[test]
    fn slope_examples() {
        let plan = BootstrapPlan { replicates: 100, ..BootstrapPlan::default() };
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 0.2 + 0.01 * i as f64)).collect();
        let s = frontier_slope(&pts, 0.005, &plan, &Sequential).unwrap();
        assert!((s.slope - 0.01).abs() < 1e-12 && s.passes);
        let flat: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 0.3)).collect();
        let s = frontier_slope(&flat, 0.001, &plan, &Sequential).unwrap();
        assert!(!s.passes);
        assert!(frontier_slope(&flat, 0.0, &plan, &Sequential).unwrap().passes);
        assert!(frontier_slope(&[(1.0, 0.2), (1.0, 0.3)], 0.0, &plan, &Sequential).is_err());
    }
}

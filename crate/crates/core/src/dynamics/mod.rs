//! Self-improvement dynamics: improvement rates, curvature and reachability.

mod lambda;
mod link;
mod local;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use lambda::{calibrate_cutpoints, combine, label, lambda_score, momentum, Cutpoint, Exemplar, LambdaConfig, LambdaForm, LambdaScore};
pub use link::{step_operator, Link, Normalizer, Step};
pub use local::{evaluation_points, local_quadratic, LocalFit};

use crate::error::{domain, Error, Result};
use crate::num::median;
use crate::stats::{bootstrap, theil_sen, Bootstrap, BootstrapPlan, Runner};

/// Margin used to keep capability inside the open unit interval.
pub const CLAMP_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    /// Wall-clock time in days.
    pub t: f64,
    /// Cumulative agent-initiated resource.
    pub resource: f64,
    pub capability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointSeries {
    pub family: Option<String>,
    pub points: Vec<Checkpoint>,
    /// Set when any capability had to be clamped into the open interval.
    pub clamped: bool,
}

impl CheckpointSeries {
    pub fn new(family: Option<String>, mut points: Vec<Checkpoint>) -> Result<Self> {
        for w in points.windows(2) {
            if w[1].t <= w[0].t {
                return Err(domain!("checkpoint times must increase strictly ({} then {})", w[0].t, w[1].t));
            }
            if w[1].resource < w[0].resource {
                return Err(domain!("cumulative resource decreased at t = {}", w[1].t));
            }
        }
        let mut clamped = false;
        for p in &mut points {
            if !p.capability.is_finite() || !p.resource.is_finite() {
                return Err(domain!("non-finite checkpoint at t = {}", p.t));
            }
            let c = p.capability.clamp(CLAMP_MARGIN, 1.0 - CLAMP_MARGIN);
            clamped |= c != p.capability;
            p.capability = c;
        }
        Ok(Self { family, points, clamped })
    }

    pub fn resources(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.resource).collect()
    }

    pub fn capabilities(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.capability).collect()
    }

    pub fn span_days(&self) -> f64 {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }

    pub fn max_gap_days(&self) -> f64 {
        self.points.windows(2).map(|w| w[1].t - w[0].t).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaMethod {
    #[default]
    TheilSen,
    FdMedian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaEstimate {
    pub method: KappaMethod,
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
    pub theil_sen: f64,
    pub fd_median: Option<f64>,
}

/// Median of consecutive finite differences, skipping pairs with equal resource.
pub fn fd_median(points: &[Checkpoint]) -> Option<f64> {
    let d: Vec<f64> = points
        .windows(2)
        .filter(|w| w[1].resource != w[0].resource)
        .map(|w| (w[1].capability - w[0].capability) / (w[1].resource - w[0].resource))
        .collect();
    median(&d)
}

fn ts_slope(points: &[Checkpoint]) -> Option<f64> {
    let r: Vec<f64> = points.iter().map(|p| p.resource).collect();
    let c: Vec<f64> = points.iter().map(|p| p.capability).collect();
    theil_sen(&r, &c).ok()
}

/// Improvement rate `dC/dR` with a bootstrap interval over checkpoints.
pub fn kappa_estimate(series: &CheckpointSeries, method: KappaMethod, plan: &BootstrapPlan, runner: &dyn Runner) -> Result<KappaEstimate> {
    let ts = ts_slope(&series.points).ok_or_else(|| Error::Insufficient("kappa needs two checkpoints with distinct resource".into()))?;
    let fd = fd_median(&series.points);
    let boot: Bootstrap = match method {
        KappaMethod::TheilSen => bootstrap(&series.points, ts_slope, plan, runner),
        KappaMethod::FdMedian => bootstrap(
            &series.points,
            |s: &[Checkpoint]| {
                let mut v = s.to_vec();
                v.sort_by(|a, b| a.t.total_cmp(&b.t));
                fd_median(&v)
            },
            plan,
            runner,
        ),
    }
    .ok_or_else(|| Error::Insufficient("no finite differences with distinct resource".into()))?;
    Ok(KappaEstimate { method, point: boot.point, lo: boot.lo, hi: boot.hi, theil_sen: ts, fd_median: fd })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowRates {
    pub kappa_bar: f64,
    pub velocity: f64,
    pub kappa_time: f64,
}

/// Average rates between the first and last checkpoints inside `[t1, t2]`.
/// `None` (window omitted) when no resource was spent.
pub fn window_rates(series: &CheckpointSeries, t1: f64, t2: f64) -> Option<WindowRates> {
    let inside: Vec<&Checkpoint> = series.points.iter().filter(|p| p.t >= t1 && p.t <= t2).collect();
    let (a, b) = (inside.first()?, inside.last()?);
    rates_between(a, b)
}

pub fn rates_between(a: &Checkpoint, b: &Checkpoint) -> Option<WindowRates> {
    let dr = b.resource - a.resource;
    let dt = b.t - a.t;
    if dr <= 0.0 || dt <= 0.0 {
        return None;
    }
    let kappa_bar = (b.capability - a.capability) / dr;
    let velocity = dr / dt;
    Some(WindowRates { kappa_bar, velocity, kappa_time: kappa_bar * velocity })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowKappa {
    pub start: f64,
    pub end: f64,
    pub kappa: Option<f64>,
}

/// Theil-Sen slope in every full window of `days` starting at a checkpoint.
pub fn rolling_kappa(series: &CheckpointSeries, days: f64) -> Vec<WindowKappa> {
    let Some(last) = series.points.last().map(|p| p.t) else {
        return Vec::new();
    };
    series
        .points
        .iter()
        .filter(|p| p.t + days <= last + 1e-9)
        .map(|p| {
            let inside: Vec<Checkpoint> = series.points.iter().filter(|q| q.t >= p.t && q.t <= p.t + days + 1e-9).copied().collect();
            WindowKappa { start: p.t, end: p.t + days, kappa: ts_slope(&inside) }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureEstimate {
    pub fit: LocalFit,
    pub slope_ci: [f64; 2],
    pub curvature_ci: [f64; 2],
    /// Bootstrap share of replicates with nonnegative curvature.
    pub prob_nonnegative: Option<f64>,
    pub elasticity: Option<f64>,
}

/// Local quadratic on the link scale with block-bootstrap intervals.
pub fn local_curvature(
    series: &CheckpointSeries,
    link: Link,
    center: f64,
    fraction: f64,
    plan: &BootstrapPlan,
    runner: &dyn Runner,
) -> Result<CurvatureEstimate> {
    let pts: Vec<(f64, f64)> = series.points.iter().map(|p| (p.resource, link.apply(p.capability))).collect();
    let split = |s: &[(f64, f64)]| -> (Vec<f64>, Vec<f64>) { s.iter().copied().unzip() };
    let (r, y) = split(&pts);
    let fit = local_quadratic(&r, &y, center, fraction)?;
    let refit = |s: &[(f64, f64)]| {
        let (r, y) = split(s);
        local_quadratic(&r, &y, center, fraction).ok()
    };
    let slope = bootstrap(&pts, |s| refit(s).map(|f| f.slope), plan, runner);
    let curv = bootstrap(&pts, |s| refit(s).map(|f| f.curvature), plan, runner);
    let ci = |b: &Option<Bootstrap>, v: f64| b.as_ref().map_or([v, v], |b| [b.lo, b.hi]);
    Ok(CurvatureEstimate {
        slope_ci: ci(&slope, fit.slope),
        curvature_ci: ci(&curv, fit.curvature),
        prob_nonnegative: curv.as_ref().and_then(|b| b.share(|d| d >= 0.0)),
        elasticity: meta_elasticity(center, fit.slope, fit.curvature),
        fit,
    })
}

/// Resource-based rate and curvature from time-based ones, given spend rate `r = dR/dt`.
pub fn convert_time_to_resource(kappa_t: f64, delta_kappa_t: f64, r: f64, r_prime: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(domain!("spend rate must be positive, got {r}"));
    }
    Ok((kappa_t / r, delta_kappa_t / (r * r) - kappa_t * r_prime / (r * r * r)))
}

/// `R * dk / k`, undefined unless the link-rate is positive.
pub fn meta_elasticity(resource: f64, kappa_tilde: f64, delta_kappa_tilde: f64) -> Option<f64> {
    (kappa_tilde > 0.0).then(|| resource * delta_kappa_tilde / kappa_tilde)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeBounds {
    pub resource: f64,
    pub time: Option<f64>,
}

/// Resource (and time, given a minimum spend rate) to reach `1 - eps` at a
/// link-rate of at least `v_esc`.
pub fn escape_bounds(c0: f64, eps: f64, v_esc: f64, r_min: Option<f64>, link: Link) -> Result<EscapeBounds> {
    if !(v_esc > 0.0) {
        return Err(domain!("escape velocity must be positive"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain!("eps must lie in (0, 1)"));
    }
    if let Some(r) = r_min {
        if !(r > 0.0) {
            return Err(domain!("minimum spend rate must be positive"));
        }
    }
    let resource = if c0 >= 1.0 - eps { 0.0 } else { (link.apply(1.0 - eps) - link.apply(c0)) / v_esc };
    Ok(EscapeBounds { resource, time: r_min.map(|r| resource / r) })
}

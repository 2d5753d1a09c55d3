//! Numeric demonstration of monotone progression from AAI-3 to AAI-5.
//!
//! The normalized rate follows `dk/dR = a (1 - k)^beta`, integrated with RK4
//! and step doubling. Capability is coupled through `kappa = psi^-1(k)` and
//! `dC/dR = kappa`, clipped below 1. Axes, family margins and the innovation
//! index grow linearly in resource at the configured slopes.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::axis::Axis;
use crate::dynamics::{step_operator, Link, Normalizer};
use crate::error::{domain, Result};
use crate::gates::{GateConfig, Threshold};

/// Largest capability the coupling reaches.
pub const C_MAX: f64 = 1.0 - 1e-12;
const MIN_STEP: f64 = 1e-13;
const BISECT_ITERS: usize = 200;

/// Rate-escape law `dk/dR = a (1 - k)^beta` on the normalized rate `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEscape {
    pub a: f64,
    pub beta: f64,
}

impl RateEscape {
    pub fn check(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(domain!("rate-escape a must be positive, got {}", self.a));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(domain!("rate-escape beta must lie in (0, 1), got {}", self.beta));
        }
        Ok(())
    }

    pub fn rhs(&self, kbar: f64) -> f64 {
        self.a * libm::pow((1.0 - kbar).max(0.0), self.beta)
    }

    fn rk4(&self, k: f64, h: f64) -> f64 {
        let k1 = self.rhs(k);
        let k2 = self.rhs(k + 0.5 * h * k1);
        let k3 = self.rhs(k + 0.5 * h * k2);
        let k4 = self.rhs(k + h * k3);
        (k + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).min(1.0)
    }

    /// Adaptive step from `k` with trial size `h`: returns the accepted
    /// size, the new state and the suggested next size.
    fn adaptive(&self, k: f64, mut h: f64, h_max: f64, tol: f64) -> (f64, f64, f64) {
        loop {
            let full = self.rk4(k, h);
            let half = self.rk4(self.rk4(k, 0.5 * h), 0.5 * h);
            let err = (half - full).abs() / 15.0;
            if err <= tol || h <= MIN_STEP {
                let next = if err < tol / 32.0 { (2.0 * h).min(h_max) } else { h };
                return (h, half, next);
            }
            h *= 0.5;
        }
    }
}

/// First resource at which `k` reaches `target`, or `None` within `budget`.
pub fn rate_escape_hit(law: RateEscape, kbar0: f64, target: f64, budget: f64, h_max: f64, tol: f64) -> Result<Option<f64>> {
    law.check()?;
    if !(0.0..1.0).contains(&kbar0) || !(target > kbar0 && target <= 1.0) {
        return Err(domain!("need 0 <= k0 < target <= 1"));
    }
    if !(h_max > 0.0 && tol > 0.0 && budget > 0.0) {
        return Err(domain!("budget, step size and tolerance must be positive"));
    }
    let (mut r, mut k, mut h) = (0.0, kbar0, h_max);
    while r < budget {
        let (taken, next, suggest) = law.adaptive(k, h.min(budget - r), h_max, tol);
        if next >= target {
            let (mut lo, mut hi) = (0.0, taken);
            for _ in 0..BISECT_ITERS {
                let mid = 0.5 * (lo + hi);
                if law.rk4(k, mid) >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo <= f64::EPSILON * (r + hi) {
                    break;
                }
            }
            return Ok(Some(r + hi));
        }
        r += taken;
        k = next;
        h = suggest;
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgressionSpec {
    pub escape: RateEscape,
    pub normalizer: Normalizer,
    /// Floor on resource accrual per day, used for the time bounds.
    pub r_min: f64,
    pub kappa_bar0: f64,
    pub c0: f64,
    /// Axis levels at `R = 0`; must cover every axis of the AAI-4 row.
    pub axes0: BTreeMap<Axis, f64>,
    /// Slopes while an axis is below its AAI-4 threshold.
    pub rho4: BTreeMap<Axis, f64>,
    /// Slopes between the AAI-4 threshold and the AAI-5 floor.
    pub rho5: BTreeMap<Axis, f64>,
    /// Standardized margins over human experts at `R = 0`, one per family.
    pub margins0: Vec<f64>,
    pub mu: Vec<f64>,
    pub innovation0: f64,
    pub innovation_rate: f64,
    pub gates: GateConfig,
    pub budget: f64,
    pub h_max: f64,
    pub tol: f64,
    /// Spacing of recorded trajectory points.
    pub record_step: f64,
}

impl ProgressionSpec {
    /// A spec that satisfies every hypothesis of the progression argument.
    pub fn demo() -> Self {
        use Axis::*;
        let axes0 = [(A, 0.75), (G, 0.5), (P, 0.7), (M, 0.7), (T, 0.7), (R, 0.4), (S, 0.5), (W, 0.75), (Dollar, 0.6)];
        let rho4 = [A, G, P, M, T, R, S, W, Dollar].into_iter().map(|x| (x, 0.02)).collect();
        let rho5 = [S, W, Dollar].into_iter().map(|x| (x, 0.01)).collect();
        Self {
            escape: RateEscape { a: 0.05, beta: 0.5 },
            normalizer: Normalizer::MichaelisMenten { half: 0.01 },
            r_min: 1.0,
            kappa_bar0: 0.1,
            c0: 0.6,
            axes0: axes0.into_iter().collect(),
            rho4,
            rho5,
            margins0: alloc::vec![0.5; 6],
            mu: alloc::vec![0.05, 0.06, 0.07, 0.08, 0.09, 0.1],
            innovation0: 0.3,
            innovation_rate: 0.02,
            gates: GateConfig::new(0.01),
            budget: 100.0,
            h_max: 0.01,
            tol: 1e-10,
            record_step: 0.5,
        }
    }

    fn aai4_row(&self) -> &BTreeMap<Axis, Threshold> {
        &self.gates.thresholds.aai4
    }

    fn aai5_floor(&self, axis: Axis) -> Option<f64> {
        let f = &self.gates.aai5;
        match axis {
            Axis::S => Some(f.sociality),
            Axis::E => Some(f.embodiment),
            Axis::W => Some(f.world),
            Axis::Dollar => Some(f.economics),
            _ => None,
        }
    }

    pub fn check(&self) -> Result<()> {
        self.escape.check()?;
        self.normalizer.check()?;
        self.gates.check()?;
        if !(self.r_min > 0.0) {
            return Err(domain!("r_min must be positive"));
        }
        if !(0.0..1.0).contains(&self.kappa_bar0) {
            return Err(domain!("initial normalized rate must lie in [0, 1)"));
        }
        if !(self.c0 > 0.0 && self.c0 < 1.0) {
            return Err(domain!("initial capability must lie in (0, 1)"));
        }
        for axis in self.aai4_row().keys() {
            match self.axes0.get(axis) {
                Some(v) if (0.0..=1.0).contains(v) => {}
                _ => return Err(domain!("axes0 needs a value in [0, 1] for {}", axis.letter())),
            }
        }
        let slopes = self.rho4.values().chain(self.rho5.values()).chain(&self.mu);
        if slopes.into_iter().any(|s| !(*s >= 0.0 && s.is_finite())) || !(self.innovation_rate >= 0.0) {
            return Err(domain!("slopes and growth rates must be nonnegative"));
        }
        if self.margins0.is_empty() || self.margins0.len() != self.mu.len() {
            return Err(domain!("margins0 and mu must be nonempty and of equal length"));
        }
        if !(self.budget > 0.0 && self.h_max > 0.0 && self.tol > 0.0 && self.record_step > 0.0) {
            return Err(domain!("budget, step size, tolerance and record step must be positive"));
        }
        Ok(())
    }

    /// Every slope the gates depend on is positive.
    pub fn hypotheses_hold(&self) -> bool {
        let pos = |m: &BTreeMap<Axis, f64>, x: &Axis| m.get(x).is_some_and(|v| *v > 0.0);
        self.aai4_row().keys().all(|x| pos(&self.rho4, x))
            && self.aai4_row().keys().filter(|x| self.aai5_floor(**x).is_some()).all(|x| pos(&self.rho5, x))
            && self.mu.iter().all(|m| *m > 0.0)
            && self.innovation_rate > 0.0
            && self.r_min > 0.0
    }

    /// Axis value at resource `r`: the AAI-4 slope up to the AAI-4
    /// threshold, then the AAI-5 slope up to the AAI-5 floor.
    pub fn axis_at(&self, axis: Axis, r: f64) -> f64 {
        let x0 = self.axes0.get(&axis).copied().unwrap_or(0.0);
        let t4 = self.aai4_row().get(&axis).map_or(x0, |t| target_value(*t)).max(x0);
        let t5 = self.aai5_floor(axis).map_or(t4, |f| f.max(t4));
        let rho4 = self.rho4.get(&axis).copied().unwrap_or(0.0);
        let rho5 = self.rho5.get(&axis).copied().unwrap_or(0.0);
        if rho4 == 0.0 || x0 + rho4 * r <= t4 {
            return (x0 + rho4 * r).min(t4).min(1.0);
        }
        let r4 = (t4 - x0) / rho4;
        (t4 + rho5 * (r - r4)).min(t5).min(1.0)
    }
}

fn target_value(t: Threshold) -> f64 {
    match t {
        Threshold::AtLeast(v) => v,
        Threshold::Above { above } => above + 1e-9,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProgressionPoint {
    pub r: f64,
    pub kappa_bar: f64,
    pub kappa: f64,
    pub capability: f64,
    /// `g'(C) kappa`.
    pub link_rate: f64,
    pub aai4: bool,
    pub aai5: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum ProgressionStatus {
    Attained,
    BudgetExceeded { level: u8 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgressionResult {
    pub trajectory: Vec<ProgressionPoint>,
    pub r4: Option<f64>,
    pub r5: Option<f64>,
    /// Time bounds `R / r_min` in days.
    pub t4_bound: Option<f64>,
    pub t5_bound: Option<f64>,
    pub c4_target: f64,
    pub c5_target: Option<f64>,
    pub status: ProgressionStatus,
    pub hypotheses_hold: bool,
    pub coupling: &'static str,
}

#[derive(Debug, Clone, Copy)]
struct State {
    r: f64,
    kbar: f64,
    c: f64,
}

struct Model<'a> {
    spec: &'a ProgressionSpec,
    link: Link,
    kappa_star: f64,
    c4_target: f64,
}

impl Model<'_> {
    fn kappa(&self, kbar: f64) -> f64 {
        self.spec.normalizer.inverse(kbar.min(C_MAX)).unwrap_or(0.0).max(0.0)
    }

    /// `d kappa / d kbar`, zero where the floor at 0 binds.
    fn kappa_slope(&self, kbar: f64) -> f64 {
        let k = kbar.min(C_MAX);
        if self.kappa(k) <= 0.0 {
            return 0.0;
        }
        match self.spec.normalizer {
            Normalizer::MichaelisMenten { half } => half / ((1.0 - k) * (1.0 - k)),
            Normalizer::Logistic { scale } => scale / (k * (1.0 - k)),
        }
    }

    /// RK4 step on `(kbar, C)`; C integrates `kappa` and is clipped.
    fn step(&self, s: State, h: f64) -> State {
        let law = &self.spec.escape;
        let f = |k: f64| law.rhs(k);
        let k1 = f(s.kbar);
        let kb2 = (s.kbar + 0.5 * h * k1).min(1.0);
        let k2 = f(kb2);
        let kb3 = (s.kbar + 0.5 * h * k2).min(1.0);
        let k3 = f(kb3);
        let kb4 = (s.kbar + h * k3).min(1.0);
        let k4 = f(kb4);
        let kbar = (s.kbar + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).min(1.0);
        let dc = h / 6.0 * (self.kappa(s.kbar) + 2.0 * self.kappa(kb2) + 2.0 * self.kappa(kb3) + self.kappa(kb4));
        State { r: s.r + h, kbar, c: (s.c + dc).min(C_MAX) }
    }

    fn link_rate(&self, s: &State) -> f64 {
        self.link.derivative(s.c) * self.kappa(s.kbar)
    }

    /// Sign-relevant `d kappa_tilde / dR` from the chain rule.
    fn link_rate_slope(&self, s: &State) -> f64 {
        let kappa = self.kappa(s.kbar);
        let second = match self.link {
            Link::Surprisal => 1.0 / ((1.0 - s.c) * (1.0 - s.c)),
            Link::Logit => {
                let v = s.c * (1.0 - s.c);
                (2.0 * s.c - 1.0) / (v * v)
            }
        };
        let dc = if s.c >= C_MAX { 0.0 } else { kappa };
        second * kappa * dc + self.link.derivative(s.c) * self.kappa_slope(s.kbar) * self.spec.escape.rhs(s.kbar)
    }

    fn aai4(&self, s: &State) -> bool {
        self.spec.aai4_row().iter().all(|(x, t)| t.holds(self.spec.axis_at(*x, s.r)))
            && self.link_rate(s) >= self.kappa_star
            && s.c >= self.c4_target
    }

    fn aai5(&self, s: &State, c5_target: f64) -> bool {
        let spec = self.spec;
        let g = &spec.gates;
        let covered = spec.margins0.iter().zip(&spec.mu).filter(|(m, mu)| *m + *mu * s.r >= g.zeta).count();
        let floors = spec.axes0.keys().filter_map(|x| spec.aai5_floor(*x).map(|f| (*x, f))).all(|(x, f)| spec.axis_at(x, s.r) >= f);
        self.aai4(s)
            && covered as f64 >= g.coverage_floor * spec.margins0.len() as f64
            && self.link_rate_slope(s) >= 0.0
            && floors
            && spec.innovation0 + spec.innovation_rate * s.r >= g.innovation.floor
            && s.c >= c5_target
    }

    /// Smallest sub-step from `s` within `(0, h]` where `pred` holds.
    fn first_hit(&self, s: State, h: f64, pred: impl Fn(&State) -> bool) -> State {
        let (mut lo, mut hi) = (0.0, h);
        for _ in 0..BISECT_ITERS {
            let mid = 0.5 * (lo + hi);
            if pred(&self.step(s, mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * (s.r + hi).max(1.0) {
                break;
            }
        }
        self.step(s, hi)
    }

    fn point(&self, s: &State, aai4: bool, aai5: bool) -> ProgressionPoint {
        ProgressionPoint { r: s.r, kappa_bar: s.kbar, kappa: self.kappa(s.kbar), capability: s.c, link_rate: self.link_rate(s), aai4, aai5 }
    }
}

fn capped_step(c: f64, link: Link, step: crate::dynamics::Step) -> Result<f64> {
    Ok(step_operator(c.min(C_MAX), link, step)?.min(C_MAX))
}

pub fn simulate_progression(spec: &ProgressionSpec) -> Result<ProgressionResult> {
    spec.check()?;
    let link = spec.gates.step.link;
    let step = spec.gates.step.step;
    let model = Model { spec, link, kappa_star: spec.gates.kappa_star()?, c4_target: capped_step(spec.c0, link, step)? };

    let mut s = State { r: 0.0, kbar: spec.kappa_bar0, c: spec.c0 };
    let mut h = spec.h_max;
    let mut r4: Option<f64> = None;
    let mut r5: Option<f64> = None;
    let mut c5_target: Option<f64> = None;
    let mut trajectory = Vec::new();
    let mut next_record = 0.0;

    let check = |s: &State, r4: &mut Option<f64>, c5: &mut Option<f64>| -> Result<()> {
        if r4.is_none() && model.aai4(s) {
            *r4 = Some(s.r);
            *c5 = Some(capped_step(capped_step(s.c, link, step)?, link, step)?);
        }
        Ok(())
    };
    check(&s, &mut r4, &mut c5_target)?;
    if let Some(t) = c5_target {
        if model.aai5(&s, t) {
            r5 = Some(0.0);
        }
    }

    while r5.is_none() && s.r < spec.budget {
        if s.r >= next_record {
            let a5 = c5_target.is_some_and(|t| model.aai5(&s, t));
            trajectory.push(model.point(&s, r4.is_some(), a5));
            next_record += spec.record_step;
        }
        let trial = h.min(spec.budget - s.r);
        let (taken, next, suggest) = adaptive(&model, s, trial, spec.h_max, spec.tol);
        if r4.is_none() && model.aai4(&next) {
            let hit = model.first_hit(s, taken, |x| model.aai4(x));
            check(&hit, &mut r4, &mut c5_target)?;
            s = hit;
            h = suggest;
            continue;
        }
        if let Some(t) = c5_target {
            if model.aai5(&next, t) {
                let hit = model.first_hit(s, taken, |x| model.aai5(x, t));
                r5 = Some(hit.r);
                s = hit;
                break;
            }
        }
        s = next;
        h = suggest;
    }
    trajectory.push(model.point(&s, r4.is_some(), r5.is_some()));

    let status = match (r4, r5) {
        (Some(_), Some(_)) => ProgressionStatus::Attained,
        (None, _) => ProgressionStatus::BudgetExceeded { level: 4 },
        (Some(_), None) => ProgressionStatus::BudgetExceeded { level: 5 },
    };
    Ok(ProgressionResult {
        trajectory,
        r4,
        r5,
        t4_bound: r4.map(|r| r / spec.r_min),
        t5_bound: r5.map(|r| r / spec.r_min),
        c4_target: model.c4_target,
        c5_target,
        status,
        hypotheses_hold: spec.hypotheses_hold(),
        coupling: "kappa = psi^-1(kappa_bar), dC/dR = kappa, C clipped at 1 - 1e-12",
    })
}

fn adaptive(model: &Model<'_>, s: State, mut h: f64, h_max: f64, tol: f64) -> (f64, State, f64) {
    loop {
        let full = model.step(s, h);
        let half = model.step(model.step(s, 0.5 * h), 0.5 * h);
        let err = (half.kbar - full.kbar).abs() / 15.0;
        if err <= tol || h <= MIN_STEP {
            let next = if err < tol / 32.0 { (2.0 * h).min(h_max) } else { h };
            return (h, half, next);
        }
        h *= 0.5;
    }
}

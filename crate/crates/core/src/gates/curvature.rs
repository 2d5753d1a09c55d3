//! Acceleration and diminishing-returns gates, and the M1-M3 milestones.

use alloc::format;
use alloc::string::String;

use serde::{Deserialize, Serialize};

use super::{FamilyDynamics, Outcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateCheck {
    pub outcome: Outcome,
    pub detail: String,
}

impl GateCheck {
    pub(crate) fn new(outcome: Outcome, detail: String) -> Self {
        Self { outcome, detail }
    }

    pub(crate) fn from_bool(ok: bool, detail: String) -> Self {
        Self::new(if ok { Outcome::Pass } else { Outcome::Fail }, detail)
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureVerdicts {
    pub acceleration: GateCheck,
    pub diminishing: GateCheck,
    pub m1: GateCheck,
    pub m2: GateCheck,
    pub m3: GateCheck,
}

/// `P(dk >= 0) >= 1 - alpha` on at least `required` families.
pub fn acceleration_gate(families: &[FamilyDynamics], alpha: f64, required: usize) -> GateCheck {
    count_gate(families, required, |f| f.curvature.as_ref().and_then(|c| c.prob_nonnegative).map(|p| p >= 1.0 - alpha), "P(dk >= 0)")
}

/// Curvature at or above `-gamma` on every family.
pub fn diminishing_bound(families: &[FamilyDynamics], gamma: f64) -> GateCheck {
    if families.is_empty() {
        return GateCheck::new(Outcome::Insufficient, "no family dynamics".into());
    }
    let mut worst = f64::INFINITY;
    for f in families {
        match f.curvature.as_ref() {
            Some(c) => worst = worst.min(c.delta_kappa_tilde),
            None => return GateCheck::new(Outcome::Insufficient, format!("no curvature for family `{}`", f.family)),
        }
    }
    GateCheck::from_bool(worst >= -gamma, format!("min curvature {worst} vs bound -{gamma}"))
}

fn count_gate(families: &[FamilyDynamics], required: usize, test: impl Fn(&FamilyDynamics) -> Option<bool>, what: &str) -> GateCheck {
    let mut hits = 0;
    let mut missing = 0;
    for f in families {
        match test(f) {
            Some(true) => hits += 1,
            Some(false) => {}
            None => missing += 1,
        }
    }
    let detail = format!("{what} holds on {hits} of {} families (need {required})", families.len());
    if hits >= required {
        GateCheck::new(Outcome::Pass, detail)
    } else if hits + missing >= required {
        GateCheck::new(Outcome::Insufficient, detail)
    } else {
        GateCheck::new(Outcome::Fail, detail)
    }
}

fn link_rate_count(families: &[FamilyDynamics], bound: f64, required: usize) -> GateCheck {
    count_gate(families, required, |f| f.curvature.as_ref().map(|c| c.kappa_tilde >= bound), "link-rate bound")
}

fn and(a: GateCheck, b: GateCheck) -> GateCheck {
    let outcome = match (a.outcome, b.outcome) {
        (Outcome::Pass, Outcome::Pass) => Outcome::Pass,
        (Outcome::Fail, _) | (_, Outcome::Fail) => Outcome::Fail,
        _ => Outcome::Insufficient,
    };
    GateCheck::new(outcome, format!("{}; {}", a.detail, b.detail))
}

/// Nonnegative meta-elasticity on every family where it is defined.
fn elasticity_gate(families: &[FamilyDynamics]) -> GateCheck {
    let values: alloc::vec::Vec<f64> = families.iter().filter_map(|f| f.curvature.as_ref()?.elasticity).collect();
    if values.is_empty() {
        return GateCheck::new(Outcome::Insufficient, "meta-elasticity undefined on every family".into());
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    GateCheck::from_bool(min >= 0.0, format!("min meta-elasticity {min}"))
}

pub fn curvature_gates(families: &[FamilyDynamics], kappa_star: f64, accel_alpha: f64, gamma: f64) -> CurvatureVerdicts {
    CurvatureVerdicts {
        acceleration: acceleration_gate(families, accel_alpha, 2),
        diminishing: diminishing_bound(families, gamma),
        m1: link_rate_count(families, kappa_star, 2),
        m2: and(link_rate_count(families, kappa_star, 3), acceleration_gate(families, 0.1, 2)),
        m3: and(link_rate_count(families, 1.5 * kappa_star, 4), elasticity_gate(families)),
    }
}

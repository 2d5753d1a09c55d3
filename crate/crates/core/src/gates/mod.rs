//! Level gates AAI-0 through AAI-5 and the supporting closure, curvature,
//! cognitive and allocation checks.

mod aai5;
mod allocation;
mod chc;
mod closure;
mod config;
mod curvature;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use aai5::{
    aai5_gates, coverage, innovation_index, standardized_margin, Aai5Evidence, Aai5Report, FamilyMargin, HumanPaired, InnovationCounts,
};
pub use allocation::{suggest_allocation, Allocation};
pub use chc::{chc_gates, verified_retrieval_precision, wm_span, ChcInputs, ChcResult, WmTrial};
pub use closure::{expansion_closure, maintenance_closure, ClosureResult, DailyIndex, MaintenanceLog};
pub use config::{
    Aai5Floors, ChcConfig, GateConfig, GateMode, InnovationConfig, LowerLevels, MaintenanceConfig, Row, StepConfig, Threshold,
    ThresholdTable,
};
pub use curvature::{acceleration_gate, curvature_gates, diminishing_bound, CurvatureVerdicts, GateCheck};

use crate::axes::AxisReport;
use crate::axis::{Axis, Preset};
use crate::battery::Battery;
use crate::dynamics::{step_operator, CheckpointSeries, CurvatureEstimate, KappaEstimate, LambdaScore, WindowKappa};
use crate::error::Result;

pub const MAX_LEVEL: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Insufficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSummary {
    pub kappa_tilde: f64,
    pub delta_kappa_tilde: f64,
    pub prob_nonnegative: Option<f64>,
    pub elasticity: Option<f64>,
}

impl From<&CurvatureEstimate> for CurvatureSummary {
    fn from(c: &CurvatureEstimate) -> Self {
        Self {
            kappa_tilde: c.fit.slope,
            delta_kappa_tilde: c.fit.curvature,
            prob_nonnegative: c.prob_nonnegative,
            elasticity: c.elasticity,
        }
    }
}

/// Per-family rate evidence consumed by the gates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDynamics {
    pub family: String,
    pub kappa: f64,
    pub kappa_lo: f64,
    pub kappa_hi: f64,
    pub span_days: f64,
    pub max_gap_days: f64,
    /// Rate in each rolling maintenance window.
    #[serde(default)]
    pub rolling: Vec<WindowKappa>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curvature: Option<CurvatureSummary>,
}

impl FamilyDynamics {
    pub fn new(family: &str, kappa: f64, lo: f64, hi: f64) -> Self {
        Self {
            family: family.into(),
            kappa,
            kappa_lo: lo,
            kappa_hi: hi,
            span_days: 0.0,
            max_gap_days: 0.0,
            rolling: Vec::new(),
            curvature: None,
        }
    }

    pub fn from_series(
        series: &CheckpointSeries,
        kappa: &KappaEstimate,
        rolling: Vec<WindowKappa>,
        curvature: Option<&CurvatureEstimate>,
    ) -> Self {
        Self {
            family: series.family.clone().unwrap_or_default(),
            kappa: kappa.point,
            kappa_lo: kappa.lo,
            kappa_hi: kappa.hi,
            span_days: series.span_days(),
            max_gap_days: series.max_gap_days(),
            rolling,
            curvature: curvature.map(CurvatureSummary::from),
        }
    }
}

/// Everything the level gates look at, gathered for one evaluation window.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GateEvidence {
    pub software: bool,
    /// Calibrated scores of the axes that have data.
    pub axes: BTreeMap<Axis, f64>,
    /// Raw count of distinct tool categories used.
    pub tools_used: Option<usize>,
    /// Tool success at the mildest cataloged drift.
    pub mild_shift_success: Option<f64>,
    /// Longest persistence lag observed, in days.
    pub memory_span_days: Option<f64>,
    /// Every family meets its human-reference threshold.
    pub g_parity: Option<bool>,
    pub families: Vec<FamilyDynamics>,
    pub maintenance: Option<ClosureResult>,
    pub expansion: Vec<ClosureResult>,
    /// Composite at the previous milestone, for link-step targets.
    pub composite_prev: Option<f64>,
    pub composite_current: Option<f64>,
    pub aai5: Option<Aai5Evidence>,
    pub chc: Option<ChcResult>,
}

impl GateEvidence {
    /// Axis-derived evidence; dynamics and closures are filled in by the caller.
    pub fn from_axes(report: &AxisReport, battery: &Battery, preset: Preset) -> Self {
        let diag = &report.diagnostics;
        let parity = if !battery.families.is_empty() && battery.families.iter().all(|f| f.human_parity_threshold.is_some()) {
            Some(battery.families.iter().all(|spec| {
                let agg = diag.families.iter().find(|a| a.family == spec.name);
                match (agg, spec.human_parity_threshold) {
                    (Some(a), Some(t)) => a.mean_quality >= t,
                    _ => false,
                }
            }))
        } else {
            None
        };
        Self {
            software: preset == Preset::Software,
            axes: report.axes.scores(),
            tools_used: diag.tools.as_ref().map(|_| diag.tool_categories),
            mild_shift_success: diag.tools.as_ref().and_then(|t| t.mild_shift_success),
            memory_span_days: diag.memory.as_ref().map(|m| m.max_lag_days),
            g_parity: parity,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub level: u8,
    pub gate: String,
    pub outcome: Outcome,
    pub detail: String,
    /// Informational checks are reported but do not decide the level.
    pub blocking: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: u8,
    pub passed: bool,
    pub failing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    /// Highest level whose blocking gates all pass; `None` is below AAI-0.
    pub level: Option<u8>,
    pub mode: GateMode,
    pub kappa_star: f64,
    pub levels: Vec<LevelSummary>,
    pub verdicts: Vec<Verdict>,
    pub curvature: Option<CurvatureVerdicts>,
    pub aai5: Option<Aai5Report>,
    /// Single and double link-step targets from the previous milestone.
    pub step_targets: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaScore>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_label: Option<u8>,
}

struct Sheet {
    verdicts: Vec<Verdict>,
}

impl Sheet {
    fn push(&mut self, level: u8, gate: &str, check: GateCheck, blocking: bool) {
        self.verdicts.push(Verdict { level, gate: gate.into(), outcome: check.outcome, detail: check.detail, blocking });
    }

    fn bool(&mut self, level: u8, gate: &str, ok: Option<bool>, detail: String) {
        let check = match ok {
            Some(ok) => GateCheck::from_bool(ok, detail),
            None => GateCheck::new(Outcome::Insufficient, format!("insufficient evidence: {detail}")),
        };
        self.push(level, gate, check, true);
    }

    fn axis(&mut self, level: u8, ev: &GateEvidence, axis: Axis, t: Threshold) {
        let v = ev.axes.get(&axis).copied();
        let detail = match v {
            Some(v) => format!("{} = {v} vs {t}", axis.letter()),
            None => format!("{} has no data", axis.letter()),
        };
        self.bool(level, &format!("axis {}", axis.letter()), v.map(|v| t.holds(v)), detail);
    }

    fn row(&mut self, level: u8, ev: &GateEvidence, row: &Row) {
        for (&axis, &t) in row {
            self.axis(level, ev, axis, t);
        }
    }
}

fn closure_check(c: Option<&ClosureResult>, what: &str) -> (Option<bool>, String) {
    match c {
        Some(c) => (Some(c.passed), format!("{what}: {}", c.reason.as_deref().unwrap_or("pass"))),
        None => (None, format!("no {what} log")),
    }
}

/// Evaluates every level's gates and returns the highest level that passes.
pub fn assign_level(ev: &GateEvidence, cfg: &GateConfig) -> Result<LevelReport> {
    cfg.check()?;
    let kappa_star = cfg.kappa_star()?;
    let curvature_mode = cfg.mode == GateMode::CurvatureAugmented;
    let mut s = Sheet { verdicts: Vec::new() };
    let lo = &cfg.lower;
    let score = |a: Axis| ev.axes.get(&a).copied();

    // AAI-0
    s.axis(0, ev, Axis::A, Threshold::AtLeast(lo.aai0_autonomy));
    let profile = lo.strict_profile;
    let p0 = score(Axis::P).map(|p| p <= lo.aai0_planning_max);
    let t0 = ev.tools_used.map(|t| t <= lo.aai0_tools_max);
    let r0 = score(Axis::R).map(|r| r == 0.0);
    for (gate, ok, detail) in [
        ("profile P ~ 0", p0, format!("P <= {}", lo.aai0_planning_max)),
        ("profile T <= 1", t0, format!("tool categories <= {}", lo.aai0_tools_max)),
        ("profile R = 0", r0, "R = 0".into()),
    ] {
        let check = match ok {
            Some(ok) => GateCheck::from_bool(ok, detail),
            None => GateCheck::new(Outcome::Insufficient, detail),
        };
        s.push(0, gate, check, profile);
    }

    // AAI-1
    s.axis(1, ev, Axis::A, Threshold::AtLeast(lo.aai1_autonomy));
    s.axis(1, ev, Axis::P, Threshold::AtLeast(lo.aai1_planning));
    let tool_gate = match (ev.tools_used, ev.mild_shift_success) {
        (Some(n), Some(sr)) => Some(n >= lo.aai1_tools && sr >= lo.aai1_tool_success),
        _ => None,
    };
    s.bool(
        1,
        "tools under mild shift",
        tool_gate,
        format!("{:?} tools at {:?} success (need {} at {})", ev.tools_used, ev.mild_shift_success, lo.aai1_tools, lo.aai1_tool_success),
    );
    s.push(
        1,
        "profile R = 0",
        match r0 {
            Some(ok) => GateCheck::from_bool(ok, "R = 0".into()),
            None => GateCheck::new(Outcome::Insufficient, "R = 0".into()),
        },
        profile,
    );

    // AAI-2
    s.row(2, ev, &cfg.thresholds.aai2);
    let sig =
        ev.families.iter().filter(|f| f.kappa_lo > 0.0 && f.span_days >= cfg.kappa_days && f.max_gap_days <= cfg.max_gap_days).count();
    s.bool(
        2,
        "significant rate",
        (!ev.families.is_empty()).then_some(sig >= 1),
        format!("{sig} families with rate CI above 0 over >= {} days", cfg.kappa_days),
    );
    let (ok, detail) = closure_check(ev.maintenance.as_ref(), "maintenance closure");
    s.bool(2, "maintenance closure", ok, detail);

    // AAI-3
    s.row(3, ev, &cfg.thresholds.aai3);
    let at_star = ev.families.iter().filter(|f| f.kappa >= kappa_star).count();
    s.bool(
        3,
        "multi-domain rate",
        (!ev.families.is_empty()).then_some(at_star >= cfg.multi_domain),
        format!("rate >= {kappa_star} on {at_star} families (need {})", cfg.multi_domain),
    );
    s.bool(
        3,
        "memory span",
        ev.memory_span_days.map(|d| d >= cfg.memory_days),
        format!("persistence evidence over {:?} days (need {})", ev.memory_span_days, cfg.memory_days),
    );
    let expansions = ev.expansion.iter().filter(|c| c.passed).count();
    s.bool(
        3,
        "expansion closure",
        (!ev.expansion.is_empty()).then_some(expansions >= 1),
        format!("{expansions} of {} events pass", ev.expansion.len()),
    );

    // AAI-4
    s.row(4, ev, &cfg.thresholds.aai4);
    s.bool(4, "generality parity", ev.g_parity, "every family at its human-reference threshold".into());
    let sustained = if ev.families.len() < cfg.multi_domain || ev.families.iter().any(|f| f.rolling.is_empty()) {
        None
    } else {
        Some(ev.families.iter().all(|f| f.rolling.iter().all(|w| w.kappa.is_some_and(|k| k >= kappa_star))))
    };
    s.bool(4, "sustained rate", sustained, format!("rate >= {kappa_star} in every rolling window on every family"));
    let (ok, detail) = closure_check(ev.maintenance.as_ref(), "maintenance closure");
    s.bool(4, "maintenance closure", ok, detail);
    s.bool(
        4,
        "expansion closure",
        (!ev.expansion.is_empty()).then_some(expansions >= 1),
        format!("{expansions} of {} events pass", ev.expansion.len()),
    );

    let step_targets = match ev.composite_prev {
        Some(c) => {
            let once = step_operator(c, cfg.step.link, cfg.step.step)?;
            Some([once, step_operator(once, cfg.step.link, cfg.step.step)?])
        }
        None => None,
    };
    let curvature = (!ev.families.is_empty()).then(|| curvature_gates(&ev.families, kappa_star, cfg.accel_alpha, cfg.gamma));
    if curvature_mode {
        let missing = || GateCheck::new(Outcome::Insufficient, "no family dynamics".into());
        let c = curvature.clone();
        s.push(3, "acceleration", c.as_ref().map_or_else(missing, |c| c.acceleration.clone()), true);
        s.push(4, "diminishing returns", c.as_ref().map_or_else(missing, |c| c.diminishing.clone()), true);
        for (level, idx) in [(3u8, 0usize), (4, 1)] {
            let ok = match (step_targets, ev.composite_current) {
                (Some(t), Some(c)) => Some(c >= t[idx]),
                _ => None,
            };
            s.bool(level, "link step", ok, format!("composite {:?} vs target {:?}", ev.composite_current, step_targets.map(|t| t[idx])));
        }
    }

    if cfg.chc.enforce {
        for level in 2..=MAX_LEVEL {
            let ok = ev.chc.as_ref().map(|c| c.passed);
            s.bool(level, "cognitive core", ok, ev.chc.as_ref().map_or_else(String::new, |c| c.failures.join("; ")));
        }
    }

    // AAI-5 stacks on AAI-4.
    let aai5 = match &ev.aai5 {
        Some(e) => Some(aai5_gates(e, &ev.axes, &ev.families, ev.software, cfg)?),
        None => None,
    };
    match &aai5 {
        Some(r) => {
            for (name, check) in r.checks() {
                s.push(5, name, check.clone(), true);
            }
        }
        None => s.push(5, "superhuman evidence", GateCheck::new(Outcome::Insufficient, "no AAI-5 evidence".into()), true),
    }

    let blocking_ok = |level: u8| s.verdicts.iter().filter(|v| v.level == level && v.blocking).all(|v| v.outcome == Outcome::Pass);
    let mut levels: Vec<LevelSummary> = (0..=MAX_LEVEL)
        .map(|level| LevelSummary {
            level,
            passed: blocking_ok(level),
            failing: s
                .verdicts
                .iter()
                .filter(|v| v.level == level && v.blocking && v.outcome != Outcome::Pass)
                .map(|v| v.gate.clone())
                .collect(),
        })
        .collect();
    if !levels[4].passed && levels[5].passed {
        levels[5].passed = false;
        levels[5].failing.push("AAI-4 gates".into());
    }
    let level = levels.iter().rev().find(|l| l.passed).map(|l| l.level);
    Ok(LevelReport {
        level,
        mode: cfg.mode,
        kappa_star,
        levels,
        verdicts: s.verdicts,
        curvature,
        aai5,
        step_targets,
        lambda: None,
        lambda_label: None,
    })
}

#[cfg(test)]
mod tests;

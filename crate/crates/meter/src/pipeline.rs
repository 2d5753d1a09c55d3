//! ingest -> axes -> composite -> dynamics -> gates -> frontier, per agent.

use std::collections::BTreeMap;

use aai_core::axes::{compute_axes, AxisReport};
use aai_core::battery::{validate_admissibility, AdmissibilityReport};
use aai_core::composite::{aai_index, gradient, CompositeIndex, ZeroPolicy};
use aai_core::dynamics::{
    kappa_estimate, lambda_score, local_curvature, rolling_kappa, CheckpointSeries, CurvatureEstimate, KappaEstimate, LambdaConfig,
    WindowKappa,
};
use aai_core::frontier::{
    delegability_frontier, even_bins, frontier_shift, frontier_summaries, quality_frontier, FrontierEstimate, FrontierSummary,
    InterventionBudget, QualityFrontier,
};
use aai_core::gates::{
    assign_level, chc_gates, expansion_closure, maintenance_closure, Aai5Evidence, FamilyDynamics, GateEvidence, LevelReport,
};
use aai_core::simulate::Archetype;
use aai_core::stats::{BootstrapPlan, Runner};
use aai_core::{Axis, Battery};
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Context, Result};
use crate::ingest::{AgentInputs, InputFile, Inputs};

pub const ENGINE: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Pipeline stages past axes and composite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stages {
    pub dynamics: bool,
    pub gates: bool,
    pub frontier: bool,
}

impl Stages {
    pub const ALL: Stages = Stages { dynamics: true, gates: true, frontier: true };
    pub const AXES: Stages = Stages { dynamics: false, gates: false, frontier: false };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeSummary {
    pub strict: CompositeIndex,
    pub floor: CompositeIndex,
    /// The two zero policies disagree.
    pub divergent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradient: Option<BTreeMap<Axis, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: String,
    pub checkpoints: usize,
    /// Some capability values were clamped into the open unit interval.
    pub clamped: bool,
    pub kappa: KappaEstimate,
    pub rolling: Vec<WindowKappa>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature: Option<CurvatureEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowFrontier {
    pub window: String,
    pub estimate: FrontierEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<FrontierSummary>,
}

/// Comparison against the reference profile of an archetype.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeCheck {
    pub archetype: Archetype,
    pub label: String,
    pub targets: BTreeMap<Axis, f64>,
    /// Measured minus target, per axis.
    pub deviations: BTreeMap<Axis, f64>,
    pub max_abs_deviation: f64,
    pub table_index: f64,
    /// Geometric-mean index of the target profile under each zero policy.
    pub target_index_strict: f64,
    pub target_index_floor: f64,
    pub kappa_target: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_interval: Option<[f64; 2]>,
    pub kappa_points: Vec<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentReport {
    pub agent: String,
    pub traces: usize,
    pub admissibility: AdmissibilityReport,
    pub axes: AxisReport,
    pub composite: CompositeSummary,
    pub dynamics: Vec<FamilyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gates: Option<LevelReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quality_frontier: Option<QualityFrontier>,
    pub delegability: Vec<WindowFrontier>,
    /// AUF change from the first to the last window.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frontier_shift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub archetype: Option<ArchetypeCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Engine {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub engine: Engine,
    pub seed: u64,
    pub inputs: Vec<InputFile>,
    pub config: Config,
    pub agents: Vec<AgentReport>,
    pub notes: Vec<String>,
}

/// Stable per-agent salt for bootstrap seeds.
fn salt(name: &str) -> u64 {
    let digest = crate::ingest::sha256_hex(name.as_bytes());
    u64::from_str_radix(&digest[..16], 16).expect("hex digest")
}

pub fn composite(axes: &BTreeMap<Axis, f64>, battery: &Battery, cfg: &Config) -> Result<CompositeSummary> {
    let w = battery.weights_for(cfg.preset);
    let strict = aai_index(axes, &w, ZeroPolicy::Strict).module("composite")?;
    let floor = aai_index(axes, &w, ZeroPolicy::Floor).module("composite")?;
    Ok(CompositeSummary { divergent: strict.value != floor.value, gradient: gradient(axes, &w).ok(), strict, floor })
}

fn dynamics(a: &AgentInputs, cfg: &Config, plan: &BootstrapPlan, runner: &dyn Runner) -> Result<Vec<FamilyReport>> {
    let d = &cfg.dynamics;
    let mut out = Vec::new();
    for (family, points) in &a.checkpoints {
        let series = CheckpointSeries::new(Some(family.clone()), points.clone()).module("dynamics")?;
        let fplan = plan.derive(salt(family));
        let kappa = kappa_estimate(&series, d.method, &fplan, runner).module("dynamics")?;
        let rolling = rolling_kappa(&series, d.rolling_days);
        let r = series.resources();
        let center = r[r.len() / 2];
        let (curvature, note) = match local_curvature(&series, d.link, center, d.curvature_fraction, &fplan.derive(1), runner) {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(format!("curvature skipped: {e}"))),
        };
        out.push(FamilyReport {
            family: family.clone(),
            checkpoints: series.points.len(),
            clamped: series.clamped,
            kappa,
            rolling,
            curvature,
            note,
        });
    }
    Ok(out)
}

fn gates(
    a: &AgentInputs,
    axes: &AxisReport,
    composite: &CompositeSummary,
    families: &[FamilyReport],
    battery: &Battery,
    cfg: &Config,
) -> Result<LevelReport> {
    let g = &cfg.gates;
    let mut ev = GateEvidence::from_axes(axes, battery, cfg.preset);
    ev.families = a
        .checkpoints
        .iter()
        .zip(families)
        .map(|((name, pts), f)| {
            let series = CheckpointSeries::new(Some(name.clone()), pts.clone()).module("dynamics")?;
            Ok(FamilyDynamics::from_series(&series, &f.kappa, f.rolling.clone(), f.curvature.as_ref()))
        })
        .collect::<Result<_>>()?;
    ev.maintenance = match &a.maintenance {
        Some(log) => Some(maintenance_closure(log, g.maintenance.alpha, g.maintenance.days).module("gates")?),
        None => None,
    };
    ev.expansion = a.events.iter().filter(|e| e.ablation.is_some()).map(|e| expansion_closure(e, g.expansion_eps)).collect();
    ev.composite_prev = a.milestone.previous;
    ev.composite_current = Some(composite.strict.value);
    if !a.human_pairs.is_empty() || a.innovation.is_some() {
        ev.aai5 = Some(Aai5Evidence {
            human_pairs: a.human_pairs.clone(),
            innovation: a.innovation,
            aai4_composite: a.milestone.aai4,
            current_composite: Some(composite.strict.value),
        });
    }
    if let Some(chc) = &a.chc {
        ev.chc = Some(chc_gates(chc, &g.chc).module("gates")?);
    }
    let mut report = assign_level(&ev, g).module("gates")?;
    if let Some(form) = cfg.dynamics.lambda_form {
        let curv: Vec<_> = families.iter().filter_map(|f| f.curvature.as_ref()).collect();
        let c = composite.strict.value;
        if let (Some(k), Some(dk)) = (median(curv.iter().map(|c| c.fit.slope)), median(curv.iter().map(|c| c.fit.curvature))) {
            if c > 0.0 && c < 1.0 {
                let lc = LambdaConfig {
                    link: cfg.dynamics.link,
                    eps0: cfg.dynamics.eps0,
                    kappa_star: g.kappa_star().module("gates")?,
                    eta: 1.0,
                    form,
                };
                report.lambda = Some(lambda_score(c, k, dk, &lc).module("dynamics")?);
            }
        }
    }
    Ok(report)
}

fn median(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

fn frontiers(
    a: &AgentInputs,
    cfg: &Config,
    plan: &BootstrapPlan,
    runner: &dyn Runner,
) -> Result<(Option<QualityFrontier>, Vec<WindowFrontier>, Option<f64>)> {
    let f = &cfg.frontier;
    // The agent's own quality distribution: solo, non-persistence episodes.
    let solo: Vec<_> = a.traces.iter().filter(|t| !t.is_persistence() && t.concurrency == 1).cloned().collect();
    let qf = if solo.is_empty() { None } else { Some(quality_frontier(&solo, None, f.grid_points).module("frontier")?) };
    let budget = InterventionBudget::new(f.h_max).module("frontier")?;
    let bins = even_bins(f.bins).module("frontier")?;
    let mut windows = Vec::new();
    for (window, runs) in &a.policy_runs {
        let estimate = delegability_frontier(runs, budget, &bins, &plan.derive(salt(window)), runner).module("frontier")?;
        let summary = frontier_summaries(&estimate, f.q_target, None).ok();
        windows.push(WindowFrontier { window: window.clone(), estimate, summary });
    }
    let shift = match (windows.first(), windows.last()) {
        (Some(a), Some(b)) if windows.len() > 1 => frontier_shift(&a.estimate, &b.estimate, f.q_target, None).ok(),
        _ => None,
    };
    Ok((qf, windows, shift))
}

fn archetype_check(
    name: &str,
    axes: &BTreeMap<Axis, f64>,
    families: &[FamilyReport],
    cfg: &Config,
    battery: &Battery,
) -> Option<ArchetypeCheck> {
    let archetype = Archetype::from_name(name)?;
    let targets = archetype.targets();
    let deviations: BTreeMap<Axis, f64> = targets.iter().map(|(x, t)| (*x, axes.get(x).copied().unwrap_or(f64::NAN) - t)).collect();
    let max_abs_deviation = deviations.values().fold(0.0f64, |m, d| if d.is_nan() { f64::INFINITY } else { m.max(d.abs()) });
    let w = battery.weights_for(cfg.preset);
    let strict = aai_index(&targets, &w, ZeroPolicy::Strict).map(|c| c.value).unwrap_or(f64::NAN);
    let floor = aai_index(&targets, &w, ZeroPolicy::Floor).map(|c| c.value).unwrap_or(f64::NAN);
    let note = format!(
        "reference index {:.2}; geometric mean of the reference axis row gives {:.4} (strict) and {:.4} (floor at 0.01)",
        archetype.table_index(),
        strict,
        floor
    );
    Some(ArchetypeCheck {
        archetype,
        label: archetype.label().into(),
        targets,
        deviations,
        max_abs_deviation,
        table_index: archetype.table_index(),
        target_index_strict: strict,
        target_index_floor: floor,
        kappa_target: archetype.kappa(),
        kappa_interval: archetype.kappa_interval(),
        kappa_points: families.iter().map(|f| f.kappa.point).collect(),
        note,
    })
}

pub fn run_agent(
    name: &str,
    a: &AgentInputs,
    battery: &Battery,
    cfg: &Config,
    seed: u64,
    stages: Stages,
    runner: &dyn Runner,
) -> Result<AgentReport> {
    let plan = BootstrapPlan { seed, ..cfg.bootstrap }.derive(salt(name));
    let admissibility = validate_admissibility(battery, &a.traces);
    let axes = compute_axes(battery, &a.traces, &a.events, &plan.derive(1), runner).module("axes")?;
    let scores = axes.axes.scores();
    let composite = composite(&scores, battery, cfg)?;
    let dynamics = if stages.dynamics || stages.gates { dynamics(a, cfg, &plan.derive(2), runner)? } else { Vec::new() };
    let gates = if stages.gates { Some(gates(a, &axes, &composite, &dynamics, battery, cfg)?) } else { None };
    let (quality_frontier, delegability, frontier_shift) =
        if stages.frontier { frontiers(a, cfg, &plan.derive(3), runner)? } else { (None, Vec::new(), None) };
    let archetype = archetype_check(name, &scores, &dynamics, cfg, battery);
    Ok(AgentReport {
        agent: name.into(),
        traces: a.traces.len(),
        admissibility,
        axes,
        composite,
        dynamics,
        gates,
        quality_frontier,
        delegability,
        frontier_shift,
        archetype,
    })
}

pub fn run_report(inputs: &Inputs, cfg: &Config, seed: u64, stages: Stages, runner: &dyn Runner) -> Result<ReportBundle> {
    let battery = cfg.battery(None)?;
    if stages.gates {
        cfg.gates.kappa_star().module("gates")?;
    }
    let agents =
        inputs.agents.iter().map(|(name, a)| run_agent(name, a, battery, cfg, seed, stages, runner)).collect::<Result<Vec<_>>>()?;
    let mut notes = Vec::new();
    if agents.iter().any(|a| a.archetype.is_some()) {
        notes.push(
            "The reference index column of the archetype table is not the weighted geometric mean of its own \
             axis rows; rows with R = 0 give 0 under the strict zero policy. Both zero policies are reported next to the \
             reference value."
                .into(),
        );
    }
    for a in &agents {
        if !a.admissibility.passed {
            notes.push(format!("agent `{}` fails admissibility", a.agent));
        }
    }
    Ok(ReportBundle {
        engine: Engine { name: ENGINE.into(), version: VERSION.into() },
        seed,
        inputs: inputs.files.clone(),
        config: cfg.clone(),
        agents,
        notes,
    })
}

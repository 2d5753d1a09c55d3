//! Axis estimators and the calibrated [`AxisVector`].
//!
//! Each estimator works on borrowed traces so the bootstrap can resample
//! without copying episodes. Persistence episodes (those with a lag) feed
//! the memory axis only; every other axis reads the remaining episodes.

mod basic;
mod economics;
mod embodied;
mod memory;
mod revision;
mod social;
mod tools;
mod world;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use basic::{autonomy, generality, planning};
pub use economics::{economics, EconomicReading};
pub use embodied::{embodiment, robotics, safety_score, EmbodiedReading, RoboticsReading};
pub use memory::{empirical_half_life, fit_decay, memory, retention_score, FamilyPersistence, MemoryReading};
pub use revision::{revision, stage_autonomy, EventContribution, FilteredEvent, RevisionReading};
pub use social::{headroom_lift, sociality, SocialReading, TaskLift};
pub use tools::{size_prior, tool_economy, tool_score, DriftSuccess, ToolReading};
pub use world::{brier_skill, world_model, WorldReading};

use crate::axis::{Anchor, Axis};
use crate::battery::{Battery, FamilyAggregate};
use crate::error::Result;
use crate::stats::{bootstrap, Bootstrap, BootstrapPlan, Runner};
use crate::trace::{EpisodeTrace, RevisionEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadingState {
    Value,
    /// Computed from a subset of the axis components.
    Partial,
    NoData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisReading {
    pub state: ReadingState,
    pub raw: Option<f64>,
    pub score: Option<f64>,
    /// Bootstrap interval on the calibrated score.
    pub ci: Option<[f64; 2]>,
    /// Units resampled by the bootstrap.
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl AxisReading {
    pub fn no_data(reason: impl Into<String>) -> Self {
        Self { state: ReadingState::NoData, raw: None, score: None, ci: None, n: 0, note: Some(reason.into()) }
    }

    /// A reading with a known score and no interval.
    pub fn exact(score: f64) -> Self {
        Self { state: ReadingState::Value, raw: Some(score), score: Some(score), ci: Some([score; 2]), n: 0, note: None }
    }

    fn calibrated(boot: &Bootstrap, anchor: Anchor, n: usize) -> Self {
        Self {
            state: ReadingState::Value,
            raw: Some(boot.point),
            score: Some(anchor.calibrate(boot.point)),
            ci: Some([anchor.calibrate(boot.lo), anchor.calibrate(boot.hi)]),
            n,
            note: None,
        }
    }
}

/// Calibrated readings keyed by axis letter.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AxisVector(pub BTreeMap<Axis, AxisReading>);

impl AxisVector {
    pub fn from_scores(scores: impl IntoIterator<Item = (Axis, f64)>) -> Self {
        Self(scores.into_iter().map(|(a, s)| (a, AxisReading::exact(s))).collect())
    }

    pub fn score(&self, axis: Axis) -> Option<f64> {
        self.0.get(&axis).and_then(|r| r.score)
    }

    /// Axes with a score, partial readings included.
    pub fn scores(&self) -> BTreeMap<Axis, f64> {
        self.0.iter().filter_map(|(a, r)| r.score.map(|s| (*a, s))).collect()
    }

    pub fn set(&mut self, axis: Axis, score: f64) {
        self.0.insert(axis, AxisReading::exact(score));
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AxisDiagnostics {
    pub families: Vec<FamilyAggregate>,
    pub tools: Option<ToolReading>,
    pub memory: Option<MemoryReading>,
    pub revision: Option<RevisionReading>,
    pub sociality: Option<SocialReading>,
    pub embodiment: Option<EmbodiedReading>,
    pub robotics: RoboticsReading,
    pub world: Option<WorldReading>,
    pub economics: Option<EconomicReading>,
    /// Distinct tool categories used across episodes.
    pub tool_categories: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisReport {
    pub axes: AxisVector,
    pub diagnostics: AxisDiagnostics,
}

fn reading<T, F>(data: &[T], stat: F, plan: &BootstrapPlan, runner: &dyn Runner, anchor: Anchor, empty: &str) -> AxisReading
where
    T: Clone + Sync,
    F: Fn(&[T]) -> Option<f64> + Sync,
{
    match bootstrap(data, stat, plan, runner) {
        Some(b) => AxisReading::calibrated(&b, anchor, data.len()),
        None => AxisReading::no_data(empty),
    }
}

/// Computes every axis with bootstrap intervals.
pub fn compute_axes(
    battery: &Battery,
    traces: &[EpisodeTrace],
    events: &[RevisionEvent],
    plan: &BootstrapPlan,
    runner: &dyn Runner,
) -> Result<AxisReport> {
    let index = battery.index();
    for t in traces {
        t.validate()?;
        index.task(&t.task_id)?;
    }
    for e in events {
        e.validate()?;
    }
    let core: Vec<&EpisodeTrace> = traces.iter().filter(|t| !t.is_persistence()).collect();
    let persistence: Vec<&EpisodeTrace> = traces.iter().filter(|t| t.is_persistence()).collect();
    let probes: Vec<&EpisodeTrace> = traces.iter().filter(|t| t.stated_prob.is_some()).collect();
    let embodied: Vec<&EpisodeTrace> = traces.iter().filter(|t| t.sim_flag || t.exposure_hours.is_some()).collect();
    let event_refs: Vec<&RevisionEvent> = events.iter().collect();
    let sub = |axis: Axis| plan.derive(axis as u64);
    let anchor = |axis: Axis| battery.anchor(axis);
    let mut axes = BTreeMap::new();
    let mut diag = AxisDiagnostics::default();

    axes.insert(Axis::A, reading(&core, |s| autonomy(s, battery.horizon_cap), &sub(Axis::A), runner, anchor(Axis::A), "no episodes"));
    axes.insert(Axis::P, reading(&core, |s| planning(s, battery.depth_anchor), &sub(Axis::P), runner, anchor(Axis::P), "no episodes"));

    if let Some((_, fams)) = generality(battery, &core)? {
        diag.families = fams;
    }
    axes.insert(
        Axis::G,
        reading(&core, |s| generality(battery, s).ok().flatten().map(|g| g.0), &sub(Axis::G), runner, anchor(Axis::G), "no episodes"),
    );

    diag.tools = tool_economy(&index, &core)?;
    diag.tool_categories = diag.tools.as_ref().map_or(0, |t| t.categories_used.len());
    axes.insert(
        Axis::T,
        reading(&core, |s| tool_economy(&index, s).ok().flatten().map(|t| t.score), &sub(Axis::T), runner, anchor(Axis::T), "no episodes"),
    );

    diag.memory = memory(&index, &persistence)?;
    axes.insert(
        Axis::M,
        reading(
            &persistence,
            |s| memory(&index, s).ok().flatten().map(|m| m.score),
            &sub(Axis::M),
            runner,
            anchor(Axis::M),
            "no persistence family with two distinct lags and a recall measurement",
        ),
    );

    let sw = battery.stage_weights;
    diag.revision = Some(revision(&event_refs, &sw, battery.revision_scale));
    axes.insert(
        Axis::R,
        reading(
            &event_refs,
            |s| Some(revision(s, &sw, battery.revision_scale).score),
            &sub(Axis::R),
            runner,
            anchor(Axis::R),
            "no revision events",
        ),
    );

    diag.sociality = sociality(battery, &core);
    axes.insert(
        Axis::S,
        reading(
            &core,
            |s| sociality(battery, s).map(|r| r.score),
            &sub(Axis::S),
            runner,
            anchor(Axis::S),
            "no task observed both solo and with concurrency above one",
        ),
    );

    let sev = battery.severity_weights;
    diag.embodiment = embodiment(&index, &embodied, &sev)?;
    let mut e = reading(
        &embodied,
        |s| embodiment(&index, s, &sev).ok().flatten().map(|r| r.score),
        &sub(Axis::E),
        runner,
        anchor(Axis::E),
        "no real embodied exposure",
    );
    if diag.embodiment.as_ref().is_some_and(|r| !r.complete) {
        e.state = ReadingState::Partial;
        e.note = Some("no simulated episodes; sim-to-real omitted".into());
    }
    axes.insert(Axis::E, e);
    diag.robotics = robotics(&index, &embodied, battery.cost_per_hour);

    diag.world = world_model(&index, &probes)?;
    axes.insert(
        Axis::W,
        reading(
            &probes,
            |s| world_model(&index, s).ok().flatten().map(|w| w.score),
            &sub(Axis::W),
            runner,
            anchor(Axis::W),
            "no probability probes",
        ),
    );

    diag.economics = economics(&index, &core)?;
    axes.insert(
        Axis::Dollar,
        reading(
            &core,
            |s| economics(&index, s).ok().flatten().map(|r| r.value),
            &sub(Axis::Dollar),
            runner,
            anchor(Axis::Dollar),
            "zero elapsed time or zero cost",
        ),
    );

    Ok(AxisReport { axes: AxisVector(axes), diagnostics: diag })
}

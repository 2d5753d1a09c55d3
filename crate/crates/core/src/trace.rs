//! Logged evidence: episode traces, revision events and resource ledgers.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Incident counts by severity class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IncidentCounts {
    pub negligible: u32,
    pub minor: u32,
    pub major: u32,
    pub critical: u32,
}

impl IncidentCounts {
    pub fn total(&self) -> u32 {
        self.negligible + self.minor + self.major + self.critical
    }
}

/// One logged episode. Optional fields stay `None` when not logged; they are
/// never filled with defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub task_id: String,
    pub seed_id: String,
    pub drift_tag: String,
    pub quality: f64,
    pub uninterrupted_actions: u64,
    pub plan_depth: u64,
    pub cost: f64,
    /// Wall-clock hours since the battery epoch.
    pub timestamp: f64,
    pub human_interventions: u64,
    pub concurrency: u32,
    pub comm_tokens: u64,
    pub verified_actions: u64,
    #[serde(default)]
    pub unresolved_conflict: bool,
    #[serde(default)]
    pub r#loop: bool,
    #[serde(default)]
    pub chatter: bool,
    #[serde(default)]
    pub mode_collapse: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lag_days: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stated_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incident_counts: Option<IncidentCounts>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exposure_hours: Option<f64>,
    #[serde(default)]
    pub sim_flag: bool,
    #[serde(default)]
    pub tool_categories_used: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recovered_faults: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_faults: Option<u32>,
    /// Whether the probed fact was retrieved within the top K.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retrieval_hit: Option<bool>,
    /// Per-episode control-quality score in `[0, 1]` (embodied runs).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repair_hours: Option<f64>,
    /// Resource-schema hash recorded by the harness.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_hash: Option<String>,
    /// Longest repeated state cycle observed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle_length: Option<u32>,
    /// Longest run of consecutive disagreement turns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disagreement_turns: Option<u32>,
}

impl EpisodeTrace {
    /// A minimal trace with neutral values, mostly for tests and generators.
    pub fn new(task_id: impl Into<String>, quality: f64) -> Self {
        Self {
            task_id: task_id.into(),
            seed_id: "s0".into(),
            drift_tag: "none".into(),
            quality,
            uninterrupted_actions: 0,
            plan_depth: 0,
            cost: 0.0,
            timestamp: 0.0,
            human_interventions: 0,
            concurrency: 1,
            comm_tokens: 0,
            verified_actions: 0,
            unresolved_conflict: false,
            r#loop: false,
            chatter: false,
            mode_collapse: false,
            lag_days: None,
            stated_prob: None,
            truth: None,
            incident_counts: None,
            exposure_hours: None,
            sim_flag: false,
            tool_categories_used: Vec::new(),
            recovered_faults: None,
            total_faults: None,
            retrieval_hit: None,
            control_score: None,
            repair_hours: None,
            schema_hash: None,
            cycle_length: None,
            disagreement_turns: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(domain!("{name} = {v} outside [0, 1] (task `{}`)", self.task_id))
            }
        };
        unit("quality", self.quality)?;
        if self.concurrency == 0 {
            return Err(domain!("concurrency must be >= 1 (task `{}`)", self.task_id));
        }
        if !(self.cost >= 0.0 && self.cost.is_finite()) {
            return Err(domain!("cost must be finite and nonnegative (task `{}`)", self.task_id));
        }
        if !self.timestamp.is_finite() {
            return Err(domain!("timestamp must be finite (task `{}`)", self.task_id));
        }
        match (self.stated_prob, self.truth) {
            (Some(p), Some(y)) => {
                unit("stated_prob", p)?;
                unit("truth", y)?;
            }
            (Some(_), None) => return Err(domain!("stated_prob without truth (task `{}`)", self.task_id)),
            _ => {}
        }
        if let Some(lag) = self.lag_days {
            if !(lag >= 0.0 && lag.is_finite()) {
                return Err(domain!("lag_days must be nonnegative (task `{}`)", self.task_id));
            }
        }
        if let Some(h) = self.exposure_hours {
            if !(h >= 0.0 && h.is_finite()) {
                return Err(domain!("exposure_hours must be nonnegative (task `{}`)", self.task_id));
            }
        }
        if let Some(c) = self.control_score {
            unit("control_score", c)?;
        }
        if let (Some(r), Some(t)) = (self.recovered_faults, self.total_faults) {
            if r > t {
                return Err(domain!("recovered_faults exceeds total_faults (task `{}`)", self.task_id));
            }
        }
        Ok(())
    }

    /// Persistence episodes carry a lag and feed the memory axis only.
    pub fn is_persistence(&self) -> bool {
        self.lag_days.is_some()
    }

    /// Communication tokens per verified action; zero verified actions count as one.
    pub fn comms_per_action(&self) -> f64 {
        self.comm_tokens as f64 / self.verified_actions.max(1) as f64
    }
}

/// Share of autonomy each pipeline stage ran without human input.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageAutonomy {
    pub plan: f64,
    pub implement: f64,
    pub verify: f64,
}

/// Capability of a system after rolling a revision back, plus an optional
/// matched control measured alongside the ablation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ablation {
    pub capability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_pre: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_post: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevisionEvent {
    pub id: String,
    pub revised_pre: f64,
    pub revised_post: f64,
    pub control_pre: f64,
    pub control_post: f64,
    pub stage_autonomy: StageAutonomy,
    pub change_kind: String,
    #[serde(default)]
    pub artifacts: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ablation: Option<Ablation>,
    /// Confidence interval on the difference-in-differences gain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub did_ci: Option<Interval>,
    /// Day index of the event, if known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub day: Option<f64>,
}

impl RevisionEvent {
    pub fn did(&self) -> f64 {
        crate::stats::did_delta(self.revised_pre, self.revised_post, self.control_pre, self.control_post)
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.stage_autonomy;
        for (name, v) in [("plan", s.plan), ("implement", s.implement), ("verify", s.verify)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(domain!("stage autonomy `{name}` outside [0, 1] in event `{}`", self.id));
            }
        }
        for v in [self.revised_pre, self.revised_post, self.control_pre, self.control_post] {
            if !v.is_finite() {
                return Err(domain!("non-finite capability in event `{}`", self.id));
            }
        }
        Ok(())
    }
}

/// Cumulative resource spend at wall-clock instants.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ResourceLedger {
    pub entries: Vec<LedgerEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub t: f64,
    pub resource: f64,
}

impl ResourceLedger {
    /// Checks `R(t0) = 0`, increasing time and nondecreasing spend.
    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.entries.first() else {
            return Ok(());
        };
        if first.resource != 0.0 {
            return Err(domain!("resource ledger must start at zero, found {}", first.resource));
        }
        for w in self.entries.windows(2) {
            if w[1].t <= w[0].t {
                return Err(domain!("resource ledger times must increase ({} then {})", w[0].t, w[1].t));
            }
            if w[1].resource < w[0].resource {
                return Err(domain!("resource ledger decreased at t = {}", w[1].t));
            }
        }
        Ok(())
    }

    /// Resource spent by time `t`, linear between entries and flat outside.
    pub fn at(&self, t: f64) -> Option<f64> {
        let e = &self.entries;
        let first = e.first()?;
        if t <= first.t {
            return Some(first.resource);
        }
        for w in e.windows(2) {
            if t <= w[1].t {
                let f = (t - w[0].t) / (w[1].t - w[0].t);
                return Some(w[0].resource + f * (w[1].resource - w[0].resource));
            }
        }
        e.last().map(|l| l.resource)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prob_without_truth_is_rejected() {
        let mut t = EpisodeTrace::new("t1", 0.5);
        t.stated_prob = Some(0.3);
        assert!(t.validate().is_err());
        t.truth = Some(1.0);
        assert!(t.validate().is_ok());
    }

    #[test]
    fn ledger_rules() {
        let ok = ResourceLedger { entries: alloc::vec![LedgerEntry { t: 0.0, resource: 0.0 }, LedgerEntry { t: 1.0, resource: 2.0 }] };
        assert!(ok.validate().is_ok());
        assert_eq!(ok.at(0.5), Some(1.0));
        let bad = ResourceLedger { entries: alloc::vec![LedgerEntry { t: 0.0, resource: 1.0 }] };
        assert!(bad.validate().is_err());
    }
}

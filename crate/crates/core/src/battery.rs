//! Battery definition, validation and admissibility checks.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::axis::{Anchor, Axis, Preset, Weights};
use crate::error::{Error, Result};
use crate::trace::EpisodeTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: String,
    pub family: String,
    /// Target quality `q*(t)`; an episode succeeds when `q >= q*`.
    pub quality_target: f64,
    #[serde(default)]
    pub required_tools: Vec<String>,
    /// Reference predictor probability for world-model scoring.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_prob: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    /// Coverage threshold `tau` on the family mean quality.
    pub threshold: f64,
    /// Human-reference threshold used by the parity gate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_parity_threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftSpec {
    pub name: String,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageWeights {
    pub plan: f64,
    pub implement: f64,
    pub verify: f64,
}

impl Default for StageWeights {
    fn default() -> Self {
        let third = 1.0 / 3.0;
        Self { plan: third, implement: third, verify: third }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommPenalty {
    pub chatter: f64,
    pub collapse: f64,
}

impl Default for CommPenalty {
    fn default() -> Self {
        Self { chatter: 0.25, collapse: 0.25 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopThresholds {
    pub cycle: u32,
    pub disagreement: u32,
}

impl Default for LoopThresholds {
    fn default() -> Self {
        Self { cycle: 3, disagreement: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeverityWeights {
    pub negligible: f64,
    pub minor: f64,
    pub major: f64,
    pub critical: f64,
}

impl Default for SeverityWeights {
    fn default() -> Self {
        Self { negligible: 0.25, minor: 1.0, major: 5.0, critical: 20.0 }
    }
}

fn default_min_family_size() -> usize {
    5
}

fn default_recall_k() -> usize {
    10
}

/// A pre-registered evaluation battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Battery {
    pub tasks: Vec<TaskSpec>,
    pub families: Vec<FamilySpec>,
    #[serde(default)]
    pub drifts: Vec<DriftSpec>,
    /// Event kind to nonnegative unit cost.
    #[serde(default)]
    pub resource_schema: BTreeMap<String, f64>,
    /// Anchors per axis; unlisted axes use `[0, 1]`.
    #[serde(default)]
    pub anchors: BTreeMap<Axis, Anchor>,
    /// Explicit weights; overrides the preset when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Weights>,
    #[serde(default = "default_min_family_size")]
    pub min_family_size: usize,
    /// Seed manifest.
    #[serde(default)]
    pub seeds: Vec<String>,
    /// Horizon cap `H` on uninterrupted actions.
    pub horizon_cap: f64,
    /// Depth anchor `D` for plan depth.
    pub depth_anchor: f64,
    /// Decay rate mapped to a persistence score of `1/e`.
    pub lambda_max: f64,
    #[serde(default = "default_recall_k")]
    pub recall_k: usize,
    /// Recall@K supplied by the harness when traces carry no retrieval outcomes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recall_at_k: Option<f64>,
    /// Tool-set size prior `S_max`.
    pub size_prior_max: f64,
    /// Revision scale `Z`.
    pub revision_scale: f64,
    #[serde(default)]
    pub stage_weights: StageWeights,
    #[serde(default)]
    pub comm_penalty: CommPenalty,
    #[serde(default)]
    pub loop_thresholds: LoopThresholds,
    #[serde(default)]
    pub severity_weights: SeverityWeights,
    /// Declares that stated probabilities are scored with a proper rule.
    #[serde(default)]
    pub proper_scoring: bool,
    /// Price card; derived from trace costs when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_per_hour: Option<f64>,
    /// Global success threshold for throughput; per-task targets when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quality_star: Option<f64>,
}

impl Battery {
    /// Checks every structural invariant of the battery.
    pub fn validate(&self) -> Result<()> {
        for (axis, anchor) in &self.anchors {
            anchor.check(*axis)?;
        }
        if self.min_family_size < 5 {
            return Err(invalid(alloc::format!("min_family_size must be >= 5, got {}", self.min_family_size)));
        }
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        let mut family_names = BTreeSet::new();
        for f in &self.families {
            if !family_names.insert(f.name.as_str()) {
                return Err(invalid(alloc::format!("duplicate family `{}`", f.name)));
            }
            if !open_unit(f.threshold) {
                return Err(invalid(alloc::format!("family `{}` threshold must lie in (0, 1)", f.name)));
            }
        }
        let mut sizes: BTreeMap<&str, usize> = family_names.iter().map(|n| (*n, 0)).collect();
        let mut task_ids = BTreeSet::new();
        for t in &self.tasks {
            if !task_ids.insert(t.id.as_str()) {
                return Err(invalid(alloc::format!("duplicate task `{}`", t.id)));
            }
            match sizes.get_mut(t.family.as_str()) {
                Some(n) => *n += 1,
                None => return Err(invalid(alloc::format!("task `{}` names unknown family `{}`", t.id, t.family))),
            }
            if !open_unit(t.quality_target) {
                return Err(invalid(alloc::format!("task `{}` quality target must lie in (0, 1)", t.id)));
            }
            if let Some(p) = t.reference_prob {
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid(alloc::format!("task `{}` reference_prob outside [0, 1]", t.id)));
                }
            }
        }
        for (family, size) in sizes {
            if size < self.min_family_size {
                return Err(Error::FamilyTooSmall { family: family.to_string(), size, min: self.min_family_size });
            }
        }
        for (kind, cost) in &self.resource_schema {
            if !(*cost >= 0.0 && cost.is_finite()) {
                return Err(invalid(alloc::format!("resource kind `{kind}` has a negative cost")));
            }
        }
        let positive = [
            ("horizon_cap", self.horizon_cap),
            ("depth_anchor", self.depth_anchor),
            ("lambda_max", self.lambda_max),
            ("size_prior_max", self.size_prior_max),
            ("revision_scale", self.revision_scale),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(alloc::format!("{name} must be positive")));
            }
        }
        let sw = self.stage_weights;
        if [sw.plan, sw.implement, sw.verify].iter().any(|w| *w < 0.0) || libm::fabs(sw.plan + sw.implement + sw.verify - 1.0) > 1e-9 {
            return Err(invalid("stage weights must be nonnegative and sum to 1".into()));
        }
        if let Some(w) = &self.weights {
            if w.values().any(|w| !(*w >= 0.0 && w.is_finite())) {
                return Err(invalid("axis weights must be nonnegative".into()));
            }
        }
        if let Some(r) = self.recall_at_k {
            if !(0.0..=1.0).contains(&r) {
                return Err(invalid("recall_at_k outside [0, 1]".into()));
            }
        }
        Ok(())
    }

    pub fn anchor(&self, axis: Axis) -> Anchor {
        self.anchors.get(&axis).copied().unwrap_or_default()
    }

    pub fn weights_for(&self, preset: Preset) -> Weights {
        self.weights.clone().unwrap_or_else(|| preset.weights())
    }

    pub fn task(&self, id: &str) -> Option<&TaskSpec> {
        self.tasks.iter().find(|t| t.id == id)
    }

    pub fn family_sizes(&self) -> BTreeMap<&str, usize> {
        let mut sizes: BTreeMap<&str, usize> = self.families.iter().map(|f| (f.name.as_str(), 0)).collect();
        for t in &self.tasks {
            *sizes.entry(t.family.as_str()).or_default() += 1;
        }
        sizes
    }

    /// SHA-256 over the canonical `kind\tcost\n` listing of the resource schema.
    pub fn schema_hash(&self) -> String {
        let mut canon = String::new();
        for (kind, cost) in &self.resource_schema {
            let _ = writeln!(canon, "{kind}\t{cost:?}");
        }
        hex(&Sha256::digest(canon.as_bytes()))
    }

    pub fn index(&self) -> TaskIndex<'_> {
        TaskIndex::new(self)
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidBattery(msg)
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Task lookup by id, resolving family index and quality target.
#[derive(Debug, Clone)]
pub struct TaskIndex<'a> {
    by_id: BTreeMap<&'a str, (usize, usize)>,
    battery: &'a Battery,
}

impl<'a> TaskIndex<'a> {
    pub fn new(battery: &'a Battery) -> Self {
        let fam: BTreeMap<&str, usize> = battery.families.iter().enumerate().map(|(i, f)| (f.name.as_str(), i)).collect();
        let by_id =
            battery.tasks.iter().enumerate().filter_map(|(i, t)| fam.get(t.family.as_str()).map(|f| (t.id.as_str(), (i, *f)))).collect();
        Self { by_id, battery }
    }

    pub fn battery(&self) -> &'a Battery {
        self.battery
    }

    pub fn task(&self, id: &str) -> Result<&'a TaskSpec> {
        self.by_id
            .get(id)
            .map(|(i, _)| &self.battery.tasks[*i])
            .ok_or_else(|| crate::error::domain!("trace references unknown task `{id}`"))
    }

    pub fn family_of(&self, id: &str) -> Result<usize> {
        self.by_id.get(id).map(|(_, f)| *f).ok_or_else(|| crate::error::domain!("trace references unknown task `{id}`"))
    }

    /// Whether the episode met its success threshold.
    pub fn success(&self, trace: &EpisodeTrace) -> Result<bool> {
        Ok(trace.quality >= self.task(&trace.task_id)?.quality_target)
    }
}

/// Mean quality of a family and whether it clears the family threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyAggregate {
    pub family: String,
    pub mean_quality: f64,
    pub episodes: usize,
    pub threshold: f64,
    pub covered: bool,
}

/// Per-family mean quality and coverage indicator; families without traces are omitted.
pub fn family_aggregate(battery: &Battery, traces: &[&EpisodeTrace]) -> Result<Vec<FamilyAggregate>> {
    let index = battery.index();
    let mut acc = alloc::vec![(0.0f64, 0usize); battery.families.len()];
    for t in traces {
        let f = index.family_of(&t.task_id)?;
        acc[f].0 += t.quality;
        acc[f].1 += 1;
    }
    Ok(battery
        .families
        .iter()
        .zip(acc)
        .filter(|(_, (_, n))| *n > 0)
        .map(|(f, (sum, n))| {
            let mean = sum / n as f64;
            FamilyAggregate {
                family: f.name.clone(),
                mean_quality: mean,
                episodes: n,
                threshold: f.threshold,
                covered: mean >= f.threshold,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityItem {
    pub code: char,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub items: Vec<AdmissibilityItem>,
    pub schema_hash: String,
    pub passed: bool,
}

/// Checks the five admissibility conditions for a battery and its traces.
pub fn validate_admissibility(battery: &Battery, traces: &[EpisodeTrace]) -> AdmissibilityReport {
    let mut items = Vec::new();
    let mut push = |code: char, name: &str, pass: bool, detail: String| {
        items.push(AdmissibilityItem { code, name: name.into(), pass, detail });
    };

    push(
        'a',
        "proper scoring declared",
        battery.proper_scoring,
        if battery.proper_scoring { "declared".into() } else { "proper_scoring is not declared".into() },
    );

    let small: Vec<String> = battery
        .family_sizes()
        .into_iter()
        .filter(|(_, n)| *n < battery.min_family_size)
        .map(|(f, n)| alloc::format!("{f} ({n})"))
        .collect();
    push(
        'b',
        "family size",
        small.is_empty(),
        if small.is_empty() {
            alloc::format!("all families have >= {} tasks", battery.min_family_size)
        } else {
            alloc::format!("below {}: {}", battery.min_family_size, small.join(", "))
        },
    );

    let seen: BTreeSet<&str> = traces.iter().map(|t| t.drift_tag.as_str()).collect();
    let missing: Vec<&str> = battery.drifts.iter().map(|d| d.name.as_str()).filter(|d| !seen.contains(d)).collect();
    let catalog: BTreeSet<&str> = battery.drifts.iter().map(|d| d.name.as_str()).collect();
    let unknown: Vec<&str> = seen.iter().copied().filter(|d| !catalog.contains(d)).collect();
    let mut detail = if missing.is_empty() {
        alloc::format!("{} drifts exercised", catalog.len())
    } else {
        alloc::format!("drifts never exercised: {}", missing.join(", "))
    };
    if !unknown.is_empty() {
        let _ = write!(detail, "; tags outside the catalog: {}", unknown.join(", "));
    }
    push('c', "drift coverage", missing.is_empty(), detail);

    let hash = battery.schema_hash();
    let logged: BTreeSet<&str> = traces.iter().filter_map(|t| t.schema_hash.as_deref()).collect();
    let foreign: Vec<&str> = logged.iter().copied().filter(|h| *h != hash).collect();
    push(
        'd',
        "fixed resource schema",
        foreign.is_empty(),
        if foreign.is_empty() {
            alloc::format!("schema {hash}")
        } else {
            alloc::format!("{} distinct schema hashes in window", logged.len() + usize::from(!logged.contains(hash.as_str())))
        },
    );

    let manifest: BTreeSet<&str> = battery.seeds.iter().map(String::as_str).collect();
    let stray: BTreeSet<&str> = traces.iter().map(|t| t.seed_id.as_str()).filter(|s| !manifest.contains(s)).collect();
    push(
        'e',
        "seed manifest",
        stray.is_empty(),
        if stray.is_empty() {
            alloc::format!("{} seeds in manifest", manifest.len())
        } else {
            alloc::format!("seeds outside manifest: {}", stray.into_iter().collect::<Vec<_>>().join(", "))
        },
    );

    let passed = items.iter().all(|i| i.pass);
    AdmissibilityReport { items, schema_hash: hash, passed }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Battery with `families` families of five tasks each, all thresholds 0.5.
    pub fn battery(families: usize) -> Battery {
        let mut tasks = Vec::new();
        let mut fams = Vec::new();
        for f in 0..families {
            let name = alloc::format!("f{f}");
            for k in 0..5 {
                tasks.push(TaskSpec {
                    id: alloc::format!("{name}t{k}"),
                    family: name.clone(),
                    quality_target: 0.5,
                    required_tools: Vec::new(),
                    reference_prob: Some(0.5),
                });
            }
            fams.push(FamilySpec { name, threshold: 0.5, human_parity_threshold: None });
        }
        Battery {
            tasks,
            families: fams,
            drifts: alloc::vec![DriftSpec { name: "none".into(), magnitude: 0.0 }],
            resource_schema: [("tokens".to_string(), 1.0)].into_iter().collect(),
            anchors: BTreeMap::new(),
            weights: None,
            min_family_size: 5,
            seeds: alloc::vec!["s0".into()],
            horizon_cap: 10.0,
            depth_anchor: 8.0,
            lambda_max: 0.1,
            recall_k: 10,
            recall_at_k: None,
            size_prior_max: 7.0,
            revision_scale: 0.1,
            stage_weights: StageWeights::default(),
            comm_penalty: CommPenalty::default(),
            loop_thresholds: LoopThresholds::default(),
            severity_weights: SeverityWeights::default(),
            proper_scoring: true,
            cost_per_hour: None,
            quality_star: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::battery;
    use super::*;

    fn traces(task: &str, qs: &[f64]) -> Vec<EpisodeTrace> {
        qs.iter().map(|q| EpisodeTrace::new(task, *q)).collect()
    }

    #[test]
    fn fixture_is_valid() {
        battery(2).validate().unwrap();
    }

    #[test]
    fn degenerate_anchor() {
        let mut b = battery(1);
        b.anchors.insert(Axis::P, Anchor { lower: 0.5, upper: 0.5 });
        assert_eq!(b.validate(), Err(Error::DegenerateAnchor(Axis::P)));
    }

    #[test]
    fn family_too_small() {
        let mut b = battery(1);
        b.tasks.pop();
        assert!(matches!(b.validate(), Err(Error::FamilyTooSmall { size: 4, min: 5, .. })));
    }

    #[test]
    fn coverage_is_inclusive() {
        let mut b = battery(2);
        b.families[0].threshold = 0.7;
        b.families[1].threshold = 0.6;
        let mut ts = traces("f0t0", &[0.8, 0.6]);
        ts.extend(traces("f1t0", &[0.5, 0.5]));
        let refs: Vec<&EpisodeTrace> = ts.iter().collect();
        let agg = family_aggregate(&b, &refs).unwrap();
        assert!((agg[0].mean_quality - 0.7).abs() < 1e-12);
        assert!(agg[0].covered);
        assert!(!agg[1].covered);
    }

    #[test]
    fn empty_family_is_excluded() {
        let b = battery(3);
        let ts = traces("f1t2", &[0.9]);
        let refs: Vec<&EpisodeTrace> = ts.iter().collect();
        let agg = family_aggregate(&b, &refs).unwrap();
        assert_eq!(agg.len(), 1);
        assert_eq!(agg[0].family, "f1");
    }

    #[test]
    fn admissibility_flags_each_condition() {
        let mut b = battery(1);
        b.drifts.push(DriftSpec { name: "shifted".into(), magnitude: 0.3 });
        b.proper_scoring = false;
        let mut ts = traces("f0t0", &[0.5, 0.5]);
        ts[1].seed_id = "rogue".into();
        ts[0].schema_hash = Some("deadbeef".into());
        let r = validate_admissibility(&b, &ts);
        let pass: Vec<bool> = r.items.iter().map(|i| i.pass).collect();
        assert_eq!(pass, [false, true, false, false, false]);
        assert!(!r.passed);
    }

    #[test]
    fn schema_hash_is_order_free_and_sensitive() {
        let b = battery(1);
        let h = b.schema_hash();
        assert_eq!(h.len(), 64);
        let mut c = b.clone();
        c.resource_schema.insert("gpu_seconds".into(), 0.5);
        assert_ne!(h, c.schema_hash());
    }
}

//! Seeded archetype agents whose traces reproduce a target axis profile.
//!
//! Each axis is generated so that its estimator recovers the target up to
//! count quantization when the noise scale is zero:
//!
//! - A and P: integer action counts and plan depths around `x * 100`.
//! - G and T: a share of covered families, a tool-category set and a success
//!   count chosen so that `cbrt(cov * succ * size)` hits T.
//! - S: every solo run has a concurrency-3 twin with quality `q + s (1 - q)`.
//! - W: stated probabilities with a fixed error against a 0.5 reference.
//! - M: exponential decay at the rate mapped to M, with Recall@K equal to M.
//! - R: three audited revision events sized to the target.
//! - $: per-episode cost set from the realized success count.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::axis::Axis;
use crate::battery::{Battery, CommPenalty, DriftSpec, FamilySpec, LoopThresholds, SeverityWeights, StageWeights, TaskSpec};
use crate::dynamics::{Checkpoint, CheckpointSeries};
use crate::error::{domain, Result};
use crate::frontier::PolicyRun;
use crate::gates::{DailyIndex, MaintenanceLog};
use crate::trace::{Ablation, EpisodeTrace, Interval, RevisionEvent, StageAutonomy};

pub const ARCHETYPE_FAMILIES: usize = 100;
const TASKS_PER_FAMILY: usize = 5;
const HORIZON: f64 = 100.0;
const DEPTH: f64 = 100.0;
const TOOL_CATEGORIES: usize = 8;
const MAX_EXTRA_TOOLS: usize = 4;
const SIZE_PRIOR_MAX: f64 = 8.0;
const REVISION_SCALE: f64 = 0.1;
const PERSISTENCE_FAMILIES: usize = 20;
/// Lags in days for the persistence probes; ten probes per lag and family.
pub const PERSISTENCE_LAGS: [f64; 10] = [0.0, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0, 14.0, 21.0, 30.0];
const COVERED_MIN_SUCCESS: f64 = 0.7;
const UNCOVERED_MAX_SUCCESS: f64 = 0.3;
const DRIFTS: [(&str, f64); 3] = [("none", 0.0), ("ui-minor", 0.1), ("api-moderate", 0.3)];
const SEEDS: usize = 100;
const H_MAX: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Archetype {
    Rpa,
    AgenticLlm,
    SelfImproving,
    Orchestrator,
}

impl Archetype {
    pub const ALL: [Archetype; 4] = [Archetype::Rpa, Archetype::AgenticLlm, Archetype::SelfImproving, Archetype::Orchestrator];

    pub fn name(self) -> &'static str {
        match self {
            Archetype::Rpa => "rpa",
            Archetype::AgenticLlm => "agentic-llm",
            Archetype::SelfImproving => "self-improving",
            Archetype::Orchestrator => "orchestrator",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Archetype::Rpa => "RPA Bot",
            Archetype::AgenticLlm => "Agentic LLM",
            Archetype::SelfImproving => "Self-Improving",
            Archetype::Orchestrator => "Orchestrator",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    /// Target means for A, G, P, M, T, R, S, W and $.
    pub fn targets(self) -> BTreeMap<Axis, f64> {
        let v = match self {
            Archetype::Rpa => [0.98, 0.06, 0.03, 0.12, 0.12, 0.00, 0.00, 0.32, 0.41],
            Archetype::AgenticLlm => [0.64, 0.33, 0.47, 0.43, 0.59, 0.00, 0.18, 0.58, 0.37],
            Archetype::SelfImproving => [0.68, 0.36, 0.54, 0.51, 0.63, 0.27, 0.23, 0.61, 0.42],
            Archetype::Orchestrator => [0.73, 0.41, 0.66, 0.60, 0.76, 0.38, 0.46, 0.65, 0.48],
        };
        use Axis::*;
        [A, G, P, M, T, R, S, W, Dollar].into_iter().zip(v).collect()
    }

    /// Reference index for the archetype profile.
    pub fn table_index(self) -> f64 {
        match self {
            Archetype::Rpa => 0.13,
            Archetype::AgenticLlm => 0.40,
            Archetype::SelfImproving => 0.47,
            Archetype::Orchestrator => 0.59,
        }
    }

    pub fn kappa(self) -> f64 {
        match self {
            Archetype::Rpa | Archetype::AgenticLlm => 0.0,
            Archetype::SelfImproving => 0.007,
            Archetype::Orchestrator => 0.012,
        }
    }

    /// Reference 95% interval on the improvement rate, where one exists.
    pub fn kappa_interval(self) -> Option<[f64; 2]> {
        match self {
            Archetype::SelfImproving => Some([0.004, 0.010]),
            Archetype::Orchestrator => Some([0.009, 0.015]),
            _ => None,
        }
    }

    fn kappa_families(self) -> usize {
        if self == Archetype::Orchestrator {
            2
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeSpec {
    pub archetype: Archetype,
    pub targets: BTreeMap<Axis, f64>,
    pub kappa: f64,
    /// Multiplier on every perturbation; zero gives a noiseless generator.
    pub noise: f64,
    /// Solo runs per family.
    pub runs: usize,
    pub seed: u64,
}

impl ArchetypeSpec {
    pub fn new(archetype: Archetype, seed: u64) -> Self {
        Self { archetype, targets: archetype.targets(), kappa: archetype.kappa(), noise: 1.0, runs: 100, seed }
    }

    pub fn check(&self) -> Result<()> {
        for (axis, v) in &self.targets {
            if !(0.0..=1.0).contains(v) {
                return Err(domain!("target for {} outside [0, 1]", axis.letter()));
            }
        }
        for axis in [Axis::A, Axis::G, Axis::P, Axis::M, Axis::T, Axis::R, Axis::S, Axis::W, Axis::Dollar] {
            if !self.targets.contains_key(&axis) {
                return Err(domain!("missing target for {}", axis.letter()));
            }
        }
        if self.target(Axis::M) <= 0.0 {
            return Err(domain!("the persistence generator needs M > 0"));
        }
        if self.target(Axis::Dollar) <= 0.0 {
            return Err(domain!("the throughput generator needs $ > 0"));
        }
        if self.target(Axis::S) >= 0.5 {
            return Err(domain!("the sociality generator supports S < 0.5"));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(domain!("noise scale must lie in [0, 1]"));
        }
        if self.runs < TASKS_PER_FAMILY {
            return Err(domain!("need at least {TASKS_PER_FAMILY} runs per family"));
        }
        if !(self.kappa >= 0.0) {
            return Err(domain!("kappa target must be nonnegative"));
        }
        Ok(())
    }

    fn target(&self, axis: Axis) -> f64 {
        self.targets.get(&axis).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedArchetype {
    pub spec: ArchetypeSpec,
    pub traces: Vec<EpisodeTrace>,
    pub events: Vec<RevisionEvent>,
    pub checkpoints: Vec<CheckpointSeries>,
    pub maintenance: Option<MaintenanceLog>,
    pub policy_runs: Vec<PolicyRun>,
}

fn family_name(f: usize) -> String {
    format!("fam{f:03}")
}

fn task_id(f: usize, k: usize) -> String {
    format!("fam{f:03}-t{k}")
}

fn tool_name(c: usize) -> String {
    format!("tool{c}")
}

/// The battery all archetypes are scored on.
pub fn archetype_battery() -> Battery {
    let mut tasks = Vec::new();
    let mut families = Vec::new();
    for f in 0..ARCHETYPE_FAMILIES {
        for k in 0..TASKS_PER_FAMILY {
            tasks.push(TaskSpec {
                id: task_id(f, k),
                family: family_name(f),
                quality_target: 0.5,
                required_tools: vec![tool_name((TASKS_PER_FAMILY * f + k) % TOOL_CATEGORIES)],
                reference_prob: Some(0.5),
            });
        }
        families.push(FamilySpec { name: family_name(f), threshold: 0.5, human_parity_threshold: Some(0.85) });
    }
    Battery {
        tasks,
        families,
        drifts: DRIFTS.iter().map(|(n, m)| DriftSpec { name: (*n).into(), magnitude: *m }).collect(),
        resource_schema: [("tokens".into(), 1.0), ("tool_calls".into(), 0.01)].into_iter().collect(),
        anchors: BTreeMap::new(),
        weights: None,
        min_family_size: 5,
        seeds: (0..SEEDS).map(|s| format!("s{s}")).collect(),
        horizon_cap: HORIZON,
        depth_anchor: DEPTH,
        lambda_max: core::f64::consts::LN_2 / 7.0,
        recall_k: 10,
        recall_at_k: None,
        size_prior_max: SIZE_PRIOR_MAX,
        revision_scale: REVISION_SCALE,
        stage_weights: StageWeights::default(),
        comm_penalty: CommPenalty::default(),
        loop_thresholds: LoopThresholds::default(),
        severity_weights: SeverityWeights::default(),
        proper_scoring: true,
        cost_per_hour: None,
        quality_star: None,
    }
}

fn salt(a: Archetype) -> u64 {
    0x5EED_0000 + a as u64
}

/// Tool plan: required categories used, extra categories, and the success
/// share that makes the tool score hit `t`.
fn tool_plan(t: f64, succ_lo: f64, succ_hi: f64) -> Result<(usize, usize, f64)> {
    let mid = 0.5 * (succ_lo + succ_hi);
    if t == 0.0 {
        return Ok((0, 0, mid));
    }
    let mut best: Option<(usize, usize, f64)> = None;
    for c in 1..=TOOL_CATEGORIES {
        for e in 0..=MAX_EXTRA_TOOLS {
            let cov = c as f64 / TOOL_CATEGORIES as f64;
            let size = (libm::log1p((c + e) as f64) / libm::log1p(SIZE_PRIOR_MAX)).min(1.0);
            let succ = t * t * t / (cov * size);
            if succ < succ_lo || succ > succ_hi {
                continue;
            }
            if best.is_none_or(|b| (succ - mid).abs() < (b.2 - mid).abs()) {
                best = Some((c, e, succ));
            }
        }
    }
    best.ok_or_else(|| domain!("no tool plan reaches T = {t} with the success range [{succ_lo}, {succ_hi}]"))
}

/// Successful runs per family: covered families at least 70%, the rest at
/// most 30%, spread as evenly as the capacities allow.
fn success_counts(covered: &[bool], runs: usize, wins: usize) -> Result<Vec<usize>> {
    let floor_c = libm::ceil(COVERED_MIN_SUCCESS * runs as f64) as usize;
    let cap_u = libm::floor(UNCOVERED_MAX_SUCCESS * runs as f64) as usize;
    let mut counts: Vec<usize> = covered.iter().map(|&c| if c { floor_c } else { 0 }).collect();
    let caps: Vec<usize> = covered.iter().map(|&c| if c { runs } else { cap_u }).collect();
    let base: usize = counts.iter().sum();
    let mut left = wins.checked_sub(base).ok_or_else(|| domain!("success count below the coverage floor"))?;
    while left > 0 {
        let mut moved = false;
        for (k, cap) in counts.iter_mut().zip(&caps) {
            if left == 0 {
                break;
            }
            if *k < *cap {
                *k += 1;
                left -= 1;
                moved = true;
            }
        }
        if !moved {
            return Err(domain!("success count above family capacity"));
        }
    }
    Ok(counts)
}

fn jitter_count(rng: &mut ChaCha8Rng, base: i64, cap: i64, width: i64) -> u64 {
    let w = width.min(base).min(cap - base).max(0);
    let j = if w > 0 { rng.gen_range(-w..=w) } else { 0 };
    (base + j) as u64
}

fn uniform(rng: &mut ChaCha8Rng, amp: f64) -> f64 {
    if amp > 0.0 {
        rng.gen_range(-amp..=amp)
    } else {
        0.0
    }
}

pub fn simulate_archetype(spec: &ArchetypeSpec) -> Result<SimulatedArchetype> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ salt(spec.archetype));
    let x = |a: Axis| spec.target(a);
    let fams = ARCHETYPE_FAMILIES;
    let runs = spec.runs;
    let total = fams * runs;

    let n_cov = libm::round(x(Axis::G) * fams as f64) as usize;
    let succ_lo = COVERED_MIN_SUCCESS * n_cov as f64 / fams as f64;
    let succ_hi = (n_cov as f64 + UNCOVERED_MAX_SUCCESS * (fams - n_cov) as f64) / fams as f64;
    let (c_req, c_extra, succ) = tool_plan(x(Axis::T), succ_lo, succ_hi)?;
    let wins = libm::round(succ * total as f64) as usize;

    let mut order: Vec<usize> = (0..fams).collect();
    order.shuffle(&mut rng);
    let mut covered = vec![false; fams];
    for &f in &order[..n_cov] {
        covered[f] = true;
    }
    let counts = success_counts(&covered, runs, wins)?;

    let tools: Vec<String> = (0..c_req).map(tool_name).chain((0..c_extra).map(|e| format!("extra{e}"))).collect();
    let s = x(Axis::S);
    // Keep failing runs low enough that the concurrency twin still fails.
    let lo_max = (0.5 - s) / (1.0 - s) - 1e-3;
    let lo_center = (0.02f64).min(0.5 * lo_max);
    let err = 0.5 * libm::sqrt(1.0 - x(Axis::W));
    let a_base = libm::round(x(Axis::A) * HORIZON) as i64;
    let p_base = libm::round(x(Axis::P) * DEPTH) as i64;
    let width = libm::round(5.0 * spec.noise) as i64;

    let mut solo = Vec::with_capacity(total);
    for (f, &k_f) in counts.iter().enumerate() {
        let mut success = vec![false; runs];
        success[..k_f].fill(true);
        success.shuffle(&mut rng);
        for (r, &ok) in success.iter().enumerate() {
            let i = solo.len();
            let quality =
                if ok { 0.8 + uniform(&mut rng, 0.1 * spec.noise) } else { lo_center + uniform(&mut rng, lo_center * spec.noise) };
            let mut t = EpisodeTrace::new(task_id(f, r % TASKS_PER_FAMILY), quality);
            t.seed_id = format!("s{}", r % SEEDS);
            t.drift_tag = DRIFTS[r % DRIFTS.len()].0.into();
            t.uninterrupted_actions = jitter_count(&mut rng, a_base, HORIZON as i64, width);
            t.plan_depth = jitter_count(&mut rng, p_base, DEPTH as i64, width);
            t.timestamp = i as f64 * 0.01;
            t.verified_actions = t.uninterrupted_actions.max(1);
            if !tools.is_empty() {
                t.tool_categories_used = vec![tools[i % tools.len()].clone()];
            }
            let truth = (i % 2) as f64;
            t.truth = Some(truth);
            t.stated_prob = Some(if truth == 1.0 { 1.0 - err } else { err });
            solo.push(t);
        }
    }

    let mut traces = Vec::with_capacity(2 * total);
    for t in &solo {
        let mut twin = t.clone();
        twin.concurrency = 3;
        twin.quality = t.quality + s * (1.0 - t.quality);
        twin.stated_prob = None;
        twin.truth = None;
        traces.push(twin);
    }
    traces.splice(0..0, solo);
    let core_wins = traces.iter().filter(|t| t.quality >= 0.5).count();
    let cost = core_wins as f64 / (x(Axis::Dollar) * traces.len() as f64);
    for t in &mut traces {
        t.cost = cost;
    }

    let lambda = -battery_lambda_max() * libm::log(x(Axis::M));
    let per_family = PERSISTENCE_LAGS.len() * 10;
    let hits = libm::round(x(Axis::M) * per_family as f64) as usize;
    for f in 0..PERSISTENCE_FAMILIES.min(fams) {
        let mut hit = vec![false; per_family];
        hit[..hits].fill(true);
        hit.shuffle(&mut rng);
        for (j, &h) in hit.iter().enumerate() {
            let lag = PERSISTENCE_LAGS[j % PERSISTENCE_LAGS.len()];
            let q = 0.9 * libm::exp(-lambda * lag + uniform(&mut rng, 0.05 * spec.noise));
            let mut t = EpisodeTrace::new(task_id(f, j % TASKS_PER_FAMILY), q.min(1.0));
            t.seed_id = format!("s{}", j % SEEDS);
            t.lag_days = Some(lag);
            t.retrieval_hit = Some(h);
            t.timestamp = lag * 24.0;
            traces.push(t);
        }
    }

    let events = revision_events(spec.archetype, x(Axis::R));
    let index = spec.archetype.table_index();
    let checkpoints = (0..spec.archetype.kappa_families())
        .map(|k| {
            let pts = (0..16)
                .map(|j| {
                    let r = 2.0 * j as f64;
                    Checkpoint { t: j as f64, resource: r, capability: index + spec.kappa * r + uniform(&mut rng, 0.004 * spec.noise) }
                })
                .collect();
            CheckpointSeries::new(Some(family_name(k)), pts)
        })
        .collect::<Result<Vec<_>>>()?;
    let maintenance = (x(Axis::R) > 0.0).then(|| MaintenanceLog {
        baseline: index,
        days: (0..7)
            .map(|d| DailyIndex { day: d, index: index * if d == 3 { 0.86 } else { 0.9 + 0.01 * d as f64 }, human_patch: false })
            .collect(),
    });
    let policy_runs = (0..5)
        .map(|p| {
            let share = p as f64 / 4.0;
            PolicyRun {
                policy: format!("{}-p{p}", spec.archetype.name()),
                quality: (index + 0.35 * share + 0.05).min(1.0),
                interventions: share * H_MAX,
            }
        })
        .collect();

    Ok(SimulatedArchetype { spec: spec.clone(), traces, events, checkpoints, maintenance, policy_runs })
}

fn battery_lambda_max() -> f64 {
    core::f64::consts::LN_2 / 7.0
}

fn revision_events(archetype: Archetype, r: f64) -> Vec<RevisionEvent> {
    let rho = 0.9;
    let stage = StageAutonomy { plan: rho, implement: rho, verify: rho };
    let base = |i: usize, did: f64| RevisionEvent {
        id: format!("{}-rev{i}", archetype.name()),
        revised_pre: 0.6,
        revised_post: 0.6 + did + 0.01,
        control_pre: 0.6,
        control_post: 0.61,
        stage_autonomy: stage,
        change_kind: if archetype == Archetype::Orchestrator && i == 0 { "tool-api".into() } else { "prompt".into() },
        artifacts: vec![format!("diff-{i}")],
        ablation: None,
        did_ci: None,
        day: Some(3.0 * i as f64),
    };
    if r <= 0.0 {
        return vec![base(0, 0.0)];
    }
    let did = r * REVISION_SCALE / (3.0 * rho);
    (0..3)
        .map(|i| RevisionEvent {
            ablation: Some(Ablation { capability: 0.6, control_pre: None, control_post: None }),
            did_ci: Some(Interval { lo: 0.5 * did, hi: 1.5 * did }),
            ..base(i, did)
        })
        .collect()
}

pub fn simulate_archetypes(specs: &[ArchetypeSpec]) -> Result<Vec<SimulatedArchetype>> {
    specs.iter().map(simulate_archetype).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_is_valid() {
        archetype_battery().validate().unwrap();
    }

    #[test]
    fn tool_plans_exist_for_every_archetype() {
        for a in Archetype::ALL {
            let t = a.targets();
            let n = libm::round(t[&Axis::G] * 100.0);
            let lo = 0.7 * n / 100.0;
            let hi = (n + 0.3 * (100.0 - n)) / 100.0;
            let (c, e, succ) = tool_plan(t[&Axis::T], lo, hi).unwrap();
            let cov = c as f64 / 8.0;
            let size = libm::log1p((c + e) as f64) / libm::log1p(8.0);
            assert!((libm::cbrt(cov * succ * size.min(1.0)) - t[&Axis::T]).abs() < 1e-12);
        }
    }

    #[test]
    fn success_counts_respect_bands() {
        let covered = [true, false, true, false];
        let k = success_counts(&covered, 10, 20).unwrap();
        assert_eq!(k.iter().sum::<usize>(), 20);
        assert!(k[0] >= 7 && k[2] >= 7 && k[1] <= 3 && k[3] <= 3);
        assert!(success_counts(&covered, 10, 10).is_err());
        assert!(success_counts(&covered, 10, 27).is_err());
    }

    #[test]
    fn deterministic_for_a_seed() {
        let spec = ArchetypeSpec { runs: 10, ..ArchetypeSpec::new(Archetype::SelfImproving, 7) };
        assert_eq!(simulate_archetype(&spec).unwrap(), simulate_archetype(&spec).unwrap());
    }
}

use alloc::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::axis::Axis;
use crate::dynamics::{Link, Step};
use crate::error::{domain, Error, Result};

/// One axis threshold: `>= min`, or `> min` when `strict`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Threshold {
    AtLeast(f64),
    Above { above: f64 },
}

impl Threshold {
    pub fn value(self) -> f64 {
        match self {
            Threshold::AtLeast(v) | Threshold::Above { above: v } => v,
        }
    }

    pub fn holds(self, x: f64) -> bool {
        match self {
            Threshold::AtLeast(v) => x >= v,
            Threshold::Above { above } => x > above,
        }
    }

    fn describe(self) -> alloc::string::String {
        match self {
            Threshold::AtLeast(v) => alloc::format!(">= {v}"),
            Threshold::Above { above } => alloc::format!("> {above}"),
        }
    }
}

impl core::fmt::Display for Threshold {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.describe())
    }
}

pub type Row = BTreeMap<Axis, Threshold>;

/// Axis thresholds for AAI-2 through AAI-4. E is optional at every level
/// and is absent unless a domain adds it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub aai2: Row,
    pub aai3: Row,
    pub aai4: Row,
}

impl Default for ThresholdTable {
    fn default() -> Self {
        use Axis::*;
        let row = |v: [f64; 9], r: Threshold| -> Row {
            let axes = [A, G, P, M, T, R, S, W, Dollar];
            axes.iter().zip(v).map(|(&a, x)| (a, if a == R { r } else { Threshold::AtLeast(x) })).collect()
        };
        Self {
            aai2: row([0.6, 0.3, 0.5, 0.5, 0.5, 0.0, 0.2, 0.6, 0.4], Threshold::Above { above: 0.0 }),
            aai3: row([0.75, 0.5, 0.7, 0.7, 0.7, 0.4, 0.5, 0.75, 0.6], Threshold::AtLeast(0.4)),
            aai4: row([0.9, 0.9, 0.9, 0.85, 0.8, 0.6, 0.7, 0.85, 0.8], Threshold::AtLeast(0.6)),
        }
    }
}

impl ThresholdTable {
    pub fn row(&self, level: u8) -> Option<&Row> {
        match level {
            2 => Some(&self.aai2),
            3 => Some(&self.aai3),
            4 => Some(&self.aai4),
            _ => None,
        }
    }

    pub fn check(&self) -> Result<()> {
        for row in [&self.aai2, &self.aai3, &self.aai4] {
            for (axis, t) in row {
                if !(0.0..=1.0).contains(&t.value()) {
                    return Err(domain!("threshold for {} outside [0, 1]", axis.letter()));
                }
            }
        }
        for (lo, hi) in [(&self.aai2, &self.aai3), (&self.aai3, &self.aai4)] {
            for (axis, t) in lo {
                if let Some(u) = hi.get(axis) {
                    if u.value() < t.value() {
                        return Err(domain!("thresholds for {} decrease across levels", axis.letter()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Numeric readings of the prose gates for AAI-0 and AAI-1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LowerLevels {
    pub aai0_autonomy: f64,
    /// Upper bound reading "P approximately 0".
    pub aai0_planning_max: f64,
    /// Upper bound on the raw tool-category count.
    pub aai0_tools_max: usize,
    pub aai1_autonomy: f64,
    pub aai1_planning: f64,
    pub aai1_tools: usize,
    pub aai1_tool_success: f64,
    /// When set, the upper-bound descriptors of AAI-0 and AAI-1 (`P ~ 0`,
    /// `T <= 1`, `R = 0`) block those levels. Off by default because they make
    /// the assignment non-monotone in the axes.
    pub strict_profile: bool,
}

impl Default for LowerLevels {
    fn default() -> Self {
        Self {
            aai0_autonomy: 0.95,
            aai0_planning_max: 0.05,
            aai0_tools_max: 1,
            aai1_autonomy: 0.5,
            aai1_planning: 0.3,
            aai1_tools: 3,
            aai1_tool_success: 0.6,
            strict_profile: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateMode {
    #[default]
    Base,
    CurvatureAugmented,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaintenanceConfig {
    pub alpha: f64,
    pub days: usize,
}

impl Default for MaintenanceConfig {
    fn default() -> Self {
        Self { alpha: 0.8, days: 7 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InnovationConfig {
    pub alpha_tool: f64,
    pub alpha_rev: f64,
    pub floor: f64,
}

impl Default for InnovationConfig {
    fn default() -> Self {
        Self { alpha_tool: 0.2, alpha_rev: 0.2, floor: 0.8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Aai5Floors {
    pub sociality: f64,
    pub embodiment: f64,
    pub world: f64,
    pub economics: f64,
    /// S and W floor when E is omitted for software agents.
    pub software: f64,
}

impl Default for Aai5Floors {
    fn default() -> Self {
        Self { sociality: 0.9, embodiment: 0.9, world: 0.9, economics: 0.9, software: 0.95 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepConfig {
    pub link: Link,
    pub step: Step,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self { link: Link::Surprisal, step: Step::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChcConfig {
    /// Apply the CHC gates to AAI-2 and above.
    pub enforce: bool,
    pub tau_v: f64,
    pub tau_h: f64,
    /// Human-median working-memory span.
    pub tau_w: Option<f64>,
    /// Human-median delayed recall.
    pub tau_ms: Option<f64>,
    /// Accuracy needed at a list length to count toward the span.
    pub theta: f64,
}

impl Default for ChcConfig {
    fn default() -> Self {
        Self { enforce: false, tau_v: 0.85, tau_h: 0.05, tau_w: None, tau_ms: None, theta: 0.8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GateConfig {
    /// Published improvement-rate threshold. There is no default.
    pub kappa_star: Option<f64>,
    pub mode: GateMode,
    pub thresholds: ThresholdTable,
    pub lower: LowerLevels,
    pub maintenance: MaintenanceConfig,
    /// Tolerance for the ablation checks of expansion closure.
    pub expansion_eps: f64,
    /// Minimum duration of a significant positive rate for AAI-2.
    pub kappa_days: f64,
    /// Largest gap between checkpoints that still counts as consecutive.
    pub max_gap_days: f64,
    /// Families needed for "multi-domain".
    pub multi_domain: usize,
    /// Persistence evidence span for AAI-3.
    pub memory_days: f64,
    pub accel_alpha: f64,
    /// Diminishing-returns bound on curvature.
    pub gamma: f64,
    pub zeta: f64,
    pub coverage_floor: f64,
    /// Share of families that need nonnegative curvature at AAI-5.
    pub curvature_share: f64,
    pub innovation: InnovationConfig,
    pub aai5: Aai5Floors,
    pub step: StepConfig,
    pub chc: ChcConfig,
}

impl Default for GateConfig {
    fn default() -> Self {
        Self {
            kappa_star: None,
            mode: GateMode::Base,
            thresholds: ThresholdTable::default(),
            lower: LowerLevels::default(),
            maintenance: MaintenanceConfig::default(),
            expansion_eps: 0.01,
            kappa_days: 7.0,
            max_gap_days: 1.0,
            multi_domain: 2,
            memory_days: 30.0,
            accel_alpha: 0.05,
            gamma: 0.01,
            zeta: 2.0,
            coverage_floor: 0.95,
            curvature_share: 0.8,
            innovation: InnovationConfig::default(),
            aai5: Aai5Floors::default(),
            step: StepConfig::default(),
            chc: ChcConfig::default(),
        }
    }
}

impl GateConfig {
    pub fn new(kappa_star: f64) -> Self {
        Self { kappa_star: Some(kappa_star), ..Self::default() }
    }

    pub fn kappa_star(&self) -> Result<f64> {
        match self.kappa_star {
            Some(k) if k > 0.0 && k.is_finite() => Ok(k),
            Some(k) => Err(domain!("gates.kappa_star must be positive, got {k}")),
            None => Err(Error::MissingField("gates.kappa_star")),
        }
    }

    pub fn check(&self) -> Result<()> {
        self.kappa_star()?;
        self.thresholds.check()?;
        let unit = [
            ("maintenance.alpha", self.maintenance.alpha),
            ("accel_alpha", self.accel_alpha),
            ("coverage_floor", self.coverage_floor),
            ("curvature_share", self.curvature_share),
            ("chc.tau_v", self.chc.tau_v),
            ("chc.tau_h", self.chc.tau_h),
            ("chc.theta", self.chc.theta),
        ];
        for (name, v) in unit {
            if !(0.0..=1.0).contains(&v) {
                return Err(domain!("gates.{name} outside [0, 1]"));
            }
        }
        if self.maintenance.days == 0 {
            return Err(domain!("gates.maintenance.days must be positive"));
        }
        if !(self.zeta > 0.0) || !(self.gamma >= 0.0) || !(self.expansion_eps >= 0.0) {
            return Err(domain!("gates.zeta must be positive; gamma and expansion_eps nonnegative"));
        }
        if !(self.innovation.alpha_tool > 0.0 && self.innovation.alpha_rev > 0.0) {
            return Err(domain!("innovation calibration constants must be positive"));
        }
        Ok(())
    }
}

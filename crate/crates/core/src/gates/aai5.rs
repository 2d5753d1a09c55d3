//! Superintelligence gates G1-G6.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::curvature::GateCheck;
use super::{FamilyDynamics, GateConfig, Outcome};
use crate::axis::Axis;
use crate::dynamics::step_operator;
use crate::error::{domain, Result};
use crate::num::{mean, sample_sd};

/// Per-task qualities of the agent and the human ensemble on one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanPaired {
    pub family: String,
    pub agent: Vec<f64>,
    pub human: Vec<f64>,
}

/// `(mean_A - mean_H) / (sd(diffs) / sqrt(n))`. Constant differences give
/// an infinite margin with the sign of the difference.
pub fn standardized_margin(agent: &[f64], human: &[f64]) -> Result<f64> {
    if agent.len() != human.len() {
        return Err(crate::Error::Mismatch(format!("{} agent vs {} human qualities", agent.len(), human.len())));
    }
    if agent.len() < 2 {
        return Err(domain!("standardized margin needs at least two paired tasks"));
    }
    let diffs: Vec<f64> = agent.iter().zip(human).map(|(a, h)| a - h).collect();
    let d = mean(&diffs).unwrap_or(0.0);
    let sd = sample_sd(&diffs).unwrap_or(0.0);
    let se = sd / libm::sqrt(diffs.len() as f64);
    Ok(if se > 1e-12 {
        d / se
    } else if d.abs() <= 1e-12 {
        0.0
    } else {
        f64::INFINITY.copysign(d)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMargin {
    pub family: String,
    pub margin: f64,
    pub superhuman: bool,
}

/// Margins per family and the coverage share of families at or above `zeta`.
pub fn coverage(pairs: &[HumanPaired], zeta: f64) -> Result<(Vec<FamilyMargin>, f64)> {
    let mut margins = Vec::with_capacity(pairs.len());
    for p in pairs {
        let margin = standardized_margin(&p.agent, &p.human)?;
        margins.push(FamilyMargin { family: p.family.clone(), margin, superhuman: margin >= zeta });
    }
    let gamma = if margins.is_empty() { 0.0 } else { margins.iter().filter(|m| m.superhuman).count() as f64 / margins.len() as f64 };
    Ok((margins, gamma))
}

/// Monthly rates of ablation-verified tool integrations and revisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnovationCounts {
    pub validated_tools: usize,
    pub validated_revisions: usize,
    pub months: f64,
}

pub fn innovation_index(counts: &InnovationCounts, alpha_tool: f64, alpha_rev: f64) -> Result<f64> {
    if !(counts.months > 0.0) {
        return Err(domain!("innovation window must be positive"));
    }
    let tool = counts.validated_tools as f64 / counts.months;
    let rev = counts.validated_revisions as f64 / counts.months;
    Ok((alpha_tool * tool + alpha_rev * rev).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aai5Evidence {
    pub human_pairs: Vec<HumanPaired>,
    pub innovation: Option<InnovationCounts>,
    /// Composite at AAI-4 certification.
    pub aai4_composite: Option<f64>,
    pub current_composite: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aai5Report {
    pub margins: Vec<FamilyMargin>,
    pub coverage: Option<f64>,
    pub innovation: Option<f64>,
    pub double_step_target: Option<f64>,
    pub g1: GateCheck,
    pub g2: GateCheck,
    pub g3: GateCheck,
    pub g4: GateCheck,
    pub g5: GateCheck,
    pub g6: GateCheck,
}

impl Aai5Report {
    pub fn checks(&self) -> [(&'static str, &GateCheck); 6] {
        [("G1", &self.g1), ("G2", &self.g2), ("G3", &self.g3), ("G4", &self.g4), ("G5", &self.g5), ("G6", &self.g6)]
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.passed())
    }
}

fn floor_check(axes: &BTreeMap<Axis, f64>, floors: &[(Axis, f64)]) -> GateCheck {
    let mut parts = Vec::new();
    let mut outcome = Outcome::Pass;
    for &(axis, floor) in floors {
        match axes.get(&axis) {
            Some(&v) => {
                parts.push(format!("{} {v} vs {floor}", axis.letter()));
                if v < floor {
                    outcome = Outcome::Fail;
                }
            }
            None => {
                parts.push(format!("{} no data", axis.letter()));
                if outcome == Outcome::Pass {
                    outcome = Outcome::Insufficient;
                }
            }
        }
    }
    GateCheck::new(outcome, parts.join(", "))
}

pub fn aai5_gates(
    evidence: &Aai5Evidence,
    axes: &BTreeMap<Axis, f64>,
    families: &[FamilyDynamics],
    software: bool,
    cfg: &GateConfig,
) -> Result<Aai5Report> {
    let (margins, gamma) = coverage(&evidence.human_pairs, cfg.zeta)?;
    let g1 = if margins.is_empty() {
        GateCheck::new(Outcome::Insufficient, "no human-paired data".into())
    } else {
        let all = margins.iter().all(|m| m.superhuman);
        GateCheck::from_bool(all && gamma >= cfg.coverage_floor, format!("coverage {gamma}, every margin >= {}: {all}", cfg.zeta))
    };

    let curv: Vec<Option<f64>> = families.iter().map(|f| f.curvature.as_ref().map(|c| c.delta_kappa_tilde)).collect();
    let g2 = if curv.is_empty() || curv.iter().any(Option::is_none) {
        GateCheck::new(Outcome::Insufficient, "curvature missing".into())
    } else {
        let v: Vec<f64> = curv.into_iter().flatten().collect();
        let share = v.iter().filter(|&&d| d >= 0.0).count() as f64 / v.len() as f64;
        let floor_ok = v.iter().all(|&d| d >= -cfg.gamma);
        GateCheck::from_bool(
            share >= cfg.curvature_share && floor_ok,
            format!("nonnegative curvature on {share} of families, all >= -{}: {floor_ok}", cfg.gamma),
        )
    };

    let f = &cfg.aai5;
    let g3 = if software {
        floor_check(axes, &[(Axis::S, f.software), (Axis::W, f.software)])
    } else if axes.contains_key(&Axis::E) {
        floor_check(axes, &[(Axis::S, f.sociality), (Axis::E, f.embodiment), (Axis::W, f.world)])
    } else {
        floor_check(axes, &[(Axis::S, f.sociality), (Axis::W, f.world)])
    };
    let g4 = floor_check(axes, &[(Axis::Dollar, f.economics)]);

    let innovation =
        evidence.innovation.as_ref().map(|c| innovation_index(c, cfg.innovation.alpha_tool, cfg.innovation.alpha_rev)).transpose()?;
    let g5 = match innovation {
        Some(i) => GateCheck::from_bool(i >= cfg.innovation.floor, format!("I = {i} vs {}", cfg.innovation.floor)),
        None => GateCheck::new(Outcome::Insufficient, "no innovation counts".into()),
    };

    let target = match evidence.aai4_composite {
        Some(c) => {
            let once = step_operator(c, cfg.step.link, cfg.step.step)?;
            Some(step_operator(once, cfg.step.link, cfg.step.step)?)
        }
        None => None,
    };
    let g6 = match (target, evidence.current_composite) {
        (Some(t), Some(c)) => GateCheck::from_bool(c >= t, format!("composite {c} vs double-step target {t}")),
        _ => GateCheck::new(Outcome::Insufficient, "composite history missing".into()),
    };

    Ok(Aai5Report {
        coverage: (!margins.is_empty()).then_some(gamma),
        margins,
        innovation,
        double_step_target: target,
        g1,
        g2,
        g3,
        g4,
        g5,
        g6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margin_example() {
        // Differences 0.05 and 0.15: mean 0.1, sd 0.0707, se 0.05.
        let m = standardized_margin(&[0.55, 0.65], &[0.5, 0.5]).unwrap();
        assert!((m - 2.0).abs() < 1e-9);
        assert!(standardized_margin(&[0.5], &[0.4]).is_err());
        assert!(standardized_margin(&[0.5, 0.6], &[0.4]).is_err());
        assert_eq!(standardized_margin(&[0.6, 0.7], &[0.5, 0.6]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn coverage_full() {
        let p = HumanPaired { family: "f".into(), agent: alloc::vec![0.55, 0.65], human: alloc::vec![0.5, 0.5] };
        let (_, g) = coverage(&[p.clone(), p], 2.0 - 1e-9).unwrap();
        assert_eq!(g, 1.0);
    }

    #[test]
    fn innovation_boundary() {
        let c = InnovationCounts { validated_tools: 2, validated_revisions: 2, months: 1.0 };
        let i = innovation_index(&c, 0.2, 0.2).unwrap();
        assert!((i - 0.8).abs() < 1e-12);
        let c = InnovationCounts { validated_tools: 20, validated_revisions: 0, months: 1.0 };
        assert_eq!(innovation_index(&c, 0.2, 0.2).unwrap(), 1.0);
    }
}

//! Maintenance and expansion closure checks.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::trace::RevisionEvent;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DailyIndex {
    pub day: i64,
    pub index: f64,
    #[serde(default)]
    pub human_patch: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaintenanceLog {
    pub baseline: f64,
    pub days: Vec<DailyIndex>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureResult {
    pub passed: bool,
    /// Maintenance: smallest `index - alpha * baseline`. Expansion: the gain.
    pub margin: Option<f64>,
    pub reason: Option<String>,
}

impl ClosureResult {
    fn fail(reason: &str, margin: Option<f64>) -> Self {
        Self { passed: false, margin, reason: Some(reason.into()) }
    }
}

/// Every day of a run of at least `days` consecutive measurements keeps the
/// index at `alpha * baseline` or better, with no human patch.
pub fn maintenance_closure(log: &MaintenanceLog, alpha: f64, days: usize) -> Result<ClosureResult> {
    if !(log.baseline > 0.0) {
        return Err(domain!("maintenance baseline must be positive"));
    }
    if log.days.len() < days {
        return Ok(ClosureResult::fail("insufficient evidence", None));
    }
    let mut sorted = log.days.clone();
    sorted.sort_by_key(|d| d.day);
    if sorted.windows(2).any(|w| w[1].day != w[0].day + 1) {
        return Ok(ClosureResult::fail("window broken", None));
    }
    let floor = alpha * log.baseline;
    let margin = sorted.iter().map(|d| d.index - floor).fold(f64::INFINITY, f64::min);
    if sorted.iter().any(|d| d.human_patch) {
        return Ok(ClosureResult::fail("human patch logged", Some(margin)));
    }
    if margin < 0.0 {
        return Ok(ClosureResult::fail("index fell below alpha * baseline", Some(margin)));
    }
    Ok(ClosureResult { passed: true, margin: Some(margin), reason: None })
}

/// Ablation-verified gain: significant DiD, the ablated system back at its
/// pre-revision capability, and no gain left after ablation.
pub fn expansion_closure(event: &RevisionEvent, eps: f64) -> ClosureResult {
    let did = event.did();
    let Some(ablation) = &event.ablation else {
        return ClosureResult::fail("ablation missing", Some(did));
    };
    let Some(ci) = event.did_ci else {
        return ClosureResult::fail("gain interval missing", Some(did));
    };
    if !(did > 0.0) {
        return ClosureResult::fail("no positive gain", Some(did));
    }
    if !(ci.lo > 0.0) {
        return ClosureResult::fail("gain interval includes 0", Some(did));
    }
    if (ablation.capability - event.revised_pre).abs() > eps {
        return ClosureResult::fail("ablated capability did not return to pre", Some(did));
    }
    let control_delta = match (ablation.control_pre, ablation.control_post) {
        (Some(a), Some(b)) => b - a,
        _ => 0.0,
    };
    let ablated_did = (ablation.capability - event.revised_pre) - control_delta;
    if ablated_did.abs() > eps {
        return ClosureResult::fail("gain persists after ablation", Some(did));
    }
    ClosureResult { passed: true, margin: Some(did), reason: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{Ablation, Interval, StageAutonomy};

    fn log(values: &[f64]) -> MaintenanceLog {
        MaintenanceLog {
            baseline: 0.5,
            days: values.iter().enumerate().map(|(i, &v)| DailyIndex { day: i as i64, index: v, human_patch: false }).collect(),
        }
    }

    #[test]
    fn maintenance_examples() {
        assert!(maintenance_closure(&log(&[0.4, 0.45, 0.5, 0.41, 0.4, 0.6, 0.42]), 0.8, 7).unwrap().passed);
        let r = maintenance_closure(&log(&[0.4, 0.45, 0.5, 0.39, 0.4, 0.6, 0.42]), 0.8, 7).unwrap();
        assert!(!r.passed);
        assert!((r.margin.unwrap() + 0.01).abs() < 1e-12);
        let mut patched = log(&[0.5; 7]);
        patched.days[3].human_patch = true;
        assert!(!maintenance_closure(&patched, 0.8, 7).unwrap().passed);
        let mut gap = log(&[0.5; 7]);
        gap.days[6].day = 9;
        assert_eq!(maintenance_closure(&gap, 0.8, 7).unwrap().reason.as_deref(), Some("window broken"));
        assert!(!maintenance_closure(&log(&[0.5; 6]), 0.8, 7).unwrap().passed);
    }

    fn event(ablated: Option<f64>, ci: Option<(f64, f64)>) -> RevisionEvent {
        RevisionEvent {
            id: "e".into(),
            revised_pre: 0.78,
            revised_post: 0.84,
            control_pre: 0.78,
            control_post: 0.80,
            stage_autonomy: StageAutonomy { plan: 1.0, implement: 1.0, verify: 1.0 },
            change_kind: "tool".into(),
            artifacts: alloc::vec!["diff".into()],
            ablation: ablated.map(|c| Ablation { capability: c, control_pre: None, control_post: None }),
            did_ci: ci.map(|(lo, hi)| Interval { lo, hi }),
            day: None,
        }
    }

    #[test]
    fn expansion_examples() {
        assert!(expansion_closure(&event(Some(0.78), Some((0.01, 0.07))), 0.01).passed);
        assert!(!expansion_closure(&event(Some(0.84), Some((0.01, 0.07))), 0.01).passed);
        assert!(!expansion_closure(&event(Some(0.78), Some((-0.01, 0.07))), 0.01).passed);
        let r = expansion_closure(&event(None, Some((0.01, 0.07))), 0.01);
        assert_eq!(r.reason.as_deref(), Some("ablation missing"));
    }
}

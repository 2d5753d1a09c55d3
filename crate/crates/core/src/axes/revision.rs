//! Self-revision: autonomy-weighted difference-in-differences gains.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::battery::StageWeights;
use crate::trace::RevisionEvent;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventContribution {
    pub id: String,
    pub did: f64,
    pub autonomy: f64,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilteredEvent {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevisionReading {
    pub score: f64,
    pub contributions: Vec<EventContribution>,
    pub filtered: Vec<FilteredEvent>,
}

/// `rho = sum_i alpha_i a_i` over plan, implement and verify stages.
pub fn stage_autonomy(event: &RevisionEvent, w: &StageWeights) -> f64 {
    let a = &event.stage_autonomy;
    w.plan * a.plan + w.implement * a.implement + w.verify * a.verify
}

/// `clip(sum rho * max(dC, 0) / Z, 0, 1)`. Events without gain, without
/// autonomy or without audit artifacts contribute nothing and are listed.
pub fn revision(events: &[&RevisionEvent], w: &StageWeights, scale: f64) -> RevisionReading {
    let mut contributions = Vec::new();
    let mut filtered = Vec::new();
    let mut total = 0.0;
    for e in events {
        let did = e.did();
        let rho = stage_autonomy(e, w);
        let reason = if e.artifacts.is_empty() {
            Some("no audit artifacts")
        } else if rho <= 0.0 {
            Some("no autonomous stage")
        } else if did <= 0.0 {
            Some("no capability gain")
        } else {
            None
        };
        if let Some(reason) = reason {
            filtered.push(FilteredEvent { id: e.id.clone(), reason: reason.into() });
            continue;
        }
        let c = rho * did;
        total += c;
        contributions.push(EventContribution { id: e.id.clone(), did, autonomy: rho, contribution: c });
    }
    RevisionReading { score: (total / scale).clamp(0.0, 1.0), contributions, filtered }
}

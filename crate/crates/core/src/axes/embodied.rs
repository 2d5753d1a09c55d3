//! Embodiment: real-world success, safety and sim-to-real transfer, plus
//! robotics diagnostics.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::battery::{SeverityWeights, TaskIndex};
use crate::error::Result;
use crate::num::mean;
use crate::trace::{EpisodeTrace, IncidentCounts};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbodiedReading {
    /// Geometric mean of the available components.
    pub score: f64,
    /// False when sim-to-real could not be measured.
    pub complete: bool,
    pub autonomy_rate: f64,
    pub safety: f64,
    pub sim_to_real: Option<f64>,
    pub hours: f64,
    pub incidents: IncidentCounts,
    /// Incidents per 100 hours, by severity.
    pub rates: [f64; 4],
    pub mtbf_hours: Option<f64>,
    pub mtbsi_hours: Option<f64>,
    pub mttr_hours: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RoboticsReading {
    pub recovery_rate: Option<f64>,
    pub control_quality: Option<f64>,
    pub physical_throughput: Option<f64>,
}

/// `1 - min(1, sum w_x * nu_x)` with `nu_x` per 100 hours; zero on any critical incident.
pub fn safety_score(counts: &IncidentCounts, hours: f64, w: &SeverityWeights) -> f64 {
    if counts.critical > 0 {
        return 0.0;
    }
    let nu = |n: u32| 100.0 * f64::from(n) / hours;
    let load =
        w.negligible * nu(counts.negligible) + w.minor * nu(counts.minor) + w.major * nu(counts.major) + w.critical * nu(counts.critical);
    1.0 - load.min(1.0)
}

fn sum_counts(traces: &[&&EpisodeTrace]) -> IncidentCounts {
    let mut c = IncidentCounts::default();
    for t in traces {
        if let Some(i) = t.incident_counts {
            c.negligible += i.negligible;
            c.minor += i.minor;
            c.major += i.major;
            c.critical += i.critical;
        }
    }
    c
}

/// Real embodied episodes log exposure hours; simulated ones set `sim_flag`.
pub fn embodiment(index: &TaskIndex<'_>, traces: &[&EpisodeTrace], w: &SeverityWeights) -> Result<Option<EmbodiedReading>> {
    let real: Vec<&&EpisodeTrace> = traces.iter().filter(|t| !t.sim_flag && t.exposure_hours.is_some()).collect();
    let sim: Vec<&&EpisodeTrace> = traces.iter().filter(|t| t.sim_flag).collect();
    let hours: f64 = real.iter().filter_map(|t| t.exposure_hours).sum();
    if real.is_empty() || hours <= 0.0 {
        return Ok(None);
    }
    let rate = |set: &[&&EpisodeTrace]| -> Result<f64> {
        let mut wins = 0usize;
        for t in set {
            wins += usize::from(index.success(t)?);
        }
        Ok(wins as f64 / set.len() as f64)
    };
    let ar = rate(&real)?;
    let incidents = sum_counts(&real);
    let safety = safety_score(&incidents, hours, w);
    let sim_to_real = if sim.is_empty() { None } else { Some(1.0 - libm::fabs(rate(&sim)? - ar)) };
    let score = match sim_to_real {
        Some(s2r) => libm::cbrt(ar * safety * s2r),
        None => libm::sqrt(ar * safety),
    };
    let failures = real.iter().filter(|t| !index.success(t).unwrap_or(false)).count();
    let repairs: Vec<f64> = real.iter().filter(|t| !index.success(t).unwrap_or(false)).filter_map(|t| t.repair_hours).collect();
    let nu = |n: u32| 100.0 * f64::from(n) / hours;
    let total = incidents.total();
    Ok(Some(EmbodiedReading {
        score,
        complete: sim_to_real.is_some(),
        autonomy_rate: ar,
        safety,
        sim_to_real,
        hours,
        incidents,
        rates: [nu(incidents.negligible), nu(incidents.minor), nu(incidents.major), nu(incidents.critical)],
        mtbf_hours: (failures > 0).then(|| hours / failures as f64),
        mtbsi_hours: (total > 0).then(|| hours / f64::from(total)),
        mttr_hours: mean(&repairs),
    }))
}

pub fn robotics(index: &TaskIndex<'_>, traces: &[&EpisodeTrace], cost_per_hour: Option<f64>) -> RoboticsReading {
    let (rec, tot) = traces
        .iter()
        .filter_map(|t| Some((t.recovered_faults?, t.total_faults?)))
        .fold((0u64, 0u64), |(r, n), (a, b)| (r + u64::from(a), n + u64::from(b)));
    let controls: Vec<f64> = traces.iter().filter_map(|t| t.control_score).collect();
    let real: Vec<&EpisodeTrace> = traces.iter().copied().filter(|t| !t.sim_flag && t.exposure_hours.is_some()).collect();
    let hours: f64 = real.iter().filter_map(|t| t.exposure_hours).sum();
    let physical_throughput = (hours > 0.0)
        .then(|| {
            let wins = real.iter().filter(|t| index.success(t).unwrap_or(false)).count() as f64;
            let cph = cost_per_hour.unwrap_or_else(|| real.iter().map(|t| t.cost).sum::<f64>() / hours);
            (cph > 0.0).then(|| (wins / hours) / cph)
        })
        .flatten();
    RoboticsReading { recovery_rate: (tot > 0).then(|| rec as f64 / tot as f64), control_quality: mean(&controls), physical_throughput }
}

//! Economic throughput: successful tasks per hour over cost per hour.

use serde::{Deserialize, Serialize};

use crate::battery::TaskIndex;
use crate::error::Result;
use crate::trace::EpisodeTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconomicReading {
    pub value: f64,
    pub tasks_per_hour: f64,
    pub cost_per_hour: f64,
    pub elapsed_hours: f64,
}

/// Elapsed time is the span of trace timestamps. Without a price card the
/// cost per hour is total logged cost over that span.
pub fn economics(index: &TaskIndex<'_>, traces: &[&EpisodeTrace]) -> Result<Option<EconomicReading>> {
    let battery = index.battery();
    let (lo, hi) = traces.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t.timestamp), hi.max(t.timestamp)));
    let elapsed = hi - lo;
    if traces.is_empty() || !(elapsed > 0.0) {
        return Ok(None);
    }
    let mut wins = 0usize;
    for t in traces {
        let ok = match battery.quality_star {
            Some(q) => t.quality >= q,
            None => index.success(t)?,
        };
        wins += usize::from(ok);
    }
    let tph = wins as f64 / elapsed;
    let cph = battery.cost_per_hour.unwrap_or_else(|| traces.iter().map(|t| t.cost).sum::<f64>() / elapsed);
    if !(cph > 0.0) {
        return Ok(None);
    }
    Ok(Some(EconomicReading { value: tph / cph, tasks_per_hour: tph, cost_per_hour: cph, elapsed_hours: elapsed }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn throughput_over_price() {
        let mut b = crate::battery::fixtures::battery(1);
        b.cost_per_hour = Some(8.0);
        let idx = b.index();
        let ts: alloc::vec::Vec<EpisodeTrace> = (0..5)
            .map(|i| {
                let mut t = EpisodeTrace::new("f0t0", if i < 4 { 0.9 } else { 0.1 });
                t.timestamp = i as f64 * 0.25;
                t
            })
            .collect();
        let refs: alloc::vec::Vec<_> = ts.iter().collect();
        let r = economics(&idx, &refs).unwrap().unwrap();
        assert_eq!(r.tasks_per_hour, 4.0);
        assert_eq!(r.value, 0.5);
    }

    #[test]
    fn zero_elapsed_is_no_data() {
        let b = crate::battery::fixtures::battery(1);
        let idx = b.index();
        let t = EpisodeTrace::new("f0t0", 0.9);
        assert!(economics(&idx, &[&t, &t]).unwrap().is_none());
    }
}

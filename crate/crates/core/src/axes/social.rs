//! Sociality: headroom lift of the best team size over the solo agent,
//! discounted by a deadlock and chatter penalty.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::battery::Battery;
use crate::num::{clip01, mean, median};
use crate::trace::EpisodeTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskLift {
    pub task: String,
    pub solo: f64,
    pub best_concurrency: u32,
    pub best: f64,
    pub lift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocialReading {
    pub score: f64,
    pub headroom: f64,
    pub tasks: Vec<TaskLift>,
    pub tau_comm: Option<f64>,
    pub conflict_rate: f64,
    pub chatter_rate: f64,
    pub collapse_rate: f64,
    pub deadlock_penalty: f64,
}

/// `[C_best - C_1]_+ / (1 - C_1 + 1e-9)`.
pub fn headroom_lift(solo: f64, best: f64) -> f64 {
    (best - solo).max(0.0) / (1.0 - solo + 1e-9)
}

#[derive(Default)]
struct Cell {
    q: f64,
    cpa: f64,
    n: usize,
}

pub fn sociality(battery: &Battery, traces: &[&EpisodeTrace]) -> Option<SocialReading> {
    let mut cells: BTreeMap<&str, BTreeMap<u32, Cell>> = BTreeMap::new();
    for t in traces {
        let c = cells.entry(t.task_id.as_str()).or_default().entry(t.concurrency).or_default();
        c.q += t.quality;
        c.cpa += t.comms_per_action();
        c.n += 1;
    }

    let mut tasks = Vec::new();
    for (task, by_m) in &cells {
        let Some(solo) = by_m.get(&1) else { continue };
        let solo_q = solo.q / solo.n as f64;
        let mut best: Option<(u32, f64, f64)> = None;
        for (m, c) in by_m.range(2..) {
            let q = c.q / c.n as f64;
            let cpa = c.cpa / c.n as f64;
            let better = match best {
                None => true,
                Some((_, bq, bcpa)) => q > bq || (q == bq && cpa < bcpa),
            };
            if better {
                best = Some((*m, q, cpa));
            }
        }
        let Some((m, q, _)) = best else { continue };
        tasks.push(TaskLift { task: (*task).into(), solo: solo_q, best_concurrency: m, best: q, lift: headroom_lift(solo_q, q) });
    }
    if tasks.is_empty() {
        return None;
    }
    let headroom = mean(&tasks.iter().map(|t| t.lift).collect::<Vec<_>>())?;

    let solo_cpa: Vec<f64> = traces.iter().filter(|t| t.concurrency == 1).map(|t| t.comms_per_action()).collect();
    let tau_comm = median(&solo_cpa);
    let lt = battery.loop_thresholds;
    let best_m: BTreeMap<&str, u32> = tasks.iter().map(|l| (l.task.as_str(), l.best_concurrency)).collect();
    let at_best: Vec<&&EpisodeTrace> = traces.iter().filter(|t| best_m.get(t.task_id.as_str()) == Some(&t.concurrency)).collect();
    let rate = |f: &dyn Fn(&EpisodeTrace) -> bool| at_best.iter().filter(|t| f(t)).count() as f64 / at_best.len() as f64;
    let conflict_rate = rate(&|t| {
        t.unresolved_conflict
            || t.r#loop
            || t.cycle_length.is_some_and(|c| c >= lt.cycle)
            || t.disagreement_turns.is_some_and(|d| d >= lt.disagreement)
    });
    let chatter_rate = rate(&|t| t.chatter || tau_comm.is_some_and(|tau| t.comms_per_action() > tau));
    let collapse_rate = rate(&|t| t.mode_collapse);
    let cp = battery.comm_penalty;
    let deadlock_penalty = clip01(conflict_rate + cp.chatter * chatter_rate + cp.collapse * collapse_rate);

    Some(SocialReading {
        score: clip01(headroom * (1.0 - deadlock_penalty)),
        headroom,
        tasks,
        tau_comm,
        conflict_rate,
        chatter_rate,
        collapse_rate,
        deadlock_penalty,
    })
}

//! Cognitive gates on retrieval fidelity, working memory and delayed recall.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ChcConfig;
use crate::error::{Error, Result};
use crate::num::{mean, median};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WmTrial {
    pub seed: String,
    pub list_length: u32,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChcInputs {
    /// Top-k verification bits per item.
    pub retrieval: Vec<Vec<bool>>,
    pub working_memory: Vec<WmTrial>,
    /// Fraction of designated items recalled after the delay, per trial.
    pub delayed_recall: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChcResult {
    pub k: usize,
    pub vrp: f64,
    pub hall: f64,
    pub wm_span: Option<f64>,
    pub delayed_recall: Option<f64>,
    pub passed: bool,
    pub failures: Vec<String>,
}

pub fn verified_retrieval_precision(items: &[Vec<bool>]) -> Result<(usize, f64)> {
    let k = items.first().map(Vec::len).ok_or_else(|| Error::Insufficient("no retrieval items".into()))?;
    if k == 0 {
        return Err(Error::Insufficient("retrieval items with k = 0".into()));
    }
    if let Some(bad) = items.iter().find(|i| i.len() != k) {
        return Err(Error::Mismatch(format!("retrieval k differs across items ({k} vs {})", bad.len())));
    }
    let per_item: Vec<f64> = items.iter().map(|i| i.iter().filter(|&&b| b).count() as f64 / k as f64).collect();
    Ok((k, mean(&per_item).unwrap_or(0.0)))
}

/// Median over seeds of the largest list length whose mean accuracy reaches
/// `theta`; zero for a seed with no such length.
pub fn wm_span(trials: &[WmTrial], theta: f64) -> Option<f64> {
    let mut by_seed: BTreeMap<&str, BTreeMap<u32, Vec<f64>>> = BTreeMap::new();
    for t in trials {
        by_seed.entry(&t.seed).or_default().entry(t.list_length).or_default().push(t.accuracy);
    }
    let spans: Vec<f64> = by_seed
        .values()
        .map(|lengths| lengths.iter().filter(|(_, acc)| mean(acc).is_some_and(|m| m >= theta)).map(|(&l, _)| l).max().unwrap_or(0) as f64)
        .collect();
    median(&spans)
}

pub fn chc_gates(inputs: &ChcInputs, cfg: &ChcConfig) -> Result<ChcResult> {
    let (k, vrp) = verified_retrieval_precision(&inputs.retrieval)?;
    let hall = 1.0 - vrp;
    let span = wm_span(&inputs.working_memory, cfg.theta);
    let recall = mean(&inputs.delayed_recall);
    let mut failures = Vec::new();
    if vrp < cfg.tau_v {
        failures.push(format!("VRP@{k} {vrp} < {}", cfg.tau_v));
    }
    if hall > cfg.tau_h {
        failures.push(format!("Hall@{k} {hall} > {}", cfg.tau_h));
    }
    match (span, cfg.tau_w) {
        (Some(s), Some(t)) if s < t => failures.push(format!("WM-Span {s} < {t}")),
        (Some(_), Some(_)) => {}
        (None, _) => failures.push("no working-memory trials".into()),
        (_, None) => failures.push("no WM-Span threshold configured".into()),
    }
    match (recall, cfg.tau_ms) {
        (Some(r), Some(t)) if r < t => failures.push(format!("Delayed-Recall {r} < {t}")),
        (Some(_), Some(_)) => {}
        (None, _) => failures.push("no delayed-recall trials".into()),
        (_, None) => failures.push("no Delayed-Recall threshold configured".into()),
    }
    Ok(ChcResult { k, vrp, hall, wm_span: span, delayed_recall: recall, passed: failures.is_empty(), failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn vrp_examples() {
        let (_, v) = verified_retrieval_precision(&[vec![true; 3], vec![true; 3]]).unwrap();
        assert_eq!(v, 1.0);
        let (k, v) = verified_retrieval_precision(&[vec![true, false], vec![true, true]]).unwrap();
        assert_eq!((k, v), (2, 0.75));
        assert!(matches!(verified_retrieval_precision(&[vec![true], vec![true, false]]), Err(Error::Mismatch(_))));
    }

    #[test]
    fn gate_thresholds() {
        let wm = |seed: &str, l, a| WmTrial { seed: seed.into(), list_length: l, accuracy: a };
        let trials = [wm("a", 3, 0.9), wm("a", 5, 0.85), wm("a", 7, 0.5), wm("b", 3, 0.9), wm("b", 5, 0.7)];
        assert_eq!(wm_span(&trials, 0.8), Some(4.0));
        let cfg = ChcConfig { tau_w: Some(4.0), tau_ms: Some(0.5), ..ChcConfig::default() };
        let mut items = vec![vec![true; 100]; 1];
        items[0][..16].fill(false);
        let inputs = ChcInputs { retrieval: items, working_memory: trials.to_vec(), delayed_recall: vec![0.6] };
        let r = chc_gates(&inputs, &cfg).unwrap();
        assert!((r.vrp - 0.84).abs() < 1e-12);
        assert!(!r.passed);
        let mut ok = inputs.clone();
        ok.retrieval = vec![vec![true; 20]];
        assert!(chc_gates(&ok, &cfg).unwrap().passed);
    }
}

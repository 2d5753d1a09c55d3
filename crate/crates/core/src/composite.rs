//! The composite index and its diagnostics.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::axis::{Axis, Weights};
use crate::error::{domain, Result};
use crate::num::lower_median;

/// Substitute for zero scores under [`ZeroPolicy::Floor`].
pub const FLOOR: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroPolicy {
    /// Any zero score makes the index zero.
    #[default]
    Strict,
    /// Scores below the floor are raised to it.
    Floor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeIndex {
    pub value: f64,
    pub policy: ZeroPolicy,
    /// Axes whose score was raised to the floor.
    pub floored: Vec<Axis>,
    /// Axes that entered the index.
    pub included: Vec<Axis>,
}

/// Axes with positive weight and a score.
fn terms(scores: &BTreeMap<Axis, f64>, weights: &Weights) -> Result<Vec<(Axis, f64, f64)>> {
    let mut out = Vec::new();
    for (axis, s) in scores {
        let w = weights.get(axis).copied().unwrap_or(0.0);
        if !(w >= 0.0 && w.is_finite()) {
            return Err(domain!("weight for axis {} must be nonnegative", axis.letter()));
        }
        if !(0.0..=1.0).contains(s) {
            return Err(domain!("score for axis {} = {s} outside [0, 1]", axis.letter()));
        }
        if w > 0.0 {
            out.push((*axis, w, *s));
        }
    }
    if out.is_empty() {
        return Err(domain!("composite index needs at least one weighted score"));
    }
    Ok(out)
}

/// Weighted geometric mean `exp(sum w ln x / W)`.
pub fn aai_index(scores: &BTreeMap<Axis, f64>, weights: &Weights, policy: ZeroPolicy) -> Result<CompositeIndex> {
    let terms = terms(scores, weights)?;
    let total: f64 = terms.iter().map(|t| t.1).sum();
    let mut floored = Vec::new();
    let mut log_sum = 0.0;
    let mut zero = false;
    for (axis, w, s) in &terms {
        let x = match policy {
            ZeroPolicy::Strict => *s,
            ZeroPolicy::Floor if *s < FLOOR => {
                floored.push(*axis);
                FLOOR
            }
            ZeroPolicy::Floor => *s,
        };
        if x == 0.0 {
            zero = true;
        } else {
            log_sum += w * libm::log(x);
        }
    }
    let value = if zero { 0.0 } else { libm::exp(log_sum / total) };
    Ok(CompositeIndex { value, policy, floored, included: terms.iter().map(|t| t.0).collect() })
}

/// Partial derivatives `w_x / (W x) * C`; undefined where a score is zero.
pub fn gradient(scores: &BTreeMap<Axis, f64>, weights: &Weights) -> Result<BTreeMap<Axis, f64>> {
    let terms = terms(scores, weights)?;
    if let Some((axis, _, _)) = terms.iter().find(|t| t.2 == 0.0) {
        return Err(domain!("gradient undefined: axis {} is zero", axis.letter()));
    }
    let c = aai_index(scores, weights, ZeroPolicy::Strict)?.value;
    let total: f64 = terms.iter().map(|t| t.1).sum();
    Ok(terms.iter().map(|(a, w, s)| (*a, w / (total * s) * c)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Jaggedness {
    /// `min / lower-median` of the included scores.
    pub uniformity: Option<f64>,
    pub multiplier: f64,
    pub index: f64,
    pub adjusted: f64,
    /// Set when the median is zero and the ratio is undefined.
    pub zero_median: bool,
}

/// Jaggedness-adjusted index `AAI * U^lambda`.
pub fn jaggedness(scores: &BTreeMap<Axis, f64>, weights: &Weights, lambda: f64) -> Result<Jaggedness> {
    let terms = terms(scores, weights)?;
    let index = aai_index(scores, weights, ZeroPolicy::Strict)?.value;
    let xs: Vec<f64> = terms.iter().map(|t| t.2).collect();
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let med = lower_median(&xs).unwrap_or(0.0);
    if med == 0.0 {
        return Ok(Jaggedness { uniformity: None, multiplier: 0.0, index, adjusted: 0.0, zero_median: true });
    }
    let u = min / med;
    let multiplier = libm::pow(u, lambda);
    Ok(Jaggedness { uniformity: Some(u), multiplier, index, adjusted: index * multiplier, zero_median: false })
}

/// Six cognitive core scores.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoreScores {
    pub gc: Option<f64>,
    pub grw: Option<f64>,
    pub gf: Option<f64>,
    pub gwm: Option<f64>,
    pub gls: Option<f64>,
    pub glr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreIndex {
    pub value: Option<f64>,
    pub eligible: bool,
    pub missing: Vec<String>,
}

/// Equal-weight geometric mean of the core scores; eligible iff `>= gamma`.
pub fn aai_core(core: &CoreScores, gamma: f64) -> CoreIndex {
    let named = [("gc", core.gc), ("grw", core.grw), ("gf", core.gf), ("gwm", core.gwm), ("gls", core.gls), ("glr", core.glr)];
    let missing: Vec<String> = named.iter().filter(|(_, v)| v.is_none()).map(|(n, _)| String::from(*n)).collect();
    if !missing.is_empty() {
        return CoreIndex { value: None, eligible: false, missing };
    }
    let xs: Vec<f64> = named.iter().filter_map(|(_, v)| *v).collect();
    let value = if xs.iter().any(|x| *x <= 0.0) { 0.0 } else { libm::exp(xs.iter().map(|x| libm::log(*x)).sum::<f64>() / 6.0) };
    CoreIndex { value: Some(value), eligible: value >= gamma, missing }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: f64, b: f64) -> (BTreeMap<Axis, f64>, Weights) {
        let s = [(Axis::A, a), (Axis::G, b)].into_iter().collect();
        let w = [(Axis::A, 1.0), (Axis::G, 1.0)].into_iter().collect();
        (s, w)
    }

    #[test]
    fn geometric_mean_example() {
        let (s, w) = pair(0.25, 1.0);
        assert!((aai_index(&s, &w, ZeroPolicy::Strict).unwrap().value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn strict_zero_and_floor() {
        let (s, w) = pair(0.0, 1.0);
        assert_eq!(aai_index(&s, &w, ZeroPolicy::Strict).unwrap().value, 0.0);
        let f = aai_index(&s, &w, ZeroPolicy::Floor).unwrap();
        assert!((f.value - 0.1).abs() < 1e-12);
        assert_eq!(f.floored, [Axis::A]);
    }

    #[test]
    fn gradient_example() {
        let (s, w) = pair(0.5, 0.5);
        let g = gradient(&s, &w).unwrap();
        assert!((g[&Axis::A] - 0.5).abs() < 1e-12);
        assert!((g[&Axis::G] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn jaggedness_example() {
        let s: BTreeMap<Axis, f64> = [(Axis::A, 0.2), (Axis::G, 0.8), (Axis::P, 0.9)].into_iter().collect();
        let w: Weights = s.keys().map(|a| (*a, 1.0)).collect();
        let j = jaggedness(&s, &w, 0.5).unwrap();
        assert!((j.uniformity.unwrap() - 0.25).abs() < 1e-12);
        assert!((j.multiplier - 0.5).abs() < 1e-12);
    }

    #[test]
    fn jaggedness_zero_median() {
        let s: BTreeMap<Axis, f64> = [(Axis::A, 0.0), (Axis::G, 0.0), (Axis::P, 0.9)].into_iter().collect();
        let w: Weights = s.keys().map(|a| (*a, 1.0)).collect();
        let j = jaggedness(&s, &w, 0.5).unwrap();
        assert!(j.zero_median);
        assert_eq!(j.adjusted, 0.0);
    }

    #[test]
    fn core_example() {
        let c = CoreScores { gc: Some(1.0), grw: Some(1.0), gf: Some(1.0), gwm: Some(1.0), gls: Some(1.0), glr: Some(0.5) };
        let r = aai_core(&c, 1.0);
        assert!((r.value.unwrap() - 0.890_898_7).abs() < 1e-6);
        assert!(!r.eligible);
    }

    #[test]
    fn zero_weight_axis_is_excluded() {
        let s: BTreeMap<Axis, f64> = [(Axis::A, 0.5), (Axis::E, 0.0)].into_iter().collect();
        let w: Weights = [(Axis::A, 1.0), (Axis::E, 0.0)].into_iter().collect();
        let c = aai_index(&s, &w, ZeroPolicy::Strict).unwrap();
        assert_eq!(c.value, 0.5);
        assert_eq!(c.included, [Axis::A]);
    }
}

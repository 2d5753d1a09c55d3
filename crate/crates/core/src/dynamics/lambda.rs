//! Continuous telemetry score and its level cutpoints.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::link::Link;
use crate::error::{domain, Error, Result};
use crate::stats::{isotonic_fit, Order};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "form")]
pub enum LambdaForm {
    TwoTerm {
        alpha: f64,
    },
    ThreeTerm {
        w_c: f64,
        w_kappa: f64,
        w_delta: f64,
        eta_prime: f64,
        gamma_star: f64,
        /// Use `K+ = (K + 1) / 2` so the score stays in `(0, 1)`.
        positive: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaConfig {
    pub link: Link,
    pub eps0: f64,
    pub kappa_star: f64,
    pub eta: f64,
    pub form: LambdaForm,
}

impl LambdaConfig {
    pub fn two_term(kappa_star: f64) -> Self {
        Self { link: Link::Surprisal, eps0: 0.01, kappa_star, eta: 1.0, form: LambdaForm::TwoTerm { alpha: 0.5 } }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.kappa_star > 0.0 && self.eta > 0.0) {
            return Err(domain!("lambda score needs kappa_star > 0 and eta > 0"));
        }
        if !(self.eps0 > 0.0 && self.eps0 <= 0.5) {
            return Err(domain!("eps0 must lie in (0, 1/2]"));
        }
        match self.form {
            LambdaForm::TwoTerm { alpha } if !(alpha > 0.0 && alpha < 1.0) => Err(domain!("alpha must lie in (0, 1)")),
            LambdaForm::ThreeTerm { w_c, w_kappa, w_delta, eta_prime, gamma_star, .. } => {
                if [w_c, w_kappa, w_delta].iter().any(|w| *w < 0.0) || libm::fabs(w_c + w_kappa + w_delta - 1.0) > 1e-9 {
                    return Err(domain!("three-term weights must be nonnegative and sum to 1"));
                }
                if !(eta_prime > 0.0 && gamma_star > 0.0) {
                    return Err(domain!("eta_prime and gamma_star must be positive"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaScore {
    pub value: f64,
    pub position: f64,
    pub momentum: f64,
    pub acceleration: Option<f64>,
    /// Set when `kappa_tilde <= -kappa_star` and the momentum term was clamped.
    pub clamped: bool,
}

/// `M = tanh(eta ln(1 + kappa / kappa_star))`, clamped to -1 where the log is undefined.
pub fn momentum(kappa_tilde: f64, kappa_star: f64, eta: f64) -> (f64, bool) {
    let arg = 1.0 + kappa_tilde / kappa_star;
    if arg <= 0.0 {
        (-1.0, true)
    } else {
        (libm::tanh(eta * libm::log(arg)), false)
    }
}

/// Score from capability `c`, link-rate and (for the three-term form) curvature.
pub fn lambda_score(c: f64, kappa_tilde: f64, delta_kappa_tilde: f64, cfg: &LambdaConfig) -> Result<LambdaScore> {
    cfg.check()?;
    let position = cfg.link.normalized(c, cfg.eps0);
    Ok(combine(position, kappa_tilde, delta_kappa_tilde, cfg))
}

/// Same as [`lambda_score`] with the position term `U` given directly.
pub fn combine(position: f64, kappa_tilde: f64, delta_kappa_tilde: f64, cfg: &LambdaConfig) -> LambdaScore {
    let (m, clamped) = momentum(kappa_tilde, cfg.kappa_star, cfg.eta);
    match cfg.form {
        LambdaForm::TwoTerm { alpha } => {
            LambdaScore { value: alpha * position + (1.0 - alpha) * m, position, momentum: m, acceleration: None, clamped }
        }
        LambdaForm::ThreeTerm { w_c, w_kappa, w_delta, eta_prime, gamma_star, positive } => {
            let mut k = libm::tanh(eta_prime * delta_kappa_tilde / gamma_star);
            if positive {
                k = 0.5 * (k + 1.0);
            }
            LambdaScore { value: w_c * position + w_kappa * m + w_delta * k, position, momentum: m, acceleration: Some(k), clamped }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutpoint {
    pub level: u8,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exemplar {
    pub lambda: f64,
    pub level: u8,
}

/// Cutpoints from exemplars certified at each level.
///
/// Levels are fitted isotonically against the score; each exemplar takes
/// the nearest level of its fitted value (halves round up) and `tau_n` is
/// the smallest score mapped to level `n`.
pub fn calibrate_cutpoints(exemplars: &[Exemplar]) -> Result<Vec<Cutpoint>> {
    if exemplars.is_empty() {
        return Err(Error::Insufficient("no exemplars".into()));
    }
    let lo = exemplars.iter().map(|e| e.level).min().unwrap_or(0);
    let hi = exemplars.iter().map(|e| e.level).max().unwrap_or(0);
    let present: BTreeMap<u8, ()> = exemplars.iter().map(|e| (e.level, ())).collect();
    if let Some(missing) = (lo..=hi).find(|l| !present.contains_key(l)) {
        return Err(domain!("no exemplar certified at level {missing}"));
    }
    let mut sorted = exemplars.to_vec();
    sorted.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.level.cmp(&b.level)));
    let levels: Vec<f64> = sorted.iter().map(|e| f64::from(e.level)).collect();
    let fit = isotonic_fit(&levels, None, Order::Increasing)?;
    let assigned: Vec<u8> = fit.iter().map(|f| libm::floor(f + 0.5) as u8).collect();

    let mut cutpoints: Vec<Cutpoint> = Vec::new();
    for level in lo..=hi {
        match sorted.iter().zip(&assigned).find(|(_, a)| **a == level) {
            Some((e, _)) => cutpoints.push(Cutpoint { level, tau: e.lambda }),
            None => {
                let offending: Vec<String> = sorted
                    .iter()
                    .zip(&assigned)
                    .filter(|(e, a)| e.level == level || **a == level)
                    .map(|(e, a)| alloc::format!("(lambda {}, level {} -> {})", e.lambda, e.level, a))
                    .collect();
                return Err(domain!("level {level} vanishes under monotone projection: {}", offending.join(", ")));
            }
        }
    }
    if let Some(w) = cutpoints.windows(2).find(|w| w[1].tau <= w[0].tau) {
        return Err(domain!("cutpoints for levels {} and {} are not strictly increasing", w[0].level, w[1].level));
    }
    Ok(cutpoints)
}

/// Level `n` with `tau_n <= lambda < tau_(n+1)`; `None` below the lowest cutpoint.
pub fn label(lambda: f64, cutpoints: &[Cutpoint]) -> Option<u8> {
    cutpoints.iter().rev().find(|c| lambda >= c.tau).map(|c| c.level)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn momentum_zero_rate() {
        assert_eq!(momentum(0.0, 0.01, 1.0), (0.0, false));
        assert_eq!(momentum(-0.02, 0.01, 1.0), (-1.0, true));
    }

    #[test]
    fn two_term_average() {
        let cfg = LambdaConfig::two_term(0.01);
        let s = combine(0.6, 0.01 * (libm::exp(libm::atanh(0.4)) - 1.0), 0.0, &cfg);
        assert!((s.momentum - 0.4).abs() < 1e-12);
        assert!((s.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn three_term_zero_curvature() {
        let cfg = LambdaConfig {
            form: LambdaForm::ThreeTerm { w_c: 0.4, w_kappa: 0.4, w_delta: 0.2, eta_prime: 1.0, gamma_star: 0.01, positive: false },
            ..LambdaConfig::two_term(0.01)
        };
        let s = combine(0.5, 0.0, 0.0, &cfg);
        assert_eq!(s.acceleration, Some(0.0));
        assert!((s.value - 0.2).abs() < 1e-12);
    }

    fn ex(lambda: f64, level: u8) -> Exemplar {
        Exemplar { lambda, level }
    }

    #[test]
    fn monotone_exemplars_give_minima() {
        let cps = calibrate_cutpoints(&[ex(0.1, 0), ex(0.15, 0), ex(0.3, 1), ex(0.35, 1), ex(0.6, 2)]).unwrap();
        let taus: Vec<f64> = cps.iter().map(|c| c.tau).collect();
        assert_eq!(taus, [0.1, 0.3, 0.6]);
        assert_eq!(label(0.32, &cps), Some(1));
        assert_eq!(label(0.05, &cps), None);
        assert_eq!(label(0.9, &cps), Some(2));
    }

    #[test]
    fn inverted_pair_is_pooled() {
        // (0.3, 2) and (0.4, 1) pool to 1.5 and round up to level 2.
        let cps = calibrate_cutpoints(&[ex(0.1, 0), ex(0.2, 1), ex(0.3, 2), ex(0.4, 1), ex(0.5, 2)]).unwrap();
        let taus: Vec<f64> = cps.iter().map(|c| c.tau).collect();
        assert_eq!(taus, [0.1, 0.2, 0.3]);
    }

    #[test]
    fn missing_level_and_unresolvable_inversion() {
        assert!(calibrate_cutpoints(&[ex(0.1, 0), ex(0.5, 2)]).is_err());
        // Level 1 is swamped by the inverted block.
        let err = calibrate_cutpoints(&[ex(0.1, 2), ex(0.2, 2), ex(0.3, 1), ex(0.4, 0)]);
        assert!(err.is_err());
    }
}

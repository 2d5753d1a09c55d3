//! Link transforms, rate normalizers and step operators.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Monotone link `g: (0, 1) -> R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Link {
    /// `ln(c / (1 - c))`.
    Logit,
    /// `-ln(1 - c)`.
    #[default]
    Surprisal,
}

impl Link {
    pub fn apply(self, c: f64) -> f64 {
        match self {
            Link::Logit => libm::log(c / (1.0 - c)),
            Link::Surprisal => -libm::log1p(-c),
        }
    }

    pub fn inverse(self, y: f64) -> f64 {
        match self {
            Link::Logit => 1.0 / (1.0 + libm::exp(-y)),
            Link::Surprisal => -libm::expm1(-y),
        }
    }

    /// `g'(c)`.
    pub fn derivative(self, c: f64) -> f64 {
        match self {
            Link::Logit => 1.0 / (c * (1.0 - c)),
            Link::Surprisal => 1.0 / (1.0 - c),
        }
    }

    /// Position on the link relative to the near-saturation anchor, `g(c) / g(1 - eps0)`.
    pub fn normalized(self, c: f64, eps0: f64) -> f64 {
        self.apply(c) / self.apply(1.0 - eps0)
    }

    pub fn name(self) -> &'static str {
        match self {
            Link::Logit => "logit",
            Link::Surprisal => "surprisal",
        }
    }
}

/// Maps a nonnegative rate onto `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Normalizer {
    /// `kappa / (kappa + half)`.
    MichaelisMenten { half: f64 },
    /// `1 / (1 + exp(-kappa / scale))`.
    Logistic { scale: f64 },
}

impl Normalizer {
    pub fn check(&self) -> Result<()> {
        let p = match self {
            Normalizer::MichaelisMenten { half } => *half,
            Normalizer::Logistic { scale } => *scale,
        };
        if p > 0.0 && p.is_finite() {
            Ok(())
        } else {
            Err(domain!("normalizer parameter must be positive"))
        }
    }

    pub fn apply(&self, kappa: f64) -> Result<f64> {
        self.check()?;
        match *self {
            Normalizer::MichaelisMenten { half } => {
                if kappa < 0.0 {
                    return Err(domain!("Michaelis-Menten normalizer needs kappa >= 0, got {kappa}"));
                }
                Ok(kappa / (kappa + half))
            }
            Normalizer::Logistic { scale } => Ok(1.0 / (1.0 + libm::exp(-kappa / scale))),
        }
    }

    /// Raw rate for a normalized value in `(0, 1)` (`[0, 1)` for Michaelis-Menten).
    pub fn inverse(&self, bar: f64) -> Result<f64> {
        self.check()?;
        if !(0.0..1.0).contains(&bar) {
            return Err(domain!("normalized rate {bar} outside [0, 1)"));
        }
        match *self {
            Normalizer::MichaelisMenten { half } => Ok(half * bar / (1.0 - bar)),
            Normalizer::Logistic { scale } => Ok(scale * libm::log(bar / (1.0 - bar))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "value")]
pub enum Step {
    /// `g^-1(g(c) + delta)`, `delta > 0`.
    Additive(f64),
    /// `g^-1(A g(c))`, `A > 1`.
    Multiplicative(f64),
}

impl Default for Step {
    fn default() -> Self {
        Step::Additive(1.0)
    }
}

/// Next-milestone capability target.
pub fn step_operator(c: f64, link: Link, step: Step) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(domain!("step operator needs c in (0, 1), got {c}"));
    }
    let y = link.apply(c);
    let target = match step {
        Step::Additive(d) if d > 0.0 => y + d,
        Step::Multiplicative(a) if a > 1.0 => a * y,
        Step::Additive(d) => return Err(domain!("additive step needs delta > 0, got {d}")),
        Step::Multiplicative(a) => return Err(domain!("multiplicative step needs A > 1, got {a}")),
    };
    Ok(link.inverse(target))
}

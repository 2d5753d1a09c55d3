//! The ten axes, their calibration anchors and the weight presets.

use alloc::collections::BTreeMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axis {
    /// Autonomy.
    A,
    /// Generality.
    G,
    /// Planning.
    P,
    /// Memory and persistence.
    M,
    /// Tool economy.
    T,
    /// Self-revision.
    R,
    /// Sociality and coordination.
    S,
    /// Embodiment.
    E,
    /// World-model fidelity.
    W,
    /// Economic throughput.
    #[serde(rename = "$")]
    Dollar,
}

impl Axis {
    pub const ALL: [Axis; 10] = [Axis::A, Axis::G, Axis::P, Axis::M, Axis::T, Axis::R, Axis::S, Axis::E, Axis::W, Axis::Dollar];

    pub fn letter(self) -> &'static str {
        match self {
            Axis::A => "A",
            Axis::G => "G",
            Axis::P => "P",
            Axis::M => "M",
            Axis::T => "T",
            Axis::R => "R",
            Axis::S => "S",
            Axis::E => "E",
            Axis::W => "W",
            Axis::Dollar => "$",
        }
    }

    pub fn from_letter(s: &str) -> Option<Axis> {
        Axis::ALL.into_iter().find(|a| a.letter() == s)
    }

    /// Embodiment is the only axis a system may legitimately lack.
    pub fn is_optional(self) -> bool {
        self == Axis::E
    }
}

/// Calibration anchors: raw `lower` maps to 0 and raw `upper` to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub lower: f64,
    pub upper: f64,
}

impl Default for Anchor {
    fn default() -> Self {
        Self { lower: 0.0, upper: 1.0 }
    }
}

impl Anchor {
    pub fn new(axis: Axis, lower: f64, upper: f64) -> Result<Self> {
        let a = Self { lower, upper };
        a.check(axis)?;
        Ok(a)
    }

    pub fn check(&self, axis: Axis) -> Result<()> {
        if self.lower < self.upper && self.lower.is_finite() && self.upper.is_finite() {
            Ok(())
        } else {
            Err(Error::DegenerateAnchor(axis))
        }
    }

    pub fn calibrate(&self, raw: f64) -> f64 {
        calibrate(raw, self.lower, self.upper)
    }
}

/// Linear map of `raw` onto `[0, 1]` between anchors, clipped at both ends.
pub fn calibrate(raw: f64, lower: f64, upper: f64) -> f64 {
    ((raw - lower) / (upper - lower)).clamp(0.0, 1.0)
}

pub type Weights = BTreeMap<Axis, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    #[default]
    Default,
    Software,
    Robotics,
}

impl Preset {
    pub fn weights(self) -> Weights {
        let w = |axis: Axis| -> f64 {
            match (self, axis) {
                (_, Axis::R) => 1.5,
                (Preset::Default, Axis::E) => 0.5,
                (Preset::Software, Axis::P | Axis::M | Axis::T) => 1.25,
                (Preset::Software, Axis::E) => 0.0,
                (Preset::Robotics, Axis::P | Axis::T) => 1.1,
                (Preset::Robotics, Axis::E) => 1.25,
                _ => 1.0,
            }
        };
        Axis::ALL.into_iter().map(|a| (a, w(a))).collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Default => "default",
            Preset::Software => "software",
            Preset::Robotics => "robotics",
        }
    }
}

impl core::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(Preset::Default),
            "software" => Ok(Preset::Software),
            "robotics" => Ok(Preset::Robotics),
            other => Err(crate::error::domain!("unknown preset `{other}`")),
        }
    }
}

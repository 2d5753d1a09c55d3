//! The configuration document: battery, gates, dynamics, frontier and
//! bootstrap settings, in TOML or JSON.

use std::path::{Path, PathBuf};

use aai_core::dynamics::{KappaMethod, LambdaForm, Link};
use aai_core::frontier::DEFAULT_BINS;
use aai_core::gates::GateConfig;
use aai_core::stats::BootstrapPlan;
use aai_core::{Battery, Preset};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, MeterError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DynamicsConfig {
    pub method: KappaMethod,
    /// Link for curvature and Lambda.
    pub link: Link,
    /// Share of checkpoints in each local quadratic window.
    pub curvature_fraction: f64,
    /// Rolling window for sustained-rate checks, in days.
    pub rolling_days: f64,
    pub lambda_form: Option<LambdaForm>,
    /// Near-saturation anchor for the Lambda position term.
    pub eps0: f64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            method: KappaMethod::TheilSen,
            link: Link::Surprisal,
            curvature_fraction: 0.5,
            rolling_days: 7.0,
            lambda_form: None,
            eps0: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FrontierConfig {
    /// Intervention ceiling at zero autonomy demand.
    pub h_max: f64,
    pub bins: usize,
    pub q_target: f64,
    /// Grid points for `F(tau)`.
    pub grid_points: usize,
}

impl Default for FrontierConfig {
    fn default() -> Self {
        Self { h_max: 4.0, bins: DEFAULT_BINS, q_target: 0.65, grid_points: 101 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub battery: Option<Battery>,
    pub preset: Preset,
    pub gates: GateConfig,
    pub dynamics: DynamicsConfig,
    pub frontier: FrontierConfig,
    pub bootstrap: BootstrapPlan,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let err = |message: String| MeterError::Config { path: path.to_path_buf(), message };
        let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let cfg: Config = if json {
            let de = &mut serde_json::Deserializer::from_str(&text);
            serde_ignored::deserialize(de, |p| log::warn!("{}: ignoring unknown key `{p}`", path.display()))
                .map_err(|e| err(e.to_string()))?
        } else {
            let de = toml::Deserializer::new(&text);
            serde_ignored::deserialize(de, |p| log::warn!("{}: ignoring unknown key `{p}`", path.display()))
                .map_err(|e| err(e.to_string()))?
        };
        cfg.check().map_err(err)?;
        Ok(cfg)
    }

    fn check(&self) -> std::result::Result<(), String> {
        if let Some(b) = &self.battery {
            b.validate().map_err(|e| e.to_string())?;
        }
        if self.gates.kappa_star.is_some() {
            self.gates.check().map_err(|e| e.to_string())?;
        }
        let d = &self.dynamics;
        if !(d.curvature_fraction > 0.0 && d.curvature_fraction <= 1.0) {
            return Err("dynamics.curvature_fraction must lie in (0, 1]".into());
        }
        if !(d.rolling_days > 0.0) {
            return Err("dynamics.rolling_days must be positive".into());
        }
        let f = &self.frontier;
        if !(f.h_max > 0.0) || f.bins < 2 || f.grid_points < 2 || !(0.0..=1.0).contains(&f.q_target) {
            return Err("frontier needs h_max > 0, bins >= 2, grid_points >= 2 and q_target in [0, 1]".into());
        }
        if !(self.bootstrap.level > 0.0 && self.bootstrap.level < 1.0) {
            return Err("bootstrap.level must lie in (0, 1)".into());
        }
        Ok(())
    }

    pub fn battery(&self, path: Option<&PathBuf>) -> Result<&Battery> {
        self.battery
            .as_ref()
            .ok_or_else(|| MeterError::Config { path: path.cloned().unwrap_or_default(), message: "missing [battery] section".into() })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }
}

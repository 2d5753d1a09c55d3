//! Writes synthetic archetype data and a progression run to disk.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use aai_core::gates::GateConfig;
use aai_core::simulate::{
    archetype_battery, simulate_archetypes, simulate_progression, Archetype, ArchetypeSpec, ProgressionResult, ProgressionSpec,
    SimulatedArchetype,
};
use aai_core::stats::BootstrapPlan;

use crate::config::Config;
use crate::error::{io_err, Context, Result};
use crate::ingest::{tagged_line, CheckpointRecord, PolicyRunRecord};

/// Bootstrap replicates in generated configs; enough for stable 95% bands
/// on tens of thousands of episodes at a fraction of the default cost.
pub const SIMULATION_REPLICATES: usize = 200;

#[derive(Debug, Clone)]
pub struct SimulationOptions {
    pub seed: u64,
    pub archetypes: Vec<Archetype>,
    pub runs: usize,
    pub noise: f64,
}

impl SimulationOptions {
    pub fn new(seed: u64) -> Self {
        Self { seed, archetypes: Archetype::ALL.to_vec(), runs: 100, noise: 1.0 }
    }

    pub fn specs(&self) -> Vec<ArchetypeSpec> {
        self.archetypes.iter().map(|a| ArchetypeSpec { runs: self.runs, noise: self.noise, ..ArchetypeSpec::new(*a, self.seed) }).collect()
    }
}

/// Config matching the archetype battery, with `kappa_star` set.
pub fn simulation_config(seed: u64) -> Config {
    Config {
        battery: Some(archetype_battery()),
        gates: GateConfig::new(0.01),
        bootstrap: BootstrapPlan { replicates: SIMULATION_REPLICATES, seed, ..BootstrapPlan::default() },
        ..Config::default()
    }
}

pub fn to_jsonl(sims: &[SimulatedArchetype]) -> String {
    let mut out = String::new();
    for s in sims {
        let agent = s.spec.archetype.name();
        let mut push = |line: String| {
            out.push_str(&line);
            out.push('\n');
        };
        for t in &s.traces {
            push(tagged_line("trace", agent, t));
        }
        for e in &s.events {
            push(tagged_line("revision", agent, e));
        }
        for series in &s.checkpoints {
            for p in &series.points {
                let rec = CheckpointRecord {
                    family: series.family.clone().unwrap_or_default(),
                    t: p.t,
                    resource: p.resource,
                    capability: p.capability,
                };
                push(tagged_line("checkpoint", agent, &rec));
            }
        }
        if let Some(m) = &s.maintenance {
            push(tagged_line("maintenance", agent, m));
        }
        for r in &s.policy_runs {
            let rec = PolicyRunRecord { policy: r.policy.clone(), quality: r.quality, interventions: r.interventions, window: None };
            push(tagged_line("policy_run", agent, &rec));
        }
    }
    out
}

pub fn progression_csv(res: &ProgressionResult) -> String {
    let mut s = String::from("r,kappa_bar,kappa,capability,link_rate,aai4,aai5\n");
    for p in &res.trajectory {
        let _ = writeln!(s, "{},{},{},{},{},{},{}", p.r, p.kappa_bar, p.kappa, p.capability, p.link_rate, p.aai4 as u8, p.aai5 as u8);
    }
    s
}

fn expected_csv(specs: &[ArchetypeSpec]) -> String {
    let mut s = String::from("agent,axis,target\n");
    for spec in specs {
        for (axis, t) in &spec.targets {
            let _ = writeln!(s, "{},{},{}", spec.archetype.name(), axis.letter(), t);
        }
        let _ = writeln!(s, "{},kappa,{}", spec.archetype.name(), spec.kappa);
    }
    s
}

/// Writes `traces.jsonl`, `config.toml`, `expected.csv`, `progression.csv`
/// and `progression.json` under `dir`.
pub fn write_simulation(dir: &Path, opts: &SimulationOptions, progression: &ProgressionSpec) -> Result<ProgressionResult> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let specs = opts.specs();
    let sims = simulate_archetypes(&specs).module("simulate")?;
    let res = simulate_progression(progression).module("simulate")?;
    let files = [
        ("traces.jsonl", to_jsonl(&sims)),
        ("config.toml", simulation_config(opts.seed).to_toml()),
        ("expected.csv", expected_csv(&specs)),
        ("progression.csv", progression_csv(&res)),
        ("progression.json", serde_json::to_string_pretty(&res).expect("progression serializes") + "\n"),
    ];
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(io_err(&path))?;
    }
    Ok(res)
}

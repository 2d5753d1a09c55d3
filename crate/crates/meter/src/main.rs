use std::path::PathBuf;
use std::process::ExitCode;

use aai_core::simulate::{Archetype, ProgressionSpec};
use aai_core::Preset;
use aai_meter::bundle::write_bundle;
use aai_meter::error::{io_err, MeterError, Result};
use aai_meter::runner::runner_for;
use aai_meter::simulate::{write_simulation, SimulationOptions};
use aai_meter::{run_report, Config, Inputs, Stages};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "aai-meter", version, about = "Score agent traces on the Autonomous AI scale")]
struct Cli {
    /// Configuration document (TOML or JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides `bootstrap.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for `report` and `simulate`, or a JSON file for the others.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    preset: Option<PresetArg>,
    /// Worker threads for bootstrap replicates; 1 runs sequentially.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Default,
    Software,
    Robotics,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Default => Preset::Default,
            PresetArg::Software => Preset::Software,
            PresetArg::Robotics => Preset::Robotics,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check battery admissibility of the traces.
    Validate { traces: Vec<PathBuf> },
    /// Axis scores with bootstrap intervals.
    Axes { traces: Vec<PathBuf> },
    /// Composite index under both zero policies.
    Index { traces: Vec<PathBuf> },
    /// Improvement rates, rolling windows and curvature per family.
    Dynamics { traces: Vec<PathBuf> },
    /// Level assignment with every gate verdict.
    Gates {
        traces: Vec<PathBuf>,
        /// Exit with status 2 unless every agent reaches this level.
        #[arg(long)]
        require_level: Option<u8>,
    },
    /// Quality and delegability frontiers.
    Frontier { traces: Vec<PathBuf> },
    /// Generate archetype traces and a progression run.
    Simulate {
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        /// Limit to these archetypes (rpa, agentic-llm, self-improving, orchestrator).
        #[arg(long = "archetype")]
        archetypes: Vec<String>,
        /// Progression spec (JSON); the built-in demo otherwise.
        #[arg(long)]
        progression: Option<PathBuf>,
    },
    /// Full pipeline; writes bundle.json, tables and plots.
    Report { traces: Vec<PathBuf> },
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => return Err(MeterError::Usage("--config is required".into())),
    };
    if let Some(p) = cli.preset {
        cfg.preset = p.into();
    }
    if let Some(s) = cli.seed {
        cfg.bootstrap.seed = s;
    }
    Ok(cfg)
}

fn load_inputs(traces: &[PathBuf]) -> Result<Inputs> {
    if traces.is_empty() {
        return Err(MeterError::Usage("no trace files given".into()));
    }
    Inputs::load(traces)
}

fn emit<T: Serialize>(value: &T, out: Option<&PathBuf>) -> Result<()> {
    let mut json = serde_json::to_string_pretty(value).expect("output serializes");
    json.push('\n');
    match out {
        Some(path) => std::fs::write(path, json).map_err(io_err(path)),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if cli.jobs > 1 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global().map_err(|e| MeterError::Usage(e.to_string()))?;
    }
    let runner = runner_for(cli.jobs);
    let stages = |dynamics, gates, frontier| Stages { dynamics, gates, frontier };
    match &cli.command {
        Command::Simulate { runs, noise, archetypes, progression } => {
            let mut opts = SimulationOptions::new(cli.seed.unwrap_or(0));
            opts.runs = *runs;
            opts.noise = *noise;
            if !archetypes.is_empty() {
                opts.archetypes = archetypes
                    .iter()
                    .map(|n| Archetype::from_name(n).ok_or_else(|| MeterError::Usage(format!("unknown archetype `{n}`"))))
                    .collect::<Result<_>>()?;
            }
            let spec = match progression {
                Some(p) => {
                    let text = std::fs::read_to_string(p).map_err(io_err(p))?;
                    serde_json::from_str(&text).map_err(|e| MeterError::Config { path: p.clone(), message: e.to_string() })?
                }
                None => ProgressionSpec::demo(),
            };
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("simulation"));
            let res = write_simulation(&dir, &opts, &spec)?;
            eprintln!("wrote {}; R4 = {:?}, R5 = {:?}", dir.display(), res.r4, res.r5);
            Ok(())
        }
        Command::Validate { traces } => {
            let cfg = load_config(&cli)?;
            let battery = cfg.battery(cli.config.as_ref())?;
            let inputs = load_inputs(traces)?;
            let reports: std::collections::BTreeMap<_, _> =
                inputs.agents.iter().map(|(n, a)| (n.clone(), aai_core::battery::validate_admissibility(battery, &a.traces))).collect();
            emit(&reports, cli.out.as_ref())?;
            let failed: Vec<_> = reports.iter().filter(|(_, r)| !r.passed).map(|(n, _)| n.as_str()).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(MeterError::Validation(format!("admissibility fails for {}", failed.join(", "))))
            }
        }
        Command::Axes { traces } | Command::Index { traces } => {
            let cfg = load_config(&cli)?;
            let bundle = run_report(&load_inputs(traces)?, &cfg, cfg.bootstrap.seed, Stages::AXES, runner)?;
            if matches!(cli.command, Command::Axes { .. }) {
                let axes: std::collections::BTreeMap<_, _> = bundle.agents.iter().map(|a| (a.agent.clone(), &a.axes.axes)).collect();
                emit(&axes, cli.out.as_ref())
            } else {
                let idx: std::collections::BTreeMap<_, _> = bundle.agents.iter().map(|a| (a.agent.clone(), &a.composite)).collect();
                emit(&idx, cli.out.as_ref())
            }
        }
        Command::Dynamics { traces } => {
            let cfg = load_config(&cli)?;
            let bundle = run_report(&load_inputs(traces)?, &cfg, cfg.bootstrap.seed, stages(true, false, false), runner)?;
            let d: std::collections::BTreeMap<_, _> = bundle.agents.iter().map(|a| (a.agent.clone(), &a.dynamics)).collect();
            emit(&d, cli.out.as_ref())
        }
        Command::Gates { traces, require_level } => {
            let cfg = load_config(&cli)?;
            let bundle = run_report(&load_inputs(traces)?, &cfg, cfg.bootstrap.seed, stages(true, true, false), runner)?;
            let g: std::collections::BTreeMap<_, _> = bundle.agents.iter().map(|a| (a.agent.clone(), &a.gates)).collect();
            emit(&g, cli.out.as_ref())?;
            if let Some(req) = require_level {
                let short: Vec<String> = bundle
                    .agents
                    .iter()
                    .filter(|a| a.gates.as_ref().and_then(|g| g.level).is_none_or(|l| l < *req))
                    .map(|a| a.agent.clone())
                    .collect();
                if !short.is_empty() {
                    return Err(MeterError::Validation(format!("below AAI-{req}: {}", short.join(", "))));
                }
            }
            Ok(())
        }
        Command::Frontier { traces } => {
            let cfg = load_config(&cli)?;
            let bundle = run_report(&load_inputs(traces)?, &cfg, cfg.bootstrap.seed, stages(false, false, true), runner)?;
            let f: std::collections::BTreeMap<_, _> =
                bundle.agents.iter().map(|a| (a.agent.clone(), (&a.quality_frontier, &a.delegability, a.frontier_shift))).collect();
            emit(&f, cli.out.as_ref())
        }
        Command::Report { traces } => {
            let cfg = load_config(&cli)?;
            let mut bundle = run_report(&load_inputs(traces)?, &cfg, cfg.bootstrap.seed, Stages::ALL, runner)?;
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("report"));
            let digest = write_bundle(&mut bundle, &dir)?;
            eprintln!("wrote {} (sha256 {digest})", dir.join("bundle.json").display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

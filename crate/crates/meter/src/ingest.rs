//! JSONL ingestion.
//!
//! Every line is one JSON object. The optional `record` key selects the kind
//! (`trace` when absent) and the optional `agent` key groups records by the
//! system under evaluation. Unknown keys are ignored with a warning.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use aai_core::dynamics::Checkpoint;
use aai_core::frontier::PolicyRun;
use aai_core::gates::{ChcInputs, HumanPaired, InnovationCounts, MaintenanceLog};
use aai_core::{EpisodeTrace, RevisionEvent};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{io_err, MeterError, Result};

pub const DEFAULT_AGENT: &str = "agent";
pub const DEFAULT_WINDOW: &str = "current";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    pub family: String,
    pub t: f64,
    pub resource: f64,
    pub capability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyRunRecord {
    pub policy: String,
    pub quality: f64,
    pub interventions: f64,
    /// Evaluation window; estimates from different windows are compared.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
}

/// Composite values at earlier milestones.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MilestoneRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub previous: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aai4: Option<f64>,
}

/// Everything recorded for one agent.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AgentInputs {
    pub traces: Vec<EpisodeTrace>,
    pub events: Vec<RevisionEvent>,
    pub checkpoints: BTreeMap<String, Vec<Checkpoint>>,
    pub maintenance: Option<MaintenanceLog>,
    pub policy_runs: BTreeMap<String, Vec<PolicyRun>>,
    pub human_pairs: Vec<HumanPaired>,
    pub chc: Option<ChcInputs>,
    pub innovation: Option<InnovationCounts>,
    pub milestone: MilestoneRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
    pub records: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Inputs {
    pub files: Vec<InputFile>,
    pub agents: BTreeMap<String, AgentInputs>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn parse<T: DeserializeOwned>(value: Value, path: &Path, line: usize) -> Result<T> {
    serde_ignored::deserialize(value, |p| log::warn!("{}:{line}: ignoring unknown field `{p}`", path.display()))
        .map_err(|e| MeterError::Record { path: path.to_path_buf(), line, message: e.to_string() })
}

impl Inputs {
    pub fn load(paths: &[PathBuf]) -> Result<Self> {
        let mut inputs = Inputs::default();
        for path in paths {
            let bytes = std::fs::read(path).map_err(io_err(path))?;
            let text =
                String::from_utf8(bytes.clone()).map_err(|e| MeterError::Record { path: path.clone(), line: 0, message: e.to_string() })?;
            let records = inputs.ingest(&text, path)?;
            inputs.files.push(InputFile { path: path.display().to_string(), sha256: sha256_hex(&bytes), records });
        }
        Ok(inputs)
    }

    /// Parses one JSONL document; `path` is used for error loci.
    pub fn ingest(&mut self, text: &str, path: &Path) -> Result<usize> {
        let mut count = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let err = |message: String| MeterError::Record { path: path.to_path_buf(), line, message };
            let mut value: Value = serde_json::from_str(raw).map_err(|e| err(e.to_string()))?;
            let obj = value.as_object_mut().ok_or_else(|| err("expected a JSON object".into()))?;
            let string_key = |obj: &mut serde_json::Map<String, Value>, key: &str| match obj.remove(key) {
                None => Ok(None),
                Some(Value::String(s)) => Ok(Some(s)),
                Some(_) => Err(err(format!("`{key}` must be a string"))),
            };
            let kind = string_key(obj, "record")?.unwrap_or_else(|| "trace".into());
            let agent = string_key(obj, "agent")?.unwrap_or_else(|| DEFAULT_AGENT.into());
            let a = self.agents.entry(agent).or_default();
            match kind.as_str() {
                "trace" => {
                    let t: EpisodeTrace = parse(value, path, line)?;
                    t.validate().map_err(|e| err(e.to_string()))?;
                    a.traces.push(t);
                }
                "revision" => a.events.push(parse(value, path, line)?),
                "checkpoint" => {
                    let c: CheckpointRecord = parse(value, path, line)?;
                    a.checkpoints.entry(c.family).or_default().push(Checkpoint { t: c.t, resource: c.resource, capability: c.capability });
                }
                "maintenance" => {
                    if a.maintenance.is_some() {
                        return Err(err("second maintenance log for the same agent".into()));
                    }
                    a.maintenance = Some(parse(value, path, line)?);
                }
                "policy_run" => {
                    let r: PolicyRunRecord = parse(value, path, line)?;
                    let run = PolicyRun { policy: r.policy, quality: r.quality, interventions: r.interventions };
                    a.policy_runs.entry(r.window.unwrap_or_else(|| DEFAULT_WINDOW.into())).or_default().push(run);
                }
                "human_pair" => a.human_pairs.push(parse(value, path, line)?),
                "chc" => {
                    let c: ChcInputs = parse(value, path, line)?;
                    let dst = a.chc.get_or_insert_with(ChcInputs::default);
                    dst.retrieval.extend(c.retrieval);
                    dst.working_memory.extend(c.working_memory);
                    dst.delayed_recall.extend(c.delayed_recall);
                }
                "innovation" => a.innovation = Some(parse(value, path, line)?),
                "milestone" => {
                    let m: MilestoneRecord = parse(value, path, line)?;
                    a.milestone.previous = m.previous.or(a.milestone.previous);
                    a.milestone.aai4 = m.aai4.or(a.milestone.aai4);
                }
                other => return Err(err(format!("unknown record kind `{other}`"))),
            }
            count += 1;
        }
        Ok(count)
    }
}

/// One JSONL line for `value`, tagged with a record kind and agent.
pub fn tagged_line<T: Serialize>(kind: &str, agent: &str, value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("record serializes");
    if let Value::Object(obj) = &mut v {
        if kind != "trace" {
            obj.insert("record".into(), Value::String(kind.into()));
        }
        obj.insert("agent".into(), Value::String(agent.into()));
    }
    serde_json::to_string(&v).expect("record serializes")
}

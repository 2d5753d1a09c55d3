//! Writes a report bundle: `bundle.json`, its checksum, CSV tables and SVG plots.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{io_err, MeterError, Result};
use crate::ingest::sha256_hex;
use crate::pipeline::{AgentReport, ReportBundle};
use crate::plots;

fn label<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// File-system friendly agent name.
pub fn slug(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

struct Tables<'a> {
    dir: PathBuf,
    agents: &'a [AgentReport],
}

impl Tables<'_> {
    fn write(&self, name: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
        let path = self.dir.join(name);
        let csv_err = |e: csv::Error| MeterError::Io { path: path.clone(), source: e.into() };
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(header).map_err(csv_err)?;
        for r in rows {
            w.write_record(&r).map_err(csv_err)?;
        }
        w.flush().map_err(io_err(&path))
    }

    fn all(&self) -> Result<()> {
        let mut axes = Vec::new();
        let mut composite = Vec::new();
        let mut dynamics = Vec::new();
        let mut gates = Vec::new();
        let mut levels = Vec::new();
        let mut frontier = Vec::new();
        let mut summaries = Vec::new();
        let mut qf = Vec::new();
        let mut arch = Vec::new();
        for a in self.agents {
            let n = &a.agent;
            for (axis, r) in &a.axes.axes.0 {
                axes.push(vec![
                    n.clone(),
                    axis.letter().into(),
                    label(&r.state),
                    num(r.raw),
                    num(r.score),
                    num(r.ci.map(|c| c[0])),
                    num(r.ci.map(|c| c[1])),
                    r.n.to_string(),
                    r.note.clone().unwrap_or_default(),
                ]);
            }
            composite.push(vec![
                n.clone(),
                a.composite.strict.value.to_string(),
                a.composite.floor.value.to_string(),
                a.composite.divergent.to_string(),
                num(a.archetype.as_ref().map(|c| c.table_index)),
                num(a.archetype.as_ref().map(|c| c.target_index_strict)),
                num(a.archetype.as_ref().map(|c| c.target_index_floor)),
            ]);
            for f in &a.dynamics {
                let c = f.curvature.as_ref();
                dynamics.push(vec![
                    n.clone(),
                    f.family.clone(),
                    label(&f.kappa.method),
                    f.kappa.point.to_string(),
                    f.kappa.lo.to_string(),
                    f.kappa.hi.to_string(),
                    f.kappa.theil_sen.to_string(),
                    num(f.kappa.fd_median),
                    num(c.map(|c| c.fit.slope)),
                    num(c.map(|c| c.fit.curvature)),
                    num(c.and_then(|c| c.prob_nonnegative)),
                ]);
            }
            if let Some(g) = &a.gates {
                levels.push(vec![n.clone(), g.level.map(|l| l.to_string()).unwrap_or_else(|| "below AAI-0".into())]);
                for v in &g.verdicts {
                    gates.push(vec![
                        n.clone(),
                        v.level.to_string(),
                        v.gate.clone(),
                        label(&v.outcome),
                        v.blocking.to_string(),
                        v.detail.clone(),
                    ]);
                }
            }
            for w in &a.delegability {
                let e = &w.estimate;
                for j in 0..e.bins.len() {
                    frontier.push(vec![
                        n.clone(),
                        w.window.clone(),
                        e.bins[j].to_string(),
                        num(e.raw[j]),
                        num(e.q_star[j]),
                        num(e.lo[j]),
                        num(e.hi[j]),
                    ]);
                }
                if let Some(s) = &w.summary {
                    summaries.push(vec![
                        n.clone(),
                        w.window.clone(),
                        s.q_target.to_string(),
                        s.fd.to_string(),
                        s.auf.to_string(),
                        s.complete.to_string(),
                    ]);
                }
            }
            if let Some(q) = &a.quality_frontier {
                for p in &q.curve {
                    qf.push(vec![n.clone(), p[0].to_string(), p[1].to_string()]);
                }
            }
            if let Some(c) = &a.archetype {
                for (axis, t) in &c.targets {
                    arch.push(vec![
                        n.clone(),
                        axis.letter().into(),
                        t.to_string(),
                        num(a.axes.axes.score(*axis)),
                        c.deviations[axis].to_string(),
                    ]);
                }
            }
        }
        self.write("axes.csv", &["agent", "axis", "state", "raw", "score", "ci_lo", "ci_hi", "n", "note"], axes)?;
        self.write("composite.csv", &["agent", "strict", "floor", "divergent", "table_index", "target_strict", "target_floor"], composite)?;
        if !dynamics.is_empty() {
            self.write(
                "dynamics.csv",
                &[
                    "agent",
                    "family",
                    "method",
                    "kappa",
                    "kappa_lo",
                    "kappa_hi",
                    "theil_sen",
                    "fd_median",
                    "link_slope",
                    "link_curvature",
                    "prob_nonnegative",
                ],
                dynamics,
            )?;
        }
        if !levels.is_empty() {
            self.write("levels.csv", &["agent", "level"], levels)?;
            self.write("gates.csv", &["agent", "level", "gate", "outcome", "blocking", "detail"], gates)?;
        }
        if !frontier.is_empty() {
            self.write("frontier.csv", &["agent", "window", "a", "raw", "q_star", "lo", "hi"], frontier)?;
            self.write("frontier_summary.csv", &["agent", "window", "q_target", "fd", "auf", "complete"], summaries)?;
        }
        if !qf.is_empty() {
            self.write("quality_frontier.csv", &["agent", "tau", "F"], qf)?;
        }
        if !arch.is_empty() {
            self.write("archetypes.csv", &["agent", "axis", "target", "measured", "deviation"], arch)?;
        }
        Ok(())
    }
}

pub fn bundle_json(bundle: &ReportBundle) -> String {
    let mut s = serde_json::to_string_pretty(bundle).expect("bundle serializes");
    s.push('\n');
    s
}

/// Writes the bundle under `dir` and returns the SHA-256 of `bundle.json`.
pub fn write_bundle(bundle: &mut ReportBundle, dir: &Path) -> Result<String> {
    let tables = dir.join("tables");
    let plots_dir = dir.join("plots");
    for d in [dir, &tables, &plots_dir] {
        fs::create_dir_all(d).map_err(io_err(d))?;
    }
    let q_target = bundle.config.frontier.q_target;
    let mut notes = Vec::new();
    for a in &bundle.agents {
        let slug = slug(&a.agent);
        let charts = [
            ("frontier", plots::frontier_overlay(a, q_target), "no policy runs"),
            ("retention", plots::retention(a), "no persistence data"),
            ("tool-drift", plots::tool_drift(a), "no drift-tagged tool episodes"),
            ("quality-frontier", plots::quality_frontier(a), "no solo episodes"),
        ];
        for (kind, svg, why) in charts {
            match svg {
                Some(svg) => {
                    let path = plots_dir.join(format!("{slug}-{kind}.svg"));
                    fs::write(&path, svg).map_err(io_err(&path))?;
                }
                None => notes.push(format!("plot {slug}-{kind} skipped: {why}")),
            }
        }
    }
    bundle.notes.extend(notes);
    Tables { dir: tables, agents: &bundle.agents }.all()?;
    let json = bundle_json(bundle);
    let digest = sha256_hex(json.as_bytes());
    let path = dir.join("bundle.json");
    fs::write(&path, &json).map_err(io_err(&path))?;
    let sum = dir.join("bundle.sha256");
    fs::write(&sum, format!("{digest}  bundle.json\n")).map_err(io_err(&sum))?;
    Ok(digest)
}

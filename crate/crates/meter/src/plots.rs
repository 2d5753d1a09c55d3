//! Static SVG charts: delegability frontier overlay, retention curves,
//! tool success by drift, and the quality frontier.

use std::fmt::Write as _;

use crate::pipeline::AgentReport;

const W: f64 = 480.0;
const H: f64 = 320.0;
const PAD: f64 = 48.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Chart {
    svg: String,
    x: (f64, f64),
    y: (f64, f64),
}

impl Chart {
    fn new(title: &str, xlabel: &str, ylabel: &str, x: (f64, f64), y: (f64, f64)) -> Self {
        let mut svg = String::new();
        let _ = write!(
            svg,
            r##"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">
<rect width="{W}" height="{H}" fill="white"/>
<text x="{}" y="18" text-anchor="middle" font-size="13">{}</text>
<line x1="{PAD}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>
<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{b}" stroke="black"/>
<text x="{}" y="{}" text-anchor="middle">{}</text>
<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>
"##,
            W / 2.0,
            escape(title),
            W / 2.0,
            H - 8.0,
            escape(xlabel),
            H / 2.0,
            H / 2.0,
            escape(ylabel),
            b = H - PAD,
            r = W - PAD / 2.0,
        );
        let mut c = Chart { svg, x, y };
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let xv = x.0 + f * (x.1 - x.0);
            let yv = y.0 + f * (y.1 - y.0);
            let (px, _) = c.map(xv, y.0);
            let (_, py) = c.map(x.0, yv);
            let _ = writeln!(c.svg, r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, H - PAD + 14.0, tick(xv));
            let _ = writeln!(c.svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, PAD - 4.0, py + 4.0, tick(yv));
        }
        c
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let span = |r: (f64, f64)| if r.1 > r.0 { r.1 - r.0 } else { 1.0 };
        let px = PAD + (x - self.x.0) / span(self.x) * (W - 1.5 * PAD);
        let py = H - PAD - (y - self.y.0) / span(self.y) * (H - 2.0 * PAD);
        (px, py)
    }

    fn points(&self, pts: &[(f64, f64)]) -> String {
        pts.iter()
            .map(|&(x, y)| {
                let (px, py) = self.map(x, y);
                format!("{px:.2},{py:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn line(&mut self, pts: &[(f64, f64)], color: &str, dashed: bool) {
        let dash = if dashed { r#" stroke-dasharray="5,4""# } else { "" };
        let _ = writeln!(self.svg, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#, self.points(pts));
    }

    fn area(&mut self, upper: &[(f64, f64)], lower: &[(f64, f64)], color: &str) {
        let mut ring: Vec<(f64, f64)> = upper.to_vec();
        ring.extend(lower.iter().rev());
        let _ = writeln!(self.svg, r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#, self.points(&ring));
    }

    fn legend(&mut self, entries: &[(String, &str)]) {
        for (i, (label, color)) in entries.iter().enumerate() {
            let y = PAD + 4.0 + 14.0 * i as f64;
            let x = W - PAD * 2.8;
            let _ = writeln!(self.svg, r#"<rect x="{x}" y="{}" width="10" height="3" fill="{color}"/>"#, y - 3.0);
            let _ = writeln!(self.svg, r#"<text x="{}" y="{y}">{}</text>"#, x + 14.0, escape(label));
        }
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn color(i: usize) -> &'static str {
    COLORS[i % COLORS.len()]
}

/// Delegability frontiers per window with the target line. Two or more
/// windows shade the region between the first and the last.
pub fn frontier_overlay(agent: &AgentReport, q_target: f64) -> Option<String> {
    if agent.delegability.is_empty() {
        return None;
    }
    let curves: Vec<(String, Vec<(f64, f64)>)> = agent
        .delegability
        .iter()
        .map(|w| {
            let pts = w.estimate.bins.iter().zip(&w.estimate.q_star).filter_map(|(a, q)| q.map(|q| (*a, q))).collect();
            (w.window.clone(), pts)
        })
        .collect();
    let mut c = Chart::new(&format!("Delegability frontier: {}", agent.agent), "autonomy demand a", "q*(a)", (0.0, 1.0), (0.0, 1.0));
    if curves.len() > 1 {
        let first = &curves[0].1;
        let last = &curves[curves.len() - 1].1;
        if first.len() == last.len() && first.iter().zip(last).all(|(p, q)| p.0 == q.0) {
            c.area(last, first, color(1));
        }
    }
    for (i, (_, pts)) in curves.iter().enumerate() {
        c.line(pts, color(i), false);
    }
    c.line(&[(0.0, q_target), (1.0, q_target)], "#555555", true);
    let mut legend: Vec<(String, &str)> = curves.iter().enumerate().map(|(i, (w, _))| (w.clone(), color(i))).collect();
    legend.push((format!("Q* = {q_target}"), "#555555"));
    c.legend(&legend);
    Some(c.finish())
}

/// Fitted retention `exp(-lambda * lag)` per persistence family.
pub fn retention(agent: &AgentReport) -> Option<String> {
    let mem = agent.axes.diagnostics.memory.as_ref()?;
    if mem.families.is_empty() {
        return None;
    }
    let span = mem.max_lag_days.max(1.0);
    let mut c = Chart::new(&format!("Retention: {}", agent.agent), "lag (days)", "relative quality", (0.0, span), (0.0, 1.0));
    let shown = mem.families.iter().take(COLORS.len());
    let mut legend = Vec::new();
    for (i, f) in shown.enumerate() {
        let pts: Vec<(f64, f64)> = (0..=40).map(|k| span * k as f64 / 40.0).map(|d| (d, (-f.lambda * d).exp().min(1.0))).collect();
        c.line(&pts, color(i), false);
        legend.push((f.family.clone(), color(i)));
    }
    if mem.families.len() > COLORS.len() {
        legend.push((format!("+{} more", mem.families.len() - COLORS.len()), "#ffffff"));
    }
    c.legend(&legend);
    Some(c.finish())
}

/// Tool success against drift magnitude.
pub fn tool_drift(agent: &AgentReport) -> Option<String> {
    let tools = agent.axes.diagnostics.tools.as_ref()?;
    let pts: Vec<(f64, f64)> = tools.by_drift.iter().filter_map(|d| d.magnitude.map(|m| (m, d.success))).collect();
    if pts.is_empty() {
        return None;
    }
    let xmax = pts.iter().map(|p| p.0).fold(0.0, f64::max).max(0.1);
    let mut c = Chart::new(&format!("Tool success by drift: {}", agent.agent), "drift magnitude", "success", (0.0, xmax), (0.0, 1.0));
    c.line(&pts, color(0), false);
    Some(c.finish())
}

/// `F(tau)`, the share of runs reaching quality `tau`.
pub fn quality_frontier(agent: &AgentReport) -> Option<String> {
    let qf = agent.quality_frontier.as_ref()?;
    let pts: Vec<(f64, f64)> = qf.curve.iter().map(|p| (p[0], p[1])).collect();
    let mut c = Chart::new(&format!("Quality frontier: {}", agent.agent), "quality threshold tau", "F(tau)", (0.0, 1.0), (0.0, 1.0));
    c.line(&pts, color(0), false);
    c.legend(&[(format!("AUF = {:.3}", qf.auf), color(0))]);
    Some(c.finish())
}

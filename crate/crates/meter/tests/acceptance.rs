//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every line is printed on a plain
//! `cargo test`. Exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::{E, LN_2};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use aai_core::axes::{retention_score, revision};
use aai_core::axis::calibrate;
use aai_core::battery::StageWeights;
use aai_core::composite::{aai_index, gradient, ZeroPolicy};
use aai_core::dynamics::{step_operator, Link, Step, WindowKappa};
use aai_core::frontier::{even_bins, frontier_summaries, quality_frontier, FrontierEstimate};
use aai_core::gates::{assign_level, expansion_closure, ClosureResult, FamilyDynamics, GateConfig, GateEvidence};
use aai_core::simulate::{rate_escape_hit, simulate_progression, Archetype, ProgressionSpec, ProgressionStatus, RateEscape};
use aai_core::stats::{bootstrap, isotonic_fit, theil_sen, BootstrapPlan, Order, Runner, Sequential};
use aai_core::trace::{Ablation, Interval, StageAutonomy};
use aai_core::{Axis, EpisodeTrace, RevisionEvent};
use aai_meter::bundle::write_bundle;
use aai_meter::runner::Parallel;
use aai_meter::simulate::{write_simulation, SimulationOptions};
use aai_meter::{run_report, Config, Inputs, Stages};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Fails the criterion when the measured time exceeds `limit`.
fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if took > limit {
        o.pass = false;
        o.detail.push_str(&format!("; runtime {took:.2?} exceeds {limit:?}"));
    } else {
        o.detail.push_str(&format!("; {took:.2?}"));
    }
    o
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// 1. Calibration map.
fn calibration() -> Outcome {
    timed(Duration::from_secs(1), || {
        // Anchors whose midpoints are exact in binary floating point.
        let anchors = [(0.0, 1.0), (0.125, 0.625), (-3.0, 5.0), (0.25, 0.75), (10.0, 110.0)];
        let mut bad = Vec::new();
        for (l, u) in anchors {
            let span = u - l;
            let checks = [(l, 0.0), (u, 1.0), (0.5 * (l + u), 0.5), (l - 0.1 * span, 0.0), (u + 0.1 * span, 1.0)];
            for (raw, want) in checks {
                let got = calibrate(raw, l, u);
                if got != want {
                    bad.push(format!("calibrate({raw}, {l}, {u}) = {got}, want {want}"));
                }
            }
        }
        outcome(bad.is_empty(), if bad.is_empty() { "anchors exact, clipping at +-10%".into() } else { bad.join("; ") })
    })
}

// 2. Composite properties.
fn composite() -> Outcome {
    timed(Duration::from_secs(5), || {
        let mut r = rng(2);
        let mut worst_fd = 0.0f64;
        let mut failures = Vec::new();
        for case in 0..1000 {
            let weights: BTreeMap<Axis, f64> = Axis::ALL.iter().map(|&a| (a, r.gen_range(0.1..3.0))).collect();
            let scores: BTreeMap<Axis, f64> = Axis::ALL.iter().map(|&a| (a, r.gen_range(0.05..0.95))).collect();

            let v = r.gen_range(0.01..1.0);
            let flat: BTreeMap<Axis, f64> = Axis::ALL.iter().map(|&a| (a, v)).collect();
            let c = aai_index(&flat, &weights, ZeroPolicy::Strict).unwrap().value;
            if !close(c, v, 1e-12) {
                failures.push(format!("case {case}: equal values {v} give {c}"));
            }

            let mut zeroed = scores.clone();
            zeroed.insert(Axis::ALL[case % Axis::ALL.len()], 0.0);
            let z = aai_index(&zeroed, &weights, ZeroPolicy::Strict).unwrap().value;
            if z != 0.0 {
                failures.push(format!("case {case}: zero axis gives {z}"));
            }

            let base = aai_index(&scores, &weights, ZeroPolicy::Strict).unwrap().value;
            let k = r.gen_range(0.01..100.0);
            let scaled: BTreeMap<Axis, f64> = weights.iter().map(|(a, w)| (*a, w * k)).collect();
            let s = aai_index(&scores, &scaled, ZeroPolicy::Strict).unwrap().value;
            if !close(s, base, 1e-12) {
                failures.push(format!("case {case}: weights x{k} move index {base} -> {s}"));
            }

            let grad = gradient(&scores, &weights).unwrap();
            let h = 1e-6;
            for (&axis, &g) in &grad {
                let mut up = scores.clone();
                let mut down = scores.clone();
                up.insert(axis, scores[&axis] + h);
                down.insert(axis, scores[&axis] - h);
                let fd = (aai_index(&up, &weights, ZeroPolicy::Strict).unwrap().value
                    - aai_index(&down, &weights, ZeroPolicy::Strict).unwrap().value)
                    / (2.0 * h);
                worst_fd = worst_fd.max((fd - g).abs());
            }
        }
        if worst_fd > 1e-6 {
            failures.push(format!("gradient vs finite difference off by {worst_fd:e}"));
        }
        failures.truncate(3);
        let pass = failures.is_empty();
        outcome(pass, if pass { format!("1000 vectors; max |grad - FD| = {worst_fd:.1e}") } else { failures.join("; ") })
    })
}

// 3. Memory anchors.
fn memory_anchors() -> Outcome {
    let t_min = 7.0;
    let lambda_max = LN_2 / t_min;
    let cases = [
        ("lambda = 0", retention_score(0.0, lambda_max), 1.0),
        ("t1/2 = t_min", retention_score(LN_2 / t_min, lambda_max), (-1.0f64).exp()),
        ("t1/2 = 2 t_min", retention_score(LN_2 / (2.0 * t_min), lambda_max), (-0.5f64).exp()),
    ];
    let bad: Vec<String> = cases.iter().filter(|c| !close(c.1, c.2, 1e-9)).map(|c| format!("{}: {} vs {}", c.0, c.1, c.2)).collect();
    let readings = format!("{:.2}/{:.2}", cases[1].1, cases[2].1);
    let pass = bad.is_empty() && readings == "0.37/0.61";
    outcome(pass, if bad.is_empty() { format!("anchors within 1e-9; readings {readings}") } else { bad.join("; ") })
}

fn worked_event(post: f64, ablated: Option<f64>) -> RevisionEvent {
    RevisionEvent {
        id: "e1".into(),
        revised_pre: 0.78,
        revised_post: post,
        control_pre: 0.78,
        control_post: 0.80,
        stage_autonomy: StageAutonomy { plan: 0.9, implement: 0.9, verify: 0.9 },
        change_kind: "tool".into(),
        artifacts: vec!["diff".into()],
        ablation: ablated.map(|capability| Ablation { capability, control_pre: None, control_post: None }),
        did_ci: Some(Interval { lo: 0.02, hi: 0.06 }),
        day: None,
    }
}

// 4. Self-revision worked example.
fn revision_example() -> Outcome {
    let e = worked_event(0.84, None);
    let r = revision(&[&e], &StageWeights::default(), 0.10);
    let Some(c) = r.contributions.first() else {
        return outcome(false, "event was filtered");
    };
    let pass = close(c.did, 0.04, 1e-12) && close(c.contribution, 0.036, 1e-12) && close(r.score, 0.36, 1e-12);
    outcome(pass, format!("dC = {}, contribution = {}, R = {}", c.did, c.contribution, r.score))
}

// 5. Step operators.
fn steps() -> Outcome {
    let add = step_operator(0.5, Link::Surprisal, Step::Additive(1.0)).unwrap();
    let mul = step_operator(0.5, Link::Surprisal, Step::Multiplicative(E)).unwrap();
    let add_oracle = 1.0 - 0.5 / E;
    let mul_oracle = 1.0 - 2f64.powf(-E);
    let mut r = rng(5);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let c: f64 = r.gen_range(0.01..0.99);
        let a: f64 = r.gen_range(1.01..20.0);
        let next = step_operator(c, Link::Surprisal, Step::Additive(a.ln())).unwrap();
        worst = worst.max(((1.0 - next) - (1.0 - c) / a).abs());
    }
    let pass =
        add >= 0.816 - 1e-3 && close(add, add_oracle, 1e-12) && close(mul, 0.848, 1e-3) && close(mul, mul_oracle, 1e-12) && worst <= 1e-12;
    outcome(pass, format!("additive {add:.6}, multiplicative {mul:.6}, max shortfall error {worst:.1e}"))
}

// 6. Rate-escape integrator.
fn integrator() -> Outcome {
    timed(Duration::from_secs(2), || {
        let law = RateEscape { a: 1.0, beta: 0.5 };
        let target: f64 = 1.0 - 1e-6;
        // (1 - k)^(1 - beta) falls linearly at rate a (1 - beta).
        let oracle = (1.0 - (1.0 - target).powf(0.5)) / 0.5;
        let hit = rate_escape_hit(law, 0.0, target, 10.0, 0.01, 1e-12).unwrap();
        let mut detail = format!("k >= 1 - 1e-6 from R = {hit:?} (closed form {oracle:.6}), inside R = 2 +- 1e-3");
        let mut pass = hit.is_some_and(|h| h <= 2.0 - 1e-3 && close(h, oracle, 1e-6));

        let spec = ProgressionSpec::demo();
        let half = ProgressionSpec { h_max: spec.h_max / 2.0, ..spec.clone() };
        let (a, b) = (simulate_progression(&spec).unwrap().r4, simulate_progression(&half).unwrap().r4);
        match (a, b) {
            (Some(a), Some(b)) => {
                let rel = (a - b).abs() / a;
                pass &= rel < 1e-3;
                detail.push_str(&format!("; R4 {a:.6} vs {b:.6} at half step (rel {rel:.1e})"));
            }
            _ => {
                pass = false;
                detail.push_str("; R4 not attained");
            }
        }
        outcome(pass, detail)
    })
}

// 7. Progression.
fn progression() -> Outcome {
    let spec = ProgressionSpec::demo();
    let res = simulate_progression(&spec).unwrap();
    let mut pass = spec.hypotheses_hold() && res.status == ProgressionStatus::Attained;
    let mut detail = match (res.r4, res.r5) {
        (Some(r4), Some(r5)) => {
            pass &= r4 <= r5 && r4.is_finite() && r5.is_finite();
            format!("R4 = {r4:.4}, R5 = {r5:.4}")
        }
        other => {
            pass = false;
            format!("levels not attained: {other:?}")
        }
    };
    let mut blocked = 0;
    let mut required = 0;
    for (which, axis) in spec.rho4.keys().map(|a| (4, *a)).chain(spec.rho5.keys().map(|a| (5, *a))) {
        required += 1;
        let mut s = spec.clone();
        let rho = if which == 4 { &mut s.rho4 } else { &mut s.rho5 };
        rho.insert(axis, 0.0);
        let r = simulate_progression(&s).unwrap();
        if matches!(r.status, ProgressionStatus::BudgetExceeded { .. }) {
            blocked += 1;
        } else {
            pass = false;
            detail.push_str(&format!("; rho{which}({}) = 0 still attains", axis.letter()));
        }
    }
    detail.push_str(&format!("; {blocked}/{required} zeroed slopes block attainment"));
    outcome(pass, detail)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

/// Least-squares monotone fit by enumerating every split into contiguous
/// blocks and keeping the best feasible one.
fn isotonic_brute(y: &[f64], w: &[f64], increasing: bool) -> Vec<f64> {
    let n = y.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << (n - 1)) {
        let mut fit = Vec::with_capacity(n);
        let mut start = 0;
        let mut means = Vec::new();
        for i in 0..n {
            if i == n - 1 || mask & (1 << i) != 0 {
                let sw: f64 = w[start..=i].iter().sum();
                let m = y[start..=i].iter().zip(&w[start..=i]).map(|(a, b)| a * b).sum::<f64>() / sw;
                means.push(m);
                fit.extend(std::iter::repeat_n(m, i + 1 - start));
                start = i + 1;
            }
        }
        let ordered = means.windows(2).all(|p| if increasing { p[0] <= p[1] } else { p[0] >= p[1] });
        if !ordered {
            continue;
        }
        let sse: f64 = y.iter().zip(&fit).zip(w).map(|((a, f), wi)| wi * (a - f) * (a - f)).sum();
        if best.as_ref().is_none_or(|b| sse < b.0) {
            best = Some((sse, fit));
        }
    }
    best.expect("a single block is always feasible").1
}

// 8. Theil-Sen and isotonic oracles.
fn robust_oracles() -> Outcome {
    timed(Duration::from_secs(30), || {
        let mut r = rng(8);
        let mut worst_ts = 0.0f64;
        let mut worst_iso = 0.0f64;
        for _ in 0..200 {
            let n = r.gen_range(2..=50);
            let x: Vec<f64> = (0..n).map(|_| (r.gen_range(0..40) as f64) * 0.25).collect();
            let y: Vec<f64> = (0..n).map(|_| r.gen_range(-5.0..5.0)).collect();
            let mut slopes = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if x[j] > x[i] {
                        slopes.push((y[j] - y[i]) / (x[j] - x[i]));
                    }
                }
            }
            match theil_sen(&x, &y) {
                Ok(s) if !slopes.is_empty() => worst_ts = worst_ts.max((s - median(slopes)).abs()),
                Err(_) if slopes.is_empty() => {}
                _ => worst_ts = f64::INFINITY,
            }
        }
        for case in 0..200 {
            let n = r.gen_range(1..=12);
            let y: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..1.0)).collect();
            let w: Vec<f64> = (0..n).map(|_| r.gen_range(0.1..3.0)).collect();
            let (order, inc) = if case % 2 == 0 { (Order::Increasing, true) } else { (Order::Decreasing, false) };
            let got = isotonic_fit(&y, Some(&w), order).unwrap();
            let want = isotonic_brute(&y, &w, inc);
            for (a, b) in got.iter().zip(&want) {
                worst_iso = worst_iso.max((a - b).abs());
            }
        }
        let pass = worst_ts <= 1e-12 && worst_iso <= 1e-9;
        outcome(pass, format!("200 Theil-Sen cases (max error {worst_ts:.1e}), 200 isotonic cases (max error {worst_iso:.1e})"))
    })
}

// 9. Bootstrap determinism and coverage.
fn bootstrap_checks() -> Outcome {
    timed(Duration::from_secs(60), || {
        let mean = |s: &[f64]| Some(s.iter().sum::<f64>() / s.len() as f64);
        let mut r = rng(9);
        let data: Vec<f64> = (0..300).map(|_| r.gen_range(0.0..1.0)).collect();
        let plan = BootstrapPlan { replicates: 2000, seed: 77, ..BootstrapPlan::default() };
        let runners: [&dyn Runner; 2] = [&Sequential, &Parallel];
        let outs: Vec<_> = runners.iter().map(|run| bootstrap(&data, mean, &plan, *run).unwrap()).collect();
        let bits =
            |b: &aai_core::stats::Bootstrap| (b.lo.to_bits(), b.hi.to_bits(), b.draws.iter().map(|d| d.to_bits()).collect::<Vec<_>>());
        let identical = bits(&outs[0]) == bits(&outs[1]);

        let mut covered = 0;
        for trial in 0..200u64 {
            let mut tr = rng(1000 + trial);
            let sample: Vec<f64> = (0..100).map(|_| if tr.gen_bool(0.5) { 1.0 } else { 0.0 }).collect();
            let p = BootstrapPlan { replicates: 1000, seed: trial, ..BootstrapPlan::default() };
            let b = bootstrap(&sample, mean, &p, &Sequential).unwrap();
            if b.lo <= 0.5 && 0.5 <= b.hi {
                covered += 1;
            }
        }
        let pass = identical && covered >= 180;
        outcome(pass, format!("sequential vs parallel identical: {identical}; coverage {covered}/200"))
    })
}

const KAPPA_STAR: f64 = 0.01;

/// Threshold rows for AAI-2..4 written out independently of the engine
/// defaults; `true` marks a strict inequality.
type Row = [(Axis, f64, bool); 9];

fn table() -> [(u8, Row); 3] {
    use Axis::*;
    let row = |v: [f64; 9], r_strict: bool| {
        let axes = [A, G, P, M, T, R, S, W, Dollar];
        let mut out = [(A, 0.0, false); 9];
        for (i, a) in axes.iter().enumerate() {
            out[i] = (*a, v[i], *a == R && r_strict);
        }
        out
    };
    [
        (2, row([0.6, 0.3, 0.5, 0.5, 0.5, 0.0, 0.2, 0.6, 0.4], true)),
        (3, row([0.75, 0.5, 0.7, 0.7, 0.7, 0.4, 0.5, 0.75, 0.6], false)),
        (4, row([0.9, 0.9, 0.9, 0.85, 0.8, 0.6, 0.7, 0.85, 0.8], false)),
    ]
}

fn expected_level(axes: &BTreeMap<Axis, f64>) -> Option<u8> {
    table()
        .iter()
        .rev()
        .find(|(_, row)| row.iter().all(|&(a, t, strict)| if strict { axes[&a] > t } else { axes[&a] >= t }))
        .map(|(l, _)| *l)
}

/// Evidence that clears every non-axis gate through AAI-4.
fn evidence(axes: BTreeMap<Axis, f64>) -> GateEvidence {
    let fam = |name: &str, k: f64| FamilyDynamics {
        span_days: 14.0,
        max_gap_days: 1.0,
        rolling: vec![WindowKappa { start: 0.0, end: 7.0, kappa: Some(k) }],
        ..FamilyDynamics::new(name, k, k / 2.0, 1.5 * k)
    };
    let pass = ClosureResult { passed: true, margin: Some(0.01), reason: None };
    GateEvidence {
        axes,
        tools_used: Some(4),
        mild_shift_success: Some(0.7),
        memory_span_days: Some(30.0),
        g_parity: Some(true),
        families: vec![fam("a", KAPPA_STAR), fam("b", 2.0 * KAPPA_STAR)],
        maintenance: Some(pass.clone()),
        expansion: vec![pass],
        ..GateEvidence::default()
    }
}

fn engine_level(axes: &BTreeMap<Axis, f64>) -> Option<u8> {
    assign_level(&evidence(axes.clone()), &GateConfig::new(KAPPA_STAR)).unwrap().level
}

/// Engine and oracle agree when both are at AAI-2 or above, or both below.
fn levels_agree(engine: Option<u8>, oracle: Option<u8>) -> bool {
    match oracle {
        Some(l) => engine == Some(l),
        None => engine.is_none_or(|l| l < 2),
    }
}

// 10. Gate boundary matrix and monotonicity.
fn gate_table() -> Outcome {
    let delta = 1e-9;
    let mut cases = 0;
    let mut bad = Vec::new();
    for (level, row) in table() {
        let base: BTreeMap<Axis, f64> = row.iter().map(|&(a, t, strict)| (a, if strict { t + 1e-3 } else { t })).collect();
        for &(axis, t, _) in &row {
            for (name, v) in [("at", t), ("below", t - delta), ("above", t + delta)] {
                if !(0.0..=1.0).contains(&v) {
                    continue;
                }
                let mut axes = base.clone();
                axes.insert(axis, v);
                let (got, want) = (engine_level(&axes), expected_level(&axes));
                cases += 1;
                if !levels_agree(got, want) {
                    bad.push(format!("AAI-{level} {} {name}: engine {got:?}, expected {want:?}", axis.letter()));
                }
            }
        }
    }
    let mut r = rng(10);
    let grid: Vec<f64> = table().iter().flat_map(|(_, row)| row.iter().map(|x| x.1)).collect();
    let mut violations = 0;
    for _ in 0..500 {
        let pick = |r: &mut ChaCha8Rng| {
            if r.gen_bool(0.5) {
                (grid[r.gen_range(0..grid.len())] + r.gen_range(-0.02..0.02)).clamp(0.0, 1.0)
            } else {
                r.gen_range(0.0..1.0)
            }
        };
        let axes: BTreeMap<Axis, f64> = Axis::ALL.iter().map(|&a| (a, pick(&mut r))).collect();
        let mut raised = axes.clone();
        let a = Axis::ALL[r.gen_range(0..Axis::ALL.len())];
        raised.insert(a, (axes[&a] + r.gen_range(0.0..0.5)).min(1.0));
        let rank = |l: Option<u8>| l.map_or(-1, i32::from);
        if rank(engine_level(&raised)) < rank(engine_level(&axes)) {
            violations += 1;
        }
    }
    bad.truncate(3);
    let pass = bad.is_empty() && violations == 0;
    let detail = format!("{cases} boundary cases, {} mismatches; {violations} monotonicity violations in 500 vectors", bad.len());
    outcome(pass, if bad.is_empty() { detail } else { format!("{detail}: {}", bad.join("; ")) })
}

// 11. Expansion closure.
fn closures() -> Outcome {
    let reverted = expansion_closure(&worked_event(0.84, Some(0.78)), 0.01);
    let persistent = expansion_closure(&worked_event(0.84, Some(0.83)), 0.01);
    let pass = reverted.passed && !persistent.passed;
    outcome(
        pass,
        format!(
            "reverting ablation passed = {}; persistent gain passed = {} ({})",
            reverted.passed,
            persistent.passed,
            persistent.reason.as_deref().unwrap_or("-")
        ),
    )
}

// 12. Frontier summaries.
fn frontier() -> Outcome {
    let bins = even_bins(11).unwrap();
    let flat = FrontierEstimate::from_values(bins.clone(), vec![Some(0.9); 11]).unwrap();
    let s = frontier_summaries(&flat, 0.65, None).unwrap();
    let mut pass = close(s.fd, 1.0, 1e-9) && close(s.auf, 0.25, 1e-9);
    let mut detail = format!("constant: FD = {}, AUF = {}", s.fd, s.auf);

    let mut r = rng(12);
    let mut violations = 0;
    for _ in 0..200 {
        let mut q: Vec<f64> = (0..11).map(|_| r.gen_range(0.0..1.0)).collect();
        q.sort_by(|a, b| b.total_cmp(a));
        let lifted: Vec<f64> = q.iter().map(|v| (v + r.gen_range(0.0..0.2)).min(1.0)).collect();
        let target = r.gen_range(0.3..0.9);
        let lo = frontier_summaries(&FrontierEstimate::from_values(bins.clone(), q.into_iter().map(Some).collect()).unwrap(), target, None)
            .unwrap();
        let hi =
            frontier_summaries(&FrontierEstimate::from_values(bins.clone(), lifted.into_iter().map(Some).collect()).unwrap(), target, None)
                .unwrap();
        if hi.fd < lo.fd || hi.auf < lo.auf {
            violations += 1;
        }
    }
    pass &= violations == 0;
    detail.push_str(&format!("; {violations} dominance violations in 200 pairs"));

    let traces: Vec<EpisodeTrace> = (0..40).map(|i| EpisodeTrace::new(format!("t{}", i % 8), 0.8)).collect();
    let qf = quality_frontier(&traces, None, 101).unwrap();
    let step_ok = qf.curve.iter().all(|p| p[1] == if p[0] <= 0.8 { 1.0 } else { 0.0 });
    pass &= qf.auf == 0.8 && step_ok;
    detail.push_str(&format!("; step frontier AUF = {}", qf.auf));
    outcome(pass, detail)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("aai-acceptance-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn report(traces: &Path, cfg: &Config, out: &Path, runner: &dyn Runner) -> aai_meter::ReportBundle {
    let inputs = Inputs::load(&[traces.to_path_buf()]).unwrap();
    let mut bundle = run_report(&inputs, cfg, cfg.bootstrap.seed, Stages::ALL, runner).unwrap();
    write_bundle(&mut bundle, out).unwrap();
    bundle
}

// 13. End-to-end archetype reproduction.
fn end_to_end(sim: &Path) -> (Outcome, Option<aai_meter::ReportBundle>) {
    let start = Instant::now();
    let opts = SimulationOptions::new(42);
    if let Err(e) = write_simulation(sim, &opts, &ProgressionSpec::demo()) {
        return (outcome(false, format!("simulation failed: {e}")), None);
    }
    let cfg = Config::load(&sim.join("config.toml")).unwrap();
    let bundle = report(&sim.join("traces.jsonl"), &cfg, &sim.join("report"), &Sequential);
    let took = start.elapsed();

    let mut pass = true;
    let mut parts = Vec::new();
    for arch in Archetype::ALL {
        let Some(agent) = bundle.agents.iter().find(|a| a.agent == arch.name()) else {
            pass = false;
            parts.push(format!("{} missing", arch.name()));
            continue;
        };
        let mut worst = 0.0f64;
        for (axis, target) in arch.targets() {
            match agent.axes.axes.score(axis) {
                Some(v) => worst = worst.max((v - target).abs()),
                None => worst = f64::INFINITY,
            }
        }
        pass &= worst <= 0.03;
        let kappas: Vec<f64> = agent.dynamics.iter().map(|f| f.kappa.point).collect();
        let kappa_ok = match arch.kappa_interval() {
            Some([lo, hi]) => !kappas.is_empty() && kappas.iter().all(|k| (lo..=hi).contains(k)),
            None => true,
        };
        pass &= kappa_ok;
        let c = &agent.composite;
        parts.push(format!(
            "{}: max axis dev {worst:.4}, kappa {:?}{}, index strict {:.3} / floor {:.3} / table {:.2}",
            arch.name(),
            kappas.iter().map(|k| (k * 1e4).round() / 1e4).collect::<Vec<_>>(),
            if kappa_ok { "" } else { " outside interval" },
            c.strict.value,
            c.floor.value,
            arch.table_index()
        ));
    }
    let documented = bundle.notes.iter().any(|n| n.contains("zero policy"));
    pass &= documented;
    if took > Duration::from_secs(120) {
        pass = false;
    }
    parts.push(format!("discrepancy note present: {documented}; {took:.2?}"));
    (outcome(pass, parts.join("; ")), Some(bundle))
}

fn tree_bytes(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

// 14. Report determinism.
fn determinism(sim: &Path) -> Outcome {
    let cfg = Config::load(&sim.join("config.toml")).unwrap();
    let second = sim.join("report-again");
    report(&sim.join("traces.jsonl"), &cfg, &second, &Parallel);
    let (a, b) = (tree_bytes(&sim.join("report")), tree_bytes(&second));
    let differing: Vec<String> = a.keys().chain(b.keys()).filter(|k| a.get(*k) != b.get(*k)).map(|k| k.display().to_string()).collect();
    let pass = !a.is_empty() && differing.is_empty();
    outcome(
        pass,
        if pass {
            format!("{} files byte-identical (sequential run vs parallel rerun)", a.len())
        } else {
            format!("differing: {}", differing.join(", "))
        },
    )
}

fn main() {
    let mut results: Vec<(u8, &str, Outcome)> = vec![
        (1, "calibration map", calibration()),
        (2, "composite properties", composite()),
        (3, "memory anchors", memory_anchors()),
        (4, "self-revision worked example", revision_example()),
        (5, "step operators", steps()),
        (6, "rate-escape integrator", integrator()),
        (7, "progression", progression()),
        (8, "Theil-Sen and isotonic oracles", robust_oracles()),
        (9, "bootstrap", bootstrap_checks()),
        (10, "gate table", gate_table()),
        (11, "closures", closures()),
        (12, "frontier", frontier()),
    ];
    let sim = scratch("sim");
    let (e2e, bundle) = end_to_end(&sim);
    results.push((13, "end-to-end archetypes", e2e));
    let det = if bundle.is_some() { determinism(&sim) } else { outcome(false, "no first report to compare") };
    results.push((14, "report determinism", det));
    let _ = fs::remove_dir_all(&sim);

    let mut failed = 0;
    for (n, name, o) in &results {
        println!("{} {n:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

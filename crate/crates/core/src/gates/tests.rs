use super::*;
use crate::dynamics::WindowKappa;

const KAPPA_STAR: f64 = 0.01;

fn row_axes(row: &Row) -> BTreeMap<Axis, f64> {
    row.iter().map(|(&a, t)| (a, if a == Axis::R && t.value() == 0.0 { 0.05 } else { t.value() })).collect()
}

fn family(name: &str, kappa: f64) -> FamilyDynamics {
    FamilyDynamics {
        span_days: 14.0,
        max_gap_days: 1.0,
        rolling: alloc::vec![WindowKappa { start: 0.0, end: 7.0, kappa: Some(kappa) }],
        ..FamilyDynamics::new(name, kappa, kappa / 2.0, kappa * 1.5)
    }
}

fn pass() -> ClosureResult {
    ClosureResult { passed: true, margin: Some(0.01), reason: None }
}

/// Evidence that satisfies every non-axis gate up to AAI-4.
fn evidence(axes: BTreeMap<Axis, f64>) -> GateEvidence {
    GateEvidence {
        axes,
        tools_used: Some(4),
        mild_shift_success: Some(0.7),
        memory_span_days: Some(30.0),
        g_parity: Some(true),
        families: alloc::vec![family("a", KAPPA_STAR), family("b", 2.0 * KAPPA_STAR)],
        maintenance: Some(pass()),
        expansion: alloc::vec![pass()],
        ..GateEvidence::default()
    }
}

fn level(ev: &GateEvidence) -> Option<u8> {
    assign_level(ev, &GateConfig::new(KAPPA_STAR)).unwrap().level
}

#[test]
fn exact_aai3_row_is_level_3() {
    let t = ThresholdTable::default();
    assert_eq!(level(&evidence(row_axes(&t.aai3))), Some(3));
    assert_eq!(level(&evidence(row_axes(&t.aai4))), Some(4));
    assert_eq!(level(&evidence(row_axes(&t.aai2))), Some(2));
}

#[test]
fn generality_just_below_aai3() {
    let mut axes = row_axes(&ThresholdTable::default().aai3);
    axes.insert(Axis::G, 0.49);
    assert_eq!(level(&evidence(axes)), Some(2));
}

#[test]
fn zero_revision_caps_at_level_1() {
    let axes: BTreeMap<Axis, f64> = Axis::ALL.iter().map(|&a| (a, if a == Axis::R { 0.0 } else { 0.99 })).collect();
    assert_eq!(level(&evidence(axes)), Some(1));
}

#[test]
fn rpa_profile_is_level_0() {
    let axes: BTreeMap<Axis, f64> =
        [(Axis::A, 0.98), (Axis::G, 0.06), (Axis::P, 0.03), (Axis::M, 0.12), (Axis::T, 0.12), (Axis::R, 0.0)].into_iter().collect();
    let ev = GateEvidence { axes, tools_used: Some(1), mild_shift_success: Some(0.2), ..GateEvidence::default() };
    let mut cfg = GateConfig::new(KAPPA_STAR);
    assert_eq!(assign_level(&ev, &cfg).unwrap().level, Some(0));
    cfg.lower.strict_profile = true;
    assert_eq!(assign_level(&ev, &cfg).unwrap().level, Some(0));
}

#[test]
fn missing_kappa_star_names_the_field() {
    let err = assign_level(&GateEvidence::default(), &GateConfig::default()).unwrap_err();
    assert_eq!(err, crate::Error::MissingField("gates.kappa_star"));
}

#[test]
fn missing_evidence_is_insufficient() {
    let mut ev = evidence(row_axes(&ThresholdTable::default().aai3));
    ev.maintenance = None;
    let r = assign_level(&ev, &GateConfig::new(KAPPA_STAR)).unwrap();
    assert_eq!(r.level, Some(3));
    assert!(r.verdicts.iter().any(|v| v.level == 2 && v.outcome == Outcome::Insufficient));
    assert!(!r.levels[4].passed);
}

#[test]
fn curvature_mode_needs_steps() {
    let mut ev = evidence(row_axes(&ThresholdTable::default().aai3));
    let cfg = GateConfig { mode: GateMode::CurvatureAugmented, ..GateConfig::new(KAPPA_STAR) };
    assert_eq!(assign_level(&ev, &cfg).unwrap().level, Some(2));
    for f in &mut ev.families {
        f.curvature =
            Some(CurvatureSummary { kappa_tilde: 0.1, delta_kappa_tilde: 0.0, prob_nonnegative: Some(1.0), elasticity: Some(0.0) });
    }
    ev.composite_prev = Some(0.5);
    ev.composite_current = Some(0.82);
    assert_eq!(assign_level(&ev, &cfg).unwrap().level, Some(3));
}

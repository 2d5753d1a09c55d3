use aai_core::axes::compute_axes;
use aai_core::dynamics::{kappa_estimate, KappaMethod};
use aai_core::simulate::{archetype_battery, simulate_archetype, Archetype, ArchetypeSpec};
use aai_core::stats::{BootstrapPlan, Sequential};
use aai_core::Axis;

fn recover(archetype: Archetype, noise: f64, tol: f64) {
    let battery = archetype_battery();
    let spec = ArchetypeSpec { noise, ..ArchetypeSpec::new(archetype, 42) };
    let sim = simulate_archetype(&spec).unwrap();
    let plan = BootstrapPlan { replicates: 200, ..BootstrapPlan::default() };
    let report = compute_axes(&battery, &sim.traces, &sim.events, &plan, &Sequential).unwrap();
    let scores = report.axes.scores();
    for (axis, target) in &spec.targets {
        let got = scores.get(axis).copied().unwrap_or(f64::NAN);
        assert!((got - target).abs() <= tol, "{archetype:?} {}: {got} vs {target}", axis.letter());
    }
    assert!(!scores.contains_key(&Axis::E));
    for series in &sim.checkpoints {
        let k = kappa_estimate(series, KappaMethod::TheilSen, &plan, &Sequential).unwrap();
        if let Some([lo, hi]) = archetype.kappa_interval() {
            assert!(k.point >= lo && k.point <= hi, "{archetype:?} kappa {}", k.point);
        } else {
            assert!(k.point.abs() < 0.002);
        }
    }
}

#[test]
fn archetypes_recover_targets_with_noise() {
    for a in Archetype::ALL {
        recover(a, 1.0, 0.03);
    }
}

#[test]
fn archetypes_are_near_exact_without_noise() {
    for a in Archetype::ALL {
        recover(a, 0.0, 1e-4);
    }
}

use proptest::prelude::*;
use timefringe::fringes::find_fringes;
use timefringe::packet::GateProfile;
use timefringe::{
    coherence_visibility, extract_fringes, run_two_gate, scan, Error, RunOptions, ScanParameter,
    Theory, TwoGateSetup,
};

fn planted(period: f64, step: f64) -> (Vec<f64>, Vec<f64>) {
    let times: Vec<f64> = (0..2001).map(|i| -100.0 + step * i as f64).collect();
    let intensity = times
        .iter()
        .map(|t| {
            (-t * t / (2.0 * 40.0 * 40.0)).exp() * (std::f64::consts::PI * t / period).cos().powi(2)
        })
        .collect();
    (times, intensity)
}

fn quick() -> RunOptions {
    RunOptions {
        evolution: false,
        ..RunOptions::default()
    }
}

#[test]
fn recovers_planted_period_within_one_step() {
    for period in [3.0, 7.3, 11.9] {
        let (t, i) = planted(period, 0.1);
        let r = find_fringes(&t, &i, 0.1, Some(period)).unwrap();
        assert!(
            (r.spacing_t - period).abs() <= 0.1,
            "{period}: {}",
            r.spacing_t
        );
        assert!(r.visibility > 0.99);
        assert!(r.peak_times.len() >= 6);
    }
}

#[test]
fn flat_trace_has_no_fringes() {
    let t: Vec<f64> = (0..101).map(f64::from).collect();
    let flat = vec![2.5; 101];
    assert!(matches!(
        find_fringes(&t, &flat, 0.1, None),
        Err(Error::NoFringes { found: 0 })
    ));
}

#[test]
fn desk_stueckelberg_shows_fringes_at_predicted_spacing() {
    let setup = TwoGateSetup::desk_default();
    let run = run_two_gate(Theory::Stueckelberg, &setup, &RunOptions::default()).unwrap();
    assert!(coherence_visibility(&run.trace) > 0.99);
    let f = extract_fringes(&run.trace, 0.1).unwrap();
    assert!(f.peak_times.len() >= 6);
    assert!(f.relative_error.unwrap() < 0.02, "{f:?}");
    assert!(run.norm_drift.unwrap() < 1e-6);
    assert!(run.warnings.is_empty());
}

#[test]
fn floquet_with_separated_rectangular_gates_has_no_cross_term() {
    let setup = TwoGateSetup {
        gate_profile: GateProfile::Rectangular,
        gate_width: 0.5,
        gate_spacing: 3.0,
        ..TwoGateSetup::desk_default()
    };
    let run = run_two_gate(Theory::Floquet, &setup, &quick()).unwrap();
    assert_eq!(coherence_visibility(&run.trace), 0.0);
}

#[test]
fn control_is_an_exact_mixture() {
    let run = run_two_gate(
        Theory::SchrodingerControl,
        &TwoGateSetup::desk_default(),
        &quick(),
    )
    .unwrap();
    assert_eq!(run.trace.intensity, run.trace.incoherent);
    assert_eq!(coherence_visibility(&run.trace), 0.0);
}

#[test]
fn overlapping_gates_are_warned_about() {
    let setup = TwoGateSetup {
        gate_spacing: 0.5,
        ..TwoGateSetup::desk_default()
    };
    let run = run_two_gate(Theory::Floquet, &setup, &quick()).unwrap();
    assert_eq!(run.warnings.len(), 1);
}

#[test]
fn flight_distance_scan_keeps_the_product_law() {
    let setup = TwoGateSetup::desk_default();
    let rows = scan(
        Theory::Stueckelberg,
        &setup,
        ScanParameter::FlightDistance,
        &[500.0, 1500.0],
        &quick(),
        0.1,
    )
    .unwrap();
    assert_eq!(
        rows.iter().map(|r| r.value).collect::<Vec<_>>(),
        vec![500.0, 1500.0]
    );
    for r in &rows {
        let predicted = 2.0 * std::f64::consts::PI * r.flight_distance / setup.p0;
        assert!(
            (r.epsilon_t_product.unwrap() / predicted - 1.0).abs() < 0.1,
            "{r:?}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn peaks_ignore_intensity_scale(scale in 1e-6..1e6f64, period in 2.0..12.0f64) {
        let (t, i) = planted(period, 0.1);
        let scaled: Vec<f64> = i.iter().map(|v| v * scale).collect();
        let a = find_fringes(&t, &i, 0.1, None).unwrap();
        let b = find_fringes(&t, &scaled, 0.1, None).unwrap();
        prop_assert_eq!(a.peak_times.len(), b.peak_times.len());
        for (x, y) in a.peak_times.iter().zip(&b.peak_times) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
        prop_assert!((a.visibility - b.visibility).abs() < 1e-12);
    }
}

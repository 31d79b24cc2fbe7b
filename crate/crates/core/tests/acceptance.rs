//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex;
use timefringe::estimates::{
    compare_estimates, QUOTED_CRUDE_PRODUCT, QUOTED_PRODUCT, QUOTED_SPACING,
};
use timefringe::fringes::find_fringes;
use timefringe::grid::{Grid1D, Grid2D};
use timefringe::io::{cmd_simulate, parse_scenario_str, Scenario};
use timefringe::packet::{GaussianSpatialPacket, SpacetimePacket, TimeGate};
use timefringe::propagation::*;
use timefringe::{
    coherence_visibility, run_two_gate, scan, Constants, PhysicalSetup, RunOptions, ScanParameter,
    Theory, TwoGateSetup,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn closed_form_headline() -> Outcome {
    let c = compare_estimates(&PhysicalSetup::reference()).map_err(|e| e.to_string())?;
    let r = &c.relativistic;
    let (ep, et) = (
        rel(r.epsilon_t_product, QUOTED_PRODUCT),
        rel(r.equal_spacing_t, QUOTED_SPACING),
    );
    check(
        ep <= 0.10 && et <= 0.10 && (r.cp_ev / 2.1e4 - 1.0).abs() < 0.05,
        format!(
            "cp = {:.4e} eV, eps*T = {:.4e} s^2 (rel. dev. {ep:.3}), T = {:.4e} s (rel. dev. {et:.3}); quoted-cp product {:.4e} s^2",
            r.cp_ev, r.epsilon_t_product, r.equal_spacing_t, c.quoted_cp_product
        ),
    )
}

fn crude_estimate() -> Outcome {
    let c = compare_estimates(&PhysicalSetup::reference()).map_err(|e| e.to_string())?;
    let factor = c.crude.epsilon_t_product / QUOTED_CRUDE_PRODUCT;
    check(
        (1.0 / 3.0..=3.0).contains(&factor),
        format!(
            "derived crude eps*T = {:.4e} s^2 ({factor:.3}x the quoted 9e-28), T = {:.3e} s, crude/relativistic = {:.1}",
            c.crude.epsilon_t_product, c.crude.equal_spacing_t, c.ratio
        ),
    )
}

fn discriminator() -> Outcome {
    let start = Instant::now();
    let setup = TwoGateSetup::desk_default();
    let opts = RunOptions::default();
    let mut vis = Vec::new();
    let mut largest = 0;
    for theory in Theory::ALL {
        let run = run_two_gate(theory, &setup, &opts).map_err(|e| format!("{theory}: {e}"))?;
        if let Some(f) = &run.evolution {
            largest = largest.max(f.grid.n_x).max(f.grid.n_t);
        }
        largest = largest.max(run.trace.times.len());
        vis.push(coherence_visibility(&run.trace));
    }
    let [control, floquet, stueckelberg] = [vis[0], vis[1], vis[2]];
    let separation = setup.gate_spacing / setup.gate_width;
    let secs = start.elapsed().as_secs_f64();
    check(
        stueckelberg >= 0.5 && floquet <= 1e-10 && control == 0.0 && separation >= 6.0 && largest <= 2048 && secs <= 120.0,
        format!(
            "visibility stueckelberg {stueckelberg:.4}, floquet {floquet:.2e} (gates {separation} widths apart), control {control:e}; largest axis {largest}, {secs:.1} s"
        ),
    )
}

fn spacing_law() -> Outcome {
    let start = Instant::now();
    let setup = TwoGateSetup::desk_default();
    let opts = RunOptions {
        evolution: false,
        ..RunOptions::default()
    };
    let (e0, l0) = (setup.gate_spacing, setup.flight_distance);
    let eps = scan(
        Theory::Stueckelberg,
        &setup,
        ScanParameter::GateSpacing,
        &[e0, 2.0 * e0, 4.0 * e0],
        &opts,
        0.1,
    )
    .map_err(|e| e.to_string())?;
    let dist = scan(
        Theory::Stueckelberg,
        &setup,
        ScanParameter::FlightDistance,
        &[l0, 2.0 * l0, 4.0 * l0],
        &opts,
        0.1,
    )
    .map_err(|e| e.to_string())?;
    let k = setup.constants;
    let mut worst: f64 = 0.0;
    for r in eps.iter().chain(&dist) {
        let predicted = 2.0 * PI * k.hbar * r.flight_distance / (setup.p0 * k.c * k.c);
        let product = r
            .epsilon_t_product
            .ok_or_else(|| format!("no fringes at {}: {:?}", r.value, r.note))?;
        worst = worst.max(rel(product, predicted));
    }
    let products: Vec<f64> = eps.iter().filter_map(|r| r.epsilon_t_product).collect();
    let (lo, hi) = products
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), p| (a.min(*p), b.max(*p)));
    let spread = hi / lo - 1.0;
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 0.10 && spread <= 0.05 && secs <= 600.0,
        format!(
            "worst eps*T deviation {worst:.3e} over 6 runs, eps-scan product spread {spread:.3e} ({}), {secs:.1} s",
            products.iter().map(|p| format!("{p:.5e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn integrity() -> Outcome {
    let k = Constants::natural();
    let q = QuadratureOptions::default();
    let one = Complex::new(1.0, 0.0);
    let mut drift: f64 = 0.0;
    for theory in Theory::ALL {
        let run = run_two_gate(
            theory,
            &TwoGateSetup::desk_default(),
            &RunOptions::default(),
        )
        .map_err(|e| e.to_string())?;
        drift = drift.max(run.norm_drift.ok_or("evolution skipped")?);
    }

    let spatial = GaussianSpatialPacket::new(0.0, 1.0, 0.5).map_err(|e| e.to_string())?;
    let packet = SpacetimePacket::new(spatial, vec![TimeGate::gaussian(0.0, 1.0, one)], 1.2)
        .map_err(|e| e.to_string())?;
    let mut engines: f64 = 0.0;
    let g1 = Grid1D::centered(1.0, 12.0, 601).map_err(|e| e.to_string())?;
    let a = propagate_schrodinger(&spatial, 2.0, 1.0, &k, Engine::ClosedForm, &g1, &q)
        .map_err(|e| e.to_string())?;
    let b = propagate_schrodinger(&spatial, 2.0, 1.0, &k, Engine::Quadrature, &g1, &q)
        .map_err(|e| e.to_string())?;
    let diff: Vec<_> = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
    let d = PropagationResult1D {
        values: diff,
        ..a.clone()
    };
    engines = engines.max((d.norm2() / a.norm2()).sqrt());
    for d in [Dynamics::Floquet, Dynamics::Stueckelberg] {
        let grid = evolve_closed_form(&packet, d, 1.5, 1.0, &k)
            .and_then(|f| f.auto_grid(6.0, 8))
            .map_err(|e| e.to_string())?;
        let run = |e| match d {
            Dynamics::Floquet => propagate_floquet(&packet, 1.5, 1.0, &k, e, &grid, &q),
            _ => propagate_stueckelberg(&packet, 1.5, 1.0, &k, e, &grid, &q),
        };
        let (a, b) = (
            run(Engine::ClosedForm).map_err(|e| e.to_string())?,
            run(Engine::Quadrature).map_err(|e| e.to_string())?,
        );
        engines = engines.max(b.field.relative_l2(&a.field).map_err(|e| e.to_string())?);
        drift = drift.max(a.norm_drift).max(b.norm_drift);
    }

    // semigroup: two quadrature steps against one closed-form step
    let mid = Grid1D::centered(0.6, 16.0, 1201).map_err(|e| e.to_string())?;
    let first = propagate_schrodinger(&spatial, 0.8, 1.0, &k, Engine::Quadrature, &mid, &q)
        .map_err(|e| e.to_string())?;
    let out = Grid1D::centered(1.0, 8.0, 201).map_err(|e| e.to_string())?;
    let composed = quadrature_1d(&mid, &first.values, &out.points(), 1.1, 1.0, 1.0);
    let exact = propagate_schrodinger(&spatial, 1.9, 1.0, &k, Engine::ClosedForm, &out, &q)
        .map_err(|e| e.to_string())?;
    let diff: Vec<_> = composed
        .iter()
        .zip(&exact.values)
        .map(|(x, y)| x - y)
        .collect();
    let semigroup = (PropagationResult1D {
        values: diff,
        ..exact.clone()
    }
    .norm2()
        / exact.norm2())
    .sqrt();

    let two = SpacetimePacket::new(
        spatial,
        vec![
            TimeGate::gaussian(-3.0, 0.5, one),
            TimeGate::gaussian(3.0, 0.7, one),
        ],
        1.2,
    )
    .map_err(|e| e.to_string())?;
    let before_grid = two
        .to_field(&k)
        .auto_grid(8.0, 8)
        .map_err(|e| e.to_string())?;
    let wide = evolve_closed_form(&two, Dynamics::Floquet, 2.5, 1.0, &k)
        .and_then(|f| f.auto_grid(6.0, 8))
        .map_err(|e| e.to_string())?;
    let after_grid = Grid2D::new(wide.x_axis(), before_grid.t_axis().translated(2.5))
        .map_err(|e| e.to_string())?;
    let before = two.to_field(&k).sample(before_grid).temporal_marginal();
    let after = propagate_floquet(&two, 2.5, 1.0, &k, Engine::Quadrature, &after_grid, &q)
        .map_err(|e| e.to_string())?
        .field
        .temporal_marginal();
    let peak = before.iter().copied().fold(0.0, f64::max);
    let marginal = after
        .iter()
        .zip(&before)
        .map(|(a, b)| (a - b).abs() / peak)
        .fold(0.0, f64::max);

    let mut slopes: f64 = 0.0;
    for d in [
        Dynamics::Schrodinger,
        Dynamics::Floquet,
        Dynamics::Stueckelberg,
    ] {
        let h = hamilton_diagnostics(&packet, d, &[0.0, 1.0, 2.0, 3.0, 4.0], 1.0, &k)
            .map_err(|e| e.to_string())?;
        slopes = slopes
            .max(rel(h.slope_x, h.predicted_slope_x))
            .max(rel(h.slope_t, h.predicted_slope_t));
    }
    check(
        drift < 1e-6 && engines < 1e-6 && semigroup < 1e-6 && marginal < 1e-9 && slopes < 1e-3,
        format!(
            "norm drift {drift:.2e}, engine L2 gap {engines:.2e}, semigroup {semigroup:.2e}, Floquet marginal {marginal:.2e}, Hamilton slopes {slopes:.2e}"
        ),
    )
}

fn properties() -> Outcome {
    let step = 0.1;
    let times: Vec<f64> = (0..2001).map(|i| -100.0 + step * i as f64).collect();
    let mut period_error: f64 = 0.0;
    let mut rescale: f64 = 0.0;
    for period in [3.0, 5.5, 7.3, 11.9] {
        let intensity: Vec<f64> = times
            .iter()
            .map(|t| (-t * t / 3200.0).exp() * (PI * t / period).cos().powi(2))
            .collect();
        let base = find_fringes(&times, &intensity, 0.1, None).map_err(|e| e.to_string())?;
        period_error = period_error.max((base.spacing_t - period).abs());
        for scale in [1e-9, 1e-3, 7.0, 1e8] {
            let scaled: Vec<f64> = intensity.iter().map(|v| v * scale).collect();
            let r = find_fringes(&times, &scaled, 0.1, None).map_err(|e| e.to_string())?;
            if r.peak_times.len() != base.peak_times.len() {
                return Err(format!("peak count changed under scale {scale}"));
            }
            for (a, b) in r.peak_times.iter().zip(&base.peak_times) {
                rescale = rescale.max((a - b).abs() / b.abs().max(1.0));
            }
        }
    }

    let mut round_trip = true;
    for theory in Theory::ALL {
        let s = Scenario::desk(theory);
        let back = parse_scenario_str(&s.to_json()).map_err(|e| e.to_string())?;
        round_trip &= back == s && back.hash() == s.hash();
    }

    let s = Scenario::desk(Theory::Stueckelberg);
    let mut traces = Vec::new();
    for threads in [1, 4] {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        let report = pool.install(|| cmd_simulate(&s, dir.path()));
        if report.exit_code() != 0 {
            return Err(format!("simulate failed: {:?}", report.error));
        }
        traces.push(std::fs::read(dir.path().join("run_trace.csv")).map_err(|e| e.to_string())?);
    }
    let identical = traces[0] == traces[1];
    check(
        period_error <= step && rescale <= 1e-12 && round_trip && identical,
        format!(
            "planted-period error {period_error:.2e} (step {step}), rescale shift {rescale:.1e}, scenario round trip {round_trip}, CSV identical across 1/4 workers {identical}"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 6] = [
        (
            "closed-form fringe spacing at laboratory parameters",
            closed_form_headline,
        ),
        ("crude nonrelativistic estimate", crude_estimate),
        ("theory discriminator at desk scale", discriminator),
        ("spacing law from simulated scans", spacing_law),
        ("numerical integrity", integrity),
        ("headless property suite", properties),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Command drivers: each writes its data files and always returns a
//! [`RunReport`], recording the error when the run fails.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use super::svg::{render, Plot, Series};
use super::{csv_out, RunError};
use crate::error::Error;
use crate::estimates::{self, compare_estimates, EstimateComparison};
use crate::experiments::{
    coherence_visibility, extract_fringes, scan, ScanParameter, ScanRow, Theory,
};
use crate::fringes::{find_fringes, FringeReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub class: String,
    pub exit_code: i32,
    pub message: String,
}

/// Sampling actually used by a simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionInfo {
    pub trace_samples: usize,
    pub trace_window: (f64, f64),
    pub trace_step: f64,
    /// Predicted fringe spacing over the trace step.
    pub samples_per_fringe: f64,
    /// `[n_x, n_t]` of the (x, t) evolution grid, when one was run.
    pub evolution_grid: Option<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub status: String,
    pub scenario: Option<Scenario>,
    pub scenario_hash: Option<String>,
    pub theory: Option<Theory>,
    pub fringes: Option<FringeReport>,
    pub estimates: Option<EstimateComparison>,
    pub scan: Option<Vec<ScanRow>>,
    pub coherence_visibility: Option<f64>,
    pub norm_drift: Option<f64>,
    pub flight_parameter: Option<f64>,
    pub resolution: Option<ResolutionInfo>,
    pub warnings: Vec<String>,
    /// Outcome remarks that are not failures, such as a control run without fringes.
    pub notes: Vec<String>,
    pub outputs: Vec<PathBuf>,
    pub wall_time_s: f64,
    pub error: Option<ErrorRecord>,
}

impl RunReport {
    fn new(command: &str, scenario: Option<&Scenario>) -> Self {
        RunReport {
            command: command.into(),
            status: "ok".into(),
            scenario: scenario.cloned(),
            scenario_hash: scenario.map(Scenario::hash),
            theory: scenario.map(|s| s.theory),
            fringes: None,
            estimates: None,
            scan: None,
            coherence_visibility: None,
            norm_drift: None,
            flight_parameter: None,
            resolution: None,
            warnings: Vec::new(),
            notes: Vec::new(),
            outputs: Vec::new(),
            wall_time_s: 0.0,
            error: None,
        }
    }

    /// Report for a command that failed before it could start.
    pub fn failure(command: &str, e: &RunError) -> Self {
        let mut r = Self::new(command, None);
        r.fail(e);
        r
    }

    /// [`RunReport::failure`], also written to `<dir>/run_report.json`.
    pub fn failure_in(command: &str, e: &RunError, dir: &Path) -> Self {
        Self::failure(command, e).finish(Instant::now(), dir, "run")
    }

    pub fn exit_code(&self) -> i32 {
        self.error.as_ref().map_or(0, |e| e.exit_code)
    }

    fn fail(&mut self, e: &RunError) {
        self.status = "error".into();
        self.error = Some(ErrorRecord {
            class: e.class().into(),
            exit_code: e.exit_code(),
            message: e.to_string(),
        });
    }

    /// Writes `<prefix>_report.json`; a write failure is recorded in the
    /// report unless an earlier error already is.
    fn finish(mut self, started: Instant, dir: &Path, prefix: &str) -> Self {
        self.wall_time_s = started.elapsed().as_secs_f64();
        let path = dir.join(format!("{prefix}_report.json"));
        let written = std::fs::create_dir_all(dir)
            .map_err(|e| RunError::io(dir, e))
            .and_then(|_| {
                let mut with_self = self.clone();
                with_self.outputs.push(path.clone());
                let text = serde_json::to_string_pretty(&with_self).expect("report serializes");
                std::fs::write(&path, text).map_err(|e| RunError::io(&path, e))
            });
        match written {
            Ok(()) => self.outputs.push(path),
            Err(e) if self.error.is_none() => self.fail(&e),
            Err(_) => {}
        }
        self
    }
}

fn out_file(dir: &Path, prefix: &str, name: &str) -> PathBuf {
    dir.join(format!("{prefix}_{name}"))
}

fn ensure_dir(dir: &Path) -> Result<(), RunError> {
    std::fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), RunError> {
    std::fs::write(path, text).map_err(|e| RunError::io(path, e))
}

/// Both closed-form spacing estimates for the scenario's laboratory setup.
pub fn cmd_estimate(scenario: &Scenario, out_dir: &Path) -> RunReport {
    let started = Instant::now();
    let mut report = RunReport::new("estimate", Some(scenario));
    let prefix = &scenario.output.prefix;
    let result = (|| -> Result<(), RunError> {
        let c = compare_estimates(&scenario.setup)?;
        ensure_dir(out_dir)?;
        let path = out_file(out_dir, prefix, "estimates.csv");
        csv_out::write_estimates(&path, &c)?;
        report.outputs.push(path);
        report.estimates = Some(c);
        Ok(())
    })();
    if let Err(e) = result {
        report.fail(&e);
    }
    report.finish(started, out_dir, prefix)
}

/// Runs the two-gate experiment and analyses the detector trace.
///
/// A control or Floquet run without fringes is a valid outcome and is
/// recorded as a note; a Stueckelberg run without fringes is an error.
pub fn cmd_simulate(scenario: &Scenario, out_dir: &Path) -> RunReport {
    let started = Instant::now();
    let mut report = RunReport::new("simulate", Some(scenario));
    let prefix = scenario.output.prefix.clone();
    let result = simulate_into(scenario, out_dir, &prefix, &mut report);
    if let Err(e) = result {
        report.fail(&e);
    }
    report.finish(started, out_dir, &prefix)
}

fn simulate_into(
    scenario: &Scenario,
    dir: &Path,
    prefix: &str,
    report: &mut RunReport,
) -> Result<(), RunError> {
    let setup = scenario.two_gate_setup()?;
    let run = crate::experiments::run_two_gate(scenario.theory, &setup, &scenario.run_options())?;
    ensure_dir(dir)?;
    let trace = &run.trace;
    let time_scale = scenario.units.time_scale;
    let step = trace.times[1] - trace.times[0];
    report.resolution = Some(ResolutionInfo {
        trace_samples: trace.times.len(),
        trace_window: (
            trace.times[0],
            *trace.times.last().expect("non-empty trace"),
        ),
        trace_step: step,
        samples_per_fringe: trace.predicted_spacing / step,
        evolution_grid: run.evolution.as_ref().map(|f| [f.grid.n_x, f.grid.n_t]),
    });
    report.norm_drift = run.norm_drift;
    report.flight_parameter = Some(run.flight_parameter);
    report.coherence_visibility = Some(coherence_visibility(trace));
    report.warnings = run.warnings.iter().map(ToString::to_string).collect();

    let trace_path = out_file(dir, prefix, "trace.csv");
    csv_out::write_trace(&trace_path, trace, time_scale)?;
    report.outputs.push(trace_path);
    if scenario.output.field_csv {
        if let Some(field) = &run.evolution {
            let path = out_file(dir, prefix, "field.csv");
            csv_out::write_field(&path, field)?;
            report.outputs.push(path);
        }
    }

    let fringes = extract_fringes(trace, scenario.threshold_fraction);
    let peaks: Vec<(f64, f64)> = match &fringes {
        Ok(f) => f
            .peak_times
            .iter()
            .map(|&t| (t, interpolate(&trace.times, &trace.intensity, t)))
            .collect(),
        Err(_) => Vec::new(),
    };
    let plot = Plot {
        title: format!("{} two-gate arrival-time intensity", scenario.theory),
        x_label: "t [internal time]".into(),
        y_label: "intensity at detector".into(),
        series: vec![
            Series {
                label: "coherent".into(),
                points: trace
                    .times
                    .iter()
                    .copied()
                    .zip(trace.intensity.iter().copied())
                    .collect(),
                color: "black",
                dashed: false,
            },
            Series {
                label: "incoherent sum".into(),
                points: trace
                    .times
                    .iter()
                    .copied()
                    .zip(trace.incoherent.iter().copied())
                    .collect(),
                color: "steelblue",
                dashed: true,
            },
        ],
        markers: peaks,
        scenario_hash: scenario.hash(),
    };
    let svg_path = out_file(dir, prefix, "trace.svg");
    write_text(&svg_path, &render(&plot))?;
    report.outputs.push(svg_path);

    match fringes {
        Ok(f) => {
            let path = out_file(dir, prefix, "peaks.csv");
            csv_out::write_peaks(&path, &f.peak_times, time_scale)?;
            report.outputs.push(path);
            report.fringes = Some(f);
            Ok(())
        }
        Err(Error::NoFringes { found }) if scenario.theory != Theory::Stueckelberg => {
            report.notes.push(format!(
                "no fringes: {found} peak(s) in the central window, as expected without a cross term"
            ));
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let i = xs.partition_point(|v| *v < x).clamp(1, xs.len() - 1);
    let f = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    ys[i - 1] + f * (ys[i] - ys[i - 1])
}

/// Repeats the simulation over `values` of `parameter`.
pub fn cmd_scan(
    scenario: &Scenario,
    parameter: ScanParameter,
    values: &[f64],
    out_dir: &Path,
) -> RunReport {
    let started = Instant::now();
    let mut report = RunReport::new("scan", Some(scenario));
    let prefix = scenario.output.prefix.clone();
    let result = (|| -> Result<(), RunError> {
        let setup = scenario.two_gate_setup()?;
        let rows = scan(
            scenario.theory,
            &setup,
            parameter,
            values,
            &scenario.run_options(),
            scenario.threshold_fraction,
        )?;
        ensure_dir(out_dir)?;
        let path = out_file(out_dir, &prefix, "scan.csv");
        csv_out::write_scan(&path, parameter, &rows)?;
        report.outputs.push(path);

        let measured: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| r.spacing_t.map(|s| (r.value, s)))
            .collect();
        let predicted: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| (r.value, r.spacing_t_predicted))
            .collect();
        let plot = Plot {
            title: format!("{} fringe spacing against {parameter}", scenario.theory),
            x_label: format!("{parameter} [internal]"),
            y_label: "fringe spacing T [internal time]".into(),
            series: vec![
                Series {
                    label: "measured".into(),
                    points: measured.clone(),
                    color: "black",
                    dashed: false,
                },
                Series {
                    label: "2 pi hbar L / (p c^2 eps)".into(),
                    points: predicted,
                    color: "steelblue",
                    dashed: true,
                },
            ],
            markers: measured,
            scenario_hash: scenario.hash(),
        };
        let svg_path = out_file(out_dir, &prefix, "scan.svg");
        write_text(&svg_path, &render(&plot))?;
        report.outputs.push(svg_path);
        report.notes = rows
            .iter()
            .filter_map(|r| {
                r.note
                    .as_ref()
                    .map(|n| format!("{parameter} = {}: {n}", r.value))
            })
            .collect();
        report.scan = Some(rows);
        Ok(())
    })();
    if let Err(e) = result {
        report.fail(&e);
    }
    report.finish(started, out_dir, &prefix)
}

/// Re-analyses a trace CSV. The scenario, when given, supplies the
/// threshold and the predicted spacing.
pub fn cmd_fringes(
    trace_path: &Path,
    scenario: Option<&Scenario>,
    threshold_fraction: Option<f64>,
    out_dir: &Path,
) -> RunReport {
    let started = Instant::now();
    let mut report = RunReport::new("fringes", scenario);
    let prefix = scenario.map_or_else(|| "fringes".to_string(), |s| s.output.prefix.clone());
    let result = (|| -> Result<(), RunError> {
        let threshold = threshold_fraction
            .or(scenario.map(|s| s.threshold_fraction))
            .unwrap_or(0.1);
        let predicted = match scenario {
            Some(s) => Some(s.two_gate_setup()?.predicted_spacing()),
            None => None,
        };
        let (times, intensity) = csv_out::read_trace(trace_path)?;
        let f = find_fringes(&times, &intensity, threshold, predicted)?;
        ensure_dir(out_dir)?;
        let path = out_file(out_dir, &prefix, "peaks.csv");
        let time_scale = scenario.map_or(1.0, |s| s.units.time_scale);
        csv_out::write_peaks(&path, &f.peak_times, time_scale)?;
        report.outputs.push(path);
        report.fringes = Some(f);
        Ok(())
    })();
    if let Err(e) = result {
        report.fail(&e);
    }
    report.finish(started, out_dir, &prefix)
}

/// Plain-text table of both estimates next to the quoted values.
pub fn format_estimates(c: &EstimateComparison) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "kinetic energy {:.4} eV, cp {:.4e} eV ({:?} momentum)",
        c.relativistic.kinetic_energy_ev,
        c.relativistic.cp_ev,
        c.relativistic.inputs_echo.momentum_model
    );
    let _ = writeln!(
        s,
        "{:<26} {:>14} {:>14} {:>14} {:>14}",
        "formula", "eps*T [s^2]", "T [s]", "quoted eps*T", "quoted T"
    );
    let row = |s: &mut String, name: &str, p: f64, t: f64, qp: f64, qt: f64| {
        let _ = writeln!(
            s,
            "{name:<26} {p:>14.4e} {t:>14.4e} {qp:>14.2e} {qt:>14.2e}"
        );
    };
    row(
        &mut s,
        "relativistic",
        c.relativistic.epsilon_t_product,
        c.relativistic.equal_spacing_t,
        estimates::QUOTED_PRODUCT,
        estimates::QUOTED_SPACING,
    );
    row(
        &mut s,
        "crude non-relativistic",
        c.crude.epsilon_t_product,
        c.crude.equal_spacing_t,
        estimates::QUOTED_CRUDE_PRODUCT,
        estimates::QUOTED_CRUDE_SPACING,
    );
    let _ = writeln!(s, "ratio crude / relativistic: {:.2}", c.ratio);
    let _ = writeln!(
        s,
        "relativistic with quoted cp = {} eV: eps*T = {:.4e} s^2, T = {:.4e} s",
        estimates::QUOTED_CP_EV,
        c.quoted_cp_product,
        c.quoted_cp_spacing
    );
    s
}

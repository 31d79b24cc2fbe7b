use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use timefringe::io::{self, RunError, RunReport, Scenario};
use timefringe::{Engine, PhysicalSetup, ScanParameter, Theory};

/// Two-gate interference-in-time simulator and estimator.
#[derive(Parser)]
#[command(name = "timefringe", version)]
struct Cli {
    /// Worker threads for the parallel loops (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print the full JSON report instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Output directory (overrides the scenario's output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    engine: Option<Engine>,
    #[arg(long)]
    theory: Option<Theory>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form fringe-spacing estimates for the laboratory setup.
    Estimate(Common),
    /// Run the two-gate experiment and analyse the detector trace.
    Simulate(Common),
    /// Repeat the simulation over a list of gate spacings or flight distances.
    Scan {
        #[command(flatten)]
        common: Common,
        /// gate_spacing (alias epsilon) or flight_distance (alias L).
        #[arg(long)]
        param: Option<ScanParameter>,
        /// Comma-separated values in internal units.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Re-analyse an existing trace CSV.
    Fringes {
        #[command(flatten)]
        common: Common,
        /// Trace CSV written by `simulate`.
        #[arg(long)]
        trace: PathBuf,
        /// Peak threshold as a fraction of the maximum intensity.
        #[arg(long)]
        threshold: Option<f64>,
    },
}

fn load(common: &Common, required: bool) -> Result<Option<Scenario>, RunError> {
    let mut scenario = match &common.scenario {
        Some(path) => io::parse_scenario(path)?,
        None if required => {
            return Err(RunError::config(
                "--scenario",
                "a scenario file is required",
            ))
        }
        None => return Ok(None),
    };
    if let Some(e) = common.engine {
        scenario.engine = e;
    }
    if let Some(t) = common.theory {
        scenario.theory = t;
    }
    Ok(Some(scenario))
}

fn out_dir(common: &Common, scenario: Option<&Scenario>) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| scenario.map(|s| s.output.dir.clone()))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn failed(command: &str, common: &Common, e: &RunError) -> RunReport {
    RunReport::failure_in(command, e, &out_dir(common, None))
}

fn run(cli: &Cli) -> RunReport {
    match &cli.command {
        Command::Estimate(common) => match load(common, false) {
            Ok(s) => {
                let mut scenario = s.unwrap_or_else(|| {
                    Scenario::new(Theory::Stueckelberg, PhysicalSetup::reference())
                });
                if let Some(t) = common.theory {
                    scenario.theory = t;
                }
                io::cmd_estimate(&scenario, &out_dir(common, Some(&scenario)))
            }
            Err(e) => failed("estimate", common, &e),
        },
        Command::Simulate(common) => match load(common, true) {
            Ok(Some(s)) => io::cmd_simulate(&s, &out_dir(common, Some(&s))),
            Ok(None) => unreachable!("scenario required"),
            Err(e) => failed("simulate", common, &e),
        },
        Command::Scan {
            common,
            param,
            values,
        } => {
            let scenario = match load(common, true) {
                Ok(Some(s)) => s,
                Ok(None) => unreachable!("scenario required"),
                Err(e) => return failed("scan", common, &e),
            };
            let (parameter, values) = match (param, scenario.scan.as_ref()) {
                (Some(p), _) if !values.is_empty() => (*p, values.clone()),
                (None, Some(spec)) if values.is_empty() => (spec.parameter, spec.values.clone()),
                (Some(_), _) => {
                    return failed(
                        "scan",
                        common,
                        &RunError::config("--values", "give at least two values"),
                    )
                }
                _ => {
                    return failed(
                        "scan",
                        common,
                        &RunError::config(
                            "--param",
                            "give --param and --values, or a scan section in the scenario",
                        ),
                    )
                }
            };
            if values.len() < 2 || values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return failed(
                    "scan",
                    common,
                    &RunError::config("--values", "need at least two positive values"),
                );
            }
            io::cmd_scan(
                &scenario,
                parameter,
                &values,
                &out_dir(common, Some(&scenario)),
            )
        }
        Command::Fringes {
            common,
            trace,
            threshold,
        } => match load(common, false) {
            Ok(s) => io::cmd_fringes(trace, s.as_ref(), *threshold, &out_dir(common, s.as_ref())),
            Err(e) => failed("fringes", common, &e),
        },
    }
}

fn summarize(report: &RunReport) {
    if let Some(c) = &report.estimates {
        print!("{}", io::format_estimates(c));
    }
    if let Some(v) = report.coherence_visibility {
        println!("coherence visibility: {v:.6e}");
    }
    if let Some(d) = report.norm_drift {
        println!("norm drift: {d:.3e}");
    }
    if let Some(f) = &report.fringes {
        println!(
            "fringes: {} peaks, spacing {:.6e}, visibility {:.4}",
            f.peak_times.len(),
            f.spacing_t,
            f.visibility
        );
        if let (Some(p), Some(e)) = (f.spacing_t_predicted, f.relative_error) {
            println!("predicted spacing {p:.6e} (relative error {e:.3e})");
        }
    }
    if let Some(rows) = &report.scan {
        println!(
            "{:>14} {:>12} {:>14} {:>14} {:>10}",
            "value", "coh. vis.", "spacing T", "eps*T", "rel. err"
        );
        let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.6e}"));
        for r in rows {
            println!(
                "{:>14.6e} {:>12} {:>14} {:>14} {:>10}",
                r.value,
                r.coherence_visibility
                    .map_or_else(|| "-".into(), |v| format!("{v:.4}")),
                cell(r.spacing_t),
                cell(r.epsilon_t_product),
                r.relative_error
                    .map_or_else(|| "-".into(), |v| format!("{v:.2e}")),
            );
        }
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
    for n in &report.notes {
        println!("note: {n}");
    }
    for p in &report.outputs {
        println!("wrote {}", Path::new(p).display());
    }
    if let Some(e) = &report.error {
        eprintln!("error ({}): {}", e.class, e.message);
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("could not set thread count: {e}");
        }
    }
    let report = run(&cli);
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
        if let Some(e) = &report.error {
            eprintln!("error ({}): {}", e.class, e.message);
        }
    } else {
        summarize(&report);
    }
    log::debug!("finished in {:.3} s", report.wall_time_s);
    ExitCode::from(report.exit_code() as u8)
}

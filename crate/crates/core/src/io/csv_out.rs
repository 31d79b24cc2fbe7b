//! CSV tables. Every file starts with a header naming columns and units;
//! floats use the shortest representation that round-trips.

use std::path::Path;

use super::RunError;
use crate::estimates::EstimateComparison;
use crate::experiments::{IntensityTrace, ScanParameter, ScanRow};
use crate::field::SampledField;

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn write_rows(
    path: &Path,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<(), RunError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| RunError::io(path, e))?;
    w.write_record(header).map_err(|e| RunError::io(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| RunError::io(path, e))?;
    }
    w.flush().map_err(|e| RunError::io(path, e))
}

pub const TRACE_TIME: &str = "t [internal time]";
pub const TRACE_INTENSITY: &str = "intensity [internal]";

/// Detector trace; `time_scale` converts internal time to seconds.
pub fn write_trace(path: &Path, trace: &IntensityTrace, time_scale: f64) -> Result<(), RunError> {
    write_rows(
        path,
        &[
            TRACE_TIME,
            "t [s]",
            TRACE_INTENSITY,
            "incoherent [internal]",
        ],
        trace
            .times
            .iter()
            .zip(&trace.intensity)
            .zip(&trace.incoherent)
            .map(|((t, i), n)| vec![num(*t), num(t * time_scale), num(*i), num(*n)]),
    )
}

pub fn write_peaks(path: &Path, peaks: &[f64], time_scale: f64) -> Result<(), RunError> {
    write_rows(
        path,
        &["peak [internal time]", "peak [s]"],
        peaks.iter().map(|t| vec![num(*t), num(t * time_scale)]),
    )
}

/// Full (x, t) field, x-major.
pub fn write_field(path: &Path, field: &SampledField<f64>) -> Result<(), RunError> {
    let xs = field.grid.x_axis().points();
    let ts = field.grid.t_axis().points();
    let nt = field.grid.n_t;
    write_rows(
        path,
        &[
            "x [internal length]",
            "t [internal time]",
            "re_psi [internal]",
            "im_psi [internal]",
            "abs2_psi [internal]",
        ],
        field.values.iter().enumerate().map(|(i, v)| {
            vec![
                num(xs[i / nt]),
                num(ts[i % nt]),
                num(v.re),
                num(v.im),
                num(v.norm_sqr()),
            ]
        }),
    )
}

pub fn write_scan(path: &Path, parameter: ScanParameter, rows: &[ScanRow]) -> Result<(), RunError> {
    let value_col = match parameter {
        ScanParameter::GateSpacing => "gate_spacing [internal time]",
        ScanParameter::FlightDistance => "flight_distance [internal length]",
    };
    write_rows(
        path,
        &[
            value_col,
            "coherence_visibility [1]",
            "fringe_visibility [1]",
            "spacing_t [internal time]",
            "spacing_t_predicted [internal time]",
            "epsilon_t_product [internal time^2]",
            "relative_error [1]",
            "peaks [count]",
            "norm_drift [1]",
            "note",
        ],
        rows.iter().map(|r| {
            vec![
                num(r.value),
                opt(r.coherence_visibility),
                opt(r.fringe_visibility),
                opt(r.spacing_t),
                num(r.spacing_t_predicted),
                opt(r.epsilon_t_product),
                opt(r.relative_error),
                r.peaks.to_string(),
                opt(r.norm_drift),
                r.note.clone().unwrap_or_default(),
            ]
        }),
    )
}

pub fn write_estimates(path: &Path, c: &EstimateComparison) -> Result<(), RunError> {
    use crate::estimates::*;
    let rows = [
        vec![
            "relativistic".to_string(),
            num(c.relativistic.epsilon_t_product),
            num(c.relativistic.equal_spacing_t),
            num(QUOTED_PRODUCT),
            num(QUOTED_SPACING),
            num(c.relativistic.cp_ev),
        ],
        vec![
            "relativistic_quoted_cp".to_string(),
            num(c.quoted_cp_product),
            num(c.quoted_cp_spacing),
            num(QUOTED_PRODUCT),
            num(QUOTED_SPACING),
            num(QUOTED_CP_EV),
        ],
        vec![
            "crude_nonrelativistic".to_string(),
            num(c.crude.epsilon_t_product),
            num(c.crude.equal_spacing_t),
            num(QUOTED_CRUDE_PRODUCT),
            num(QUOTED_CRUDE_SPACING),
            num(c.crude.cp_ev),
        ],
    ];
    write_rows(
        path,
        &[
            "formula",
            "epsilon_t_product [s^2]",
            "equal_spacing_t [s]",
            "quoted_product [s^2]",
            "quoted_spacing [s]",
            "cp [eV]",
        ],
        rows.into_iter(),
    )
}

/// Reads the time and intensity columns of a trace written by [`write_trace`].
pub fn read_trace(path: &Path) -> Result<(Vec<f64>, Vec<f64>), RunError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| RunError::io(path, e))?;
    let headers = r.headers().map_err(|e| RunError::io(path, e))?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            RunError::config(name, format!("column missing from {}", path.display()))
        })
    };
    let (ti, ii) = (col(TRACE_TIME)?, col(TRACE_INTENSITY)?);
    let mut times = Vec::new();
    let mut intensity = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| RunError::io(path, e))?;
        let parse = |i: usize| {
            rec.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| RunError::config(format!("row {}", line + 2), "unparseable number"))
        };
        times.push(parse(ti)?);
        intensity.push(parse(ii)?);
    }
    Ok((times, intensity))
}

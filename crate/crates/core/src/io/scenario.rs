//! JSON scenario files.
//!
//! ```json
//! {
//!   "theory": "stueckelberg",
//!   "setup": { "wavelength": 850, "photon_count": 300, "flight_distance": 0.01,
//!              "gate_spacing": 2.6e-15, "gate_width": 1e-16 }
//! }
//! ```
//!
//! `theory` and `setup` (laboratory units: nm, m, s) are required. Optional
//! sections: `engine`, `units`, `packet` (internal units; derived from
//! `setup` when absent), `grid`, `quadrature`, `threshold_fraction`,
//! `output` and `scan`. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::RunError;
use crate::experiments::{RunOptions, ScanParameter, Theory, TwoGateSetup};
use crate::propagation::{Engine, QuadratureOptions};
use crate::units::{PhysicalConstants, PhysicalSetup, UnitScales};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub theory: Theory,
    #[serde(default)]
    pub engine: Engine,
    pub setup: PhysicalSetup,
    #[serde(default)]
    pub units: UnitScales,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packet: Option<TwoGateSetup>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub quadrature: QuadratureOptions,
    #[serde(default = "default_threshold")]
    pub threshold_fraction: f64,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
}

fn default_threshold() -> f64 {
    0.1
}

/// Sampling of the detector trace and of the optional (x, t) evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub n_t: usize,
    pub window_reach: f64,
    pub evolution: bool,
    pub evolution_samples: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        let o = RunOptions::default();
        GridSpec {
            n_t: o.n_t,
            window_reach: o.window_reach,
            evolution: o.evolution,
            evolution_samples: o.evolution_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub prefix: String,
    /// Also write the full (x, t) field as CSV.
    pub field_csv: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: PathBuf::from("out"),
            prefix: "run".into(),
            field_csv: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub parameter: ScanParameter,
    pub values: Vec<f64>,
}

const TOP: &[&str] = &[
    "theory",
    "engine",
    "setup",
    "units",
    "packet",
    "grid",
    "quadrature",
    "threshold_fraction",
    "output",
    "scan",
];
const SETUP: &[&str] = &[
    "wavelength",
    "photon_count",
    "flight_distance",
    "gate_spacing",
    "gate_width",
    "momentum_model",
];
const UNITS: &[&str] = &["length_scale", "time_scale", "mass_scale"];
const PACKET: &[&str] = &[
    "center_x",
    "sigma_x",
    "p0",
    "mass",
    "energy",
    "gate_width",
    "gate_spacing",
    "gate_profile",
    "center_t",
    "flight_distance",
    "flight_parameter",
    "constants",
];
const CONSTANTS: &[&str] = &["hbar", "c"];
const GRID: &[&str] = &["n_t", "window_reach", "evolution", "evolution_samples"];
const QUADRATURE: &[&str] = &["samples_per_period", "reach", "max_points"];
const OUTPUT: &[&str] = &["dir", "prefix", "field_csv"];
const SCAN: &[&str] = &["parameter", "values"];

fn nearest(key: &str, known: &[&str]) -> Option<String> {
    known
        .iter()
        .map(|k| (strsim::levenshtein(key, k), *k))
        .min()
        .filter(|(d, k)| *d <= 2.max(k.len() / 3))
        .map(|(_, k)| k.to_string())
}

fn check_keys(value: &Value, path: &str, known: &[&str]) -> Result<(), RunError> {
    let Some(map) = value.as_object() else {
        return Ok(());
    };
    for key in map.keys() {
        if !known.contains(&key.as_str()) {
            let field = if path.is_empty() {
                key.clone()
            } else {
                format!("{path}.{key}")
            };
            return Err(RunError::Config {
                field,
                message: "unknown key".into(),
                suggestion: nearest(key, known),
            });
        }
    }
    Ok(())
}

fn check_all_keys(root: &Value) -> Result<(), RunError> {
    if !root.is_object() {
        return Err(RunError::config(
            "(document)",
            "scenario must be a JSON object",
        ));
    }
    check_keys(root, "", TOP)?;
    let sections: [(&str, &[&str]); 7] = [
        ("setup", SETUP),
        ("units", UNITS),
        ("packet", PACKET),
        ("grid", GRID),
        ("quadrature", QUADRATURE),
        ("output", OUTPUT),
        ("scan", SCAN),
    ];
    for (name, keys) in sections {
        if let Some(v) = root.get(name) {
            check_keys(v, name, keys)?;
        }
    }
    if let Some(c) = root.get("packet").and_then(|p| p.get("constants")) {
        check_keys(c, "packet.constants", CONSTANTS)?;
    }
    Ok(())
}

/// Parses and validates scenario text.
pub fn parse_scenario_str(text: &str) -> Result<Scenario, RunError> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| RunError::config("(document)", format!("invalid JSON: {e}")))?;
    check_all_keys(&root)?;
    let scenario: Scenario = serde_path_to_error::deserialize(root).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner().to_string();
        let field = match inner.strip_prefix("missing field `") {
            Some(rest) => {
                let name = rest.split('`').next().unwrap_or_default();
                if path == "." {
                    name.to_string()
                } else {
                    format!("{path}.{name}")
                }
            }
            None => path,
        };
        RunError::config(field, inner)
    })?;
    scenario.validate()?;
    Ok(scenario)
}

/// Reads, parses and validates a scenario file.
pub fn parse_scenario(path: &Path) -> Result<Scenario, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
    parse_scenario_str(&text)
}

impl Scenario {
    /// Minimal scenario: the laboratory reference setup and defaults elsewhere.
    pub fn new(theory: Theory, setup: PhysicalSetup) -> Self {
        Scenario {
            theory,
            engine: Engine::default(),
            setup,
            units: UnitScales::default(),
            packet: None,
            grid: GridSpec::default(),
            quadrature: QuadratureOptions::default(),
            threshold_fraction: default_threshold(),
            output: OutputSpec::default(),
            scan: None,
        }
    }

    /// The desk-scale two-gate packet in natural units.
    pub fn desk(theory: Theory) -> Self {
        Scenario {
            packet: Some(TwoGateSetup::desk_default()),
            ..Self::new(theory, PhysicalSetup::reference())
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if let Some((field, msg)) = self.setup.invalid_field() {
            return Err(RunError::config(format!("setup.{field}"), msg));
        }
        self.units
            .validate()
            .map_err(|e| RunError::config("units", e.to_string()))?;
        if let Some(p) = &self.packet {
            if let Some((field, msg)) = p.invalid_field() {
                return Err(RunError::config(format!("packet.{field}"), msg));
            }
        }
        if self.grid.n_t < 3 {
            return Err(RunError::config("grid.n_t", "must be >= 3"));
        }
        if !(self.grid.window_reach > 0.0 && self.grid.window_reach.is_finite()) {
            return Err(RunError::config("grid.window_reach", "must be > 0"));
        }
        if self.grid.evolution_samples < 2 {
            return Err(RunError::config("grid.evolution_samples", "must be >= 2"));
        }
        if self.quadrature.samples_per_period < crate::propagation::MIN_SAMPLES_PER_PERIOD {
            return Err(RunError::config(
                "quadrature.samples_per_period",
                format!("must be >= {}", crate::propagation::MIN_SAMPLES_PER_PERIOD),
            ));
        }
        if !(self.quadrature.reach > 0.0 && self.quadrature.reach.is_finite()) {
            return Err(RunError::config("quadrature.reach", "must be > 0"));
        }
        if self.quadrature.max_points < 33 {
            return Err(RunError::config("quadrature.max_points", "must be >= 33"));
        }
        if !(self.threshold_fraction > 0.0 && self.threshold_fraction < 1.0) {
            return Err(RunError::config("threshold_fraction", "must lie in (0, 1)"));
        }
        if self.output.prefix.is_empty() || self.output.prefix.contains(['/', '\\']) {
            return Err(RunError::config(
                "output.prefix",
                "must be a non-empty file name prefix",
            ));
        }
        if let Some(scan) = &self.scan {
            if scan.values.len() < 2 {
                return Err(RunError::config("scan.values", "need at least two values"));
            }
            if scan.values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(RunError::config("scan.values", "values must be > 0"));
            }
        }
        Ok(())
    }

    /// The internal-unit experiment: `packet` when given, else derived from `setup`.
    pub fn two_gate_setup(&self) -> crate::error::Result<TwoGateSetup> {
        match &self.packet {
            Some(p) => Ok(*p),
            None => TwoGateSetup::from_physical(
                &self.setup,
                &self.units,
                &PhysicalConstants::CODATA_2018,
            ),
        }
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            engine: self.engine,
            n_t: self.grid.n_t,
            window_reach: self.grid.window_reach,
            quadrature: self.quadrature,
            evolution: self.grid.evolution,
            evolution_samples: self.grid.evolution_samples,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// SHA-256 of the compact JSON serialization.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("scenario serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "theory": "stueckelberg",
        "setup": {"wavelength": 850, "photon_count": 300, "flight_distance": 0.01,
                  "gate_spacing": 2.6e-15, "gate_width": 1e-16}
    }"#;

    #[test]
    fn minimal_scenario_gets_defaults() {
        let s = parse_scenario_str(MINIMAL).unwrap();
        assert_eq!(
            s,
            Scenario::new(Theory::Stueckelberg, PhysicalSetup::reference())
        );
        assert_eq!(s.engine, Engine::ClosedForm);
        assert_eq!(s.threshold_fraction, 0.1);
    }

    #[test]
    fn negative_gate_width_names_the_field() {
        let text = MINIMAL.replace("\"gate_width\": 1e-16", "\"gate_width\": -1e-16");
        match parse_scenario_str(&text) {
            Err(RunError::Config { field, .. }) => {
                assert!(field.ends_with("gate_width"), "{field}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_suggests_nearest() {
        let text = MINIMAL.replace("\"gate_width\"", "\"gatewidth\"");
        match parse_scenario_str(&text) {
            Err(RunError::Config {
                field, suggestion, ..
            }) => {
                assert_eq!(field, "setup.gatewidth");
                assert_eq!(suggestion.as_deref(), Some("gate_width"));
            }
            other => panic!("{other:?}"),
        }
        let err =
            parse_scenario_str(r#"{"theory": "floquet", "setup": {}, "bogus_section_name": 1}"#)
                .unwrap_err();
        assert!(matches!(
            err,
            RunError::Config {
                suggestion: None,
                ..
            }
        ));
    }

    #[test]
    fn missing_and_mistyped_fields() {
        let err = parse_scenario_str(r#"{"theory": "floquet"}"#).unwrap_err();
        assert!(
            matches!(&err, RunError::Config { field, .. } if field == "setup"),
            "{err}"
        );
        let text = MINIMAL.replace("850", "\"red\"");
        let err = parse_scenario_str(&text).unwrap_err();
        assert!(
            matches!(&err, RunError::Config { field, .. } if field == "setup.wavelength"),
            "{err}"
        );
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn hash_tracks_content() {
        let a = Scenario::desk(Theory::Stueckelberg);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.threshold_fraction = 0.2;
        assert_ne!(a.hash(), b.hash());
    }
}

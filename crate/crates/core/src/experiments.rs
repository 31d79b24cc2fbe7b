//! The two-gate experiment under each evolution law, the incoherent
//! Schrödinger control, and parameter scans.
//!
//! All quantities here are internal units. [`TwoGateSetup::from_physical`]
//! maps a laboratory setup onto them.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::Constants;
use crate::envelope::{ComplexGaussian, Envelope};
use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::fringes::{find_fringes, FringeReport};
use crate::grid::Grid1D;
use crate::packet::{GateProfile, GaussianSpatialPacket, SpacetimePacket, TimeGate};
use crate::propagation::{
    evolve_closed_form, propagate_floquet, propagate_schrodinger, propagate_stueckelberg,
    quadrature_1d, source_grid_for, source_grid_for_all, Dynamics, Engine, QuadratureOptions,
};
use crate::units::{PhysicalConstants, PhysicalSetup, UnitScales};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theory {
    /// Each gate's packet evolves on its own; intensities add.
    SchrodingerControl,
    Floquet,
    Stueckelberg,
}

impl Theory {
    pub const ALL: [Theory; 3] = [
        Theory::SchrodingerControl,
        Theory::Floquet,
        Theory::Stueckelberg,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Theory::SchrodingerControl => "schrodinger_control",
            Theory::Floquet => "floquet",
            Theory::Stueckelberg => "stueckelberg",
        }
    }
}

impl std::fmt::Display for Theory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Theory {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Theory::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| {
                Error::domain(format!(
                    "unknown theory {s:?}; expected schrodinger_control, floquet or stueckelberg"
                ))
            })
    }
}

/// Two gates centred on `center_t`, `gate_spacing` apart, each of weight
/// `1/sqrt 2`, feeding a Gaussian spatial packet; the detector sits at
/// `center_x + flight_distance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoGateSetup {
    #[serde(default)]
    pub center_x: f64,
    /// Amplitude standard deviation of the spatial packet.
    pub sigma_x: f64,
    pub p0: f64,
    #[serde(default = "one")]
    pub mass: f64,
    /// Carrier energy; `M c^2 + p0^2 / 2M` when omitted.
    #[serde(default)]
    pub energy: Option<f64>,
    /// Amplitude standard deviation (Gaussian) or full width (rectangular).
    pub gate_width: f64,
    pub gate_spacing: f64,
    #[serde(default)]
    pub gate_profile: GateProfile,
    #[serde(default)]
    pub center_t: f64,
    pub flight_distance: f64,
    /// Evolution parameter at readout; `M L / p0` when omitted.
    #[serde(default)]
    pub flight_parameter: Option<f64>,
    #[serde(default)]
    pub constants: Constants<f64>,
}

fn one() -> f64 {
    1.0
}

impl Default for TwoGateSetup {
    fn default() -> Self {
        Self::desk_default()
    }
}

impl TwoGateSetup {
    /// hbar = M = c = 1, v = 0.2 c, gates 0.2 wide and 4 apart, L = 1000.
    pub fn desk_default() -> Self {
        TwoGateSetup {
            center_x: 0.0,
            sigma_x: 50.0,
            p0: 0.2,
            mass: 1.0,
            energy: None,
            gate_width: 0.2,
            gate_spacing: 4.0,
            gate_profile: GateProfile::Gaussian,
            center_t: 0.0,
            flight_distance: 1000.0,
            flight_parameter: None,
            constants: Constants::natural(),
        }
    }

    /// Internal-unit setup for a laboratory configuration. The spatial packet
    /// gets `sigma_x = 20 hbar / p0`, a few de Broglie wavelengths.
    pub fn from_physical(
        setup: &PhysicalSetup,
        scales: &UnitScales,
        constants: &PhysicalConstants,
    ) -> Result<Self> {
        setup.validate()?;
        scales.validate()?;
        let (hbar, c, mass) = scales.internal_constants(constants, constants.electron_mass);
        let cp_ev = setup.cp(constants)?;
        let p0 = cp_ev * constants.ev_to_joule / constants.c / scales.momentum_scale();
        let kinetic =
            setup.kinetic_energy(constants)? * constants.ev_to_joule / scales.energy_scale();
        Ok(TwoGateSetup {
            center_x: 0.0,
            sigma_x: 20.0 * hbar / p0,
            p0,
            mass,
            energy: Some(mass * c * c + kinetic),
            gate_width: setup.gate_width / scales.time_scale,
            gate_spacing: setup.gate_spacing / scales.time_scale,
            gate_profile: GateProfile::Gaussian,
            center_t: 0.0,
            flight_distance: setup.flight_distance / scales.length_scale,
            flight_parameter: None,
            constants: Constants { hbar, c },
        })
    }

    /// Name and complaint for the first field violating its invariant.
    pub fn invalid_field(&self) -> Option<(&'static str, String)> {
        let checks = [
            ("sigma_x", Some(self.sigma_x)),
            ("p0", Some(self.p0)),
            ("mass", Some(self.mass)),
            ("gate_width", Some(self.gate_width)),
            ("gate_spacing", Some(self.gate_spacing)),
            ("flight_distance", Some(self.flight_distance)),
            ("hbar", Some(self.constants.hbar)),
            ("c", Some(self.constants.c)),
            ("energy", self.energy),
            ("flight_parameter", self.flight_parameter),
        ];
        for (name, v) in checks {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Some((name, format!("must be > 0, got {v}")));
                }
            }
        }
        if !self.center_x.is_finite() {
            return Some(("center_x", "must be finite".into()));
        }
        if !self.center_t.is_finite() {
            return Some(("center_t", "must be finite".into()));
        }
        None
    }

    pub fn validate(&self) -> Result<()> {
        match self.invalid_field() {
            Some((name, msg)) => Err(Error::domain(format!("{name} {msg}"))),
            None => Ok(()),
        }
    }

    pub fn mean_energy(&self) -> f64 {
        let c2 = self.constants.c * self.constants.c;
        self.energy
            .unwrap_or(self.mass * c2 + self.p0 * self.p0 / (2.0 * self.mass))
    }

    /// `s* = M L / p0` unless overridden.
    pub fn flight_parameter(&self) -> f64 {
        self.flight_parameter
            .unwrap_or(self.mass * self.flight_distance / self.p0)
    }

    pub fn detector_x(&self) -> f64 {
        self.center_x + self.flight_distance
    }

    pub fn gate_times(&self) -> [f64; 2] {
        let h = 0.5 * self.gate_spacing;
        [self.center_t - h, self.center_t + h]
    }

    /// Fringe spacing `T = 2 pi hbar L / (p0 c^2 eps)`.
    pub fn predicted_spacing(&self) -> f64 {
        let c2 = self.constants.c * self.constants.c;
        std::f64::consts::TAU * self.constants.hbar * self.flight_distance
            / (self.p0 * c2 * self.gate_spacing)
    }

    /// Exact cross-term period of two Gaussian gates under Stueckelberg
    /// evolution to the readout parameter:
    /// `2 pi (dt^4 + tau^2) / (eps |tau|)`, `tau = hbar s / (M c^2)`.
    pub fn two_gate_period(&self) -> f64 {
        let c2 = self.constants.c * self.constants.c;
        let tau = self.constants.hbar * self.flight_parameter() / (self.mass * c2);
        let d4 = self.gate_width.powi(4);
        std::f64::consts::TAU * (d4 + tau * tau) / (self.gate_spacing * tau.abs())
    }

    pub fn packet(&self) -> Result<SpacetimePacket<f64>> {
        self.validate()?;
        let w = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let gates = self
            .gate_times()
            .iter()
            .map(|&t| TimeGate {
                center_t: t,
                width_delta_t: self.gate_width,
                profile: self.gate_profile,
                amplitude: w,
            })
            .collect();
        SpacetimePacket::new(
            GaussianSpatialPacket::new(self.center_x, self.sigma_x, self.p0)?,
            gates,
            self.mean_energy(),
        )
    }

    /// Overlap check: a Gaussian gate spans about six widths, a box its width.
    pub fn overlap_warning(&self) -> Option<Warning> {
        let extent = match self.gate_profile {
            GateProfile::Gaussian => 6.0 * self.gate_width,
            GateProfile::Rectangular => self.gate_width,
        };
        (self.gate_spacing < extent).then_some(Warning::Overlap {
            gate_width: self.gate_width,
            gate_spacing: self.gate_spacing,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// Gates wider than their spacing; Floquet interference is expected.
    Overlap { gate_width: f64, gate_spacing: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::Overlap {
                gate_width,
                gate_spacing,
            } => write!(
                f,
                "gates overlap: width {gate_width} against spacing {gate_spacing}"
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub engine: Engine,
    /// Samples on the detector time axis.
    pub n_t: usize,
    /// Half-width of the time window in amplitude standard deviations of
    /// the arriving gates.
    pub window_reach: f64,
    pub quadrature: QuadratureOptions,
    /// Also evolve the full (x, t) field on an automatic grid; this is what
    /// `norm_drift` is measured on.
    pub evolution: bool,
    /// Grid points per intensity standard deviation for the evolution grid.
    pub evolution_samples: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            engine: Engine::ClosedForm,
            n_t: 2001,
            window_reach: 5.0,
            quadrature: QuadratureOptions::default(),
            evolution: true,
            evolution_samples: 8,
        }
    }
}

/// Intensity against arrival time at the detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityTrace {
    pub times: Vec<f64>,
    pub intensity: Vec<f64>,
    /// Sum of the single-gate intensities (no cross term).
    pub incoherent: Vec<f64>,
    pub detector_x: f64,
    pub theory: Theory,
    pub predicted_spacing: f64,
}

impl IntensityTrace {
    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.intensity.len() || self.times.len() != self.incoherent.len() {
            return Err(Error::domain("trace columns differ in length"));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("trace times must be strictly increasing"));
        }
        if self
            .intensity
            .iter()
            .chain(&self.incoherent)
            .any(|v| !(*v >= 0.0))
        {
            return Err(Error::domain("trace intensities must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoGateRun {
    pub trace: IntensityTrace,
    /// Relative norm change of the (x, t) evolution, when it was run.
    pub norm_drift: Option<f64>,
    pub evolution: Option<SampledField<f64>>,
    pub warnings: Vec<Warning>,
    pub flight_parameter: f64,
}

/// Cross-term strength `max |I - I_incoherent| / max I_incoherent`: zero for
/// a mixture, near one for two equal coherent paths.
pub fn coherence_visibility(trace: &IntensityTrace) -> f64 {
    let peak = trace.incoherent.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return 0.0;
    }
    trace
        .intensity
        .iter()
        .zip(&trace.incoherent)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / peak
}

pub fn extract_fringes(trace: &IntensityTrace, threshold_fraction: f64) -> Result<FringeReport> {
    find_fringes(
        &trace.times,
        &trace.intensity,
        threshold_fraction,
        Some(trace.predicted_spacing),
    )
}

fn union(ranges: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    ranges.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (l, h)| {
        (a.min(l), b.max(h))
    })
}

fn time_axis(lo: f64, hi: f64, n: usize) -> Result<Grid1D<f64>> {
    let pad = 0.02 * (hi - lo);
    Grid1D::new(lo - pad, hi + pad, n.max(3))
}

/// Arriving gate envelopes at parameter `s`, used only to place the window.
/// Rectangular gates are stood in for by Gaussians of half their width.
fn arriving_gates(
    packet: &SpacetimePacket<f64>,
    theory: Theory,
    s: f64,
    consts: &Constants<f64>,
    mass: f64,
) -> Vec<ComplexGaussian<f64>> {
    let field = packet.to_field(consts);
    field
        .temporal
        .iter()
        .map(|e| {
            let g = match e {
                Envelope::Gaussian(g) => *g,
                Envelope::Rect(r) => {
                    ComplexGaussian::normalized(r.center, 0.5 * r.width, r.k, r.amp)
                }
            };
            match theory {
                Theory::Stueckelberg => {
                    g.propagate(-consts.hbar * s / (mass * consts.c * consts.c))
                }
                _ => g.shifted(s),
            }
        })
        .collect()
}

/// Runs the two-gate experiment and reads the intensity at the detector.
pub fn run_two_gate(theory: Theory, setup: &TwoGateSetup, opts: &RunOptions) -> Result<TwoGateRun> {
    let packet = setup.packet()?;
    let s = setup.flight_parameter();
    let x_det = setup.detector_x();
    let warnings: Vec<Warning> = setup.overlap_warning().into_iter().collect();

    let (trace, norm_drift, evolution) = match theory {
        Theory::SchrodingerControl => control_run(setup, &packet, opts)?,
        Theory::Floquet | Theory::Stueckelberg => coherent_run(theory, setup, &packet, opts)?,
    };
    let trace = IntensityTrace {
        detector_x: x_det,
        theory,
        predicted_spacing: setup.predicted_spacing(),
        ..trace
    };
    debug_assert!(trace.validate().is_ok());
    log::debug!(
        "{theory}: s* = {s}, detector x = {x_det}, {} samples on [{}, {}]",
        trace.times.len(),
        trace.times.first().copied().unwrap_or(f64::NAN),
        trace.times.last().copied().unwrap_or(f64::NAN),
    );
    Ok(TwoGateRun {
        trace,
        norm_drift,
        evolution,
        warnings,
        flight_parameter: s,
    })
}

type RunParts = (IntensityTrace, Option<f64>, Option<SampledField<f64>>);

fn empty_trace(times: Vec<f64>, intensity: Vec<f64>, incoherent: Vec<f64>) -> IntensityTrace {
    IntensityTrace {
        times,
        intensity,
        incoherent,
        detector_x: 0.0,
        theory: Theory::Stueckelberg,
        predicted_spacing: 0.0,
    }
}

fn coherent_run(
    theory: Theory,
    setup: &TwoGateSetup,
    packet: &SpacetimePacket<f64>,
    opts: &RunOptions,
) -> Result<RunParts> {
    let consts = setup.constants;
    let mass = setup.mass;
    let s = setup.flight_parameter();
    let x_det = setup.detector_x();
    let arriving = arriving_gates(packet, theory, s, &consts, mass);
    let (lo, hi) = union(arriving.iter().map(|g| {
        let h = opts.window_reach * g.amplitude_sigma();
        (g.center - h, g.center + h)
    }));
    let (lo, hi) = if setup.gate_profile == GateProfile::Rectangular && theory == Theory::Floquet {
        let half = 0.5 * setup.gate_width;
        union(
            setup
                .gate_times()
                .iter()
                .map(|t| (t + s - 2.0 * half, t + s + 2.0 * half)),
        )
    } else {
        (lo, hi)
    };
    let axis = time_axis(lo, hi, opts.n_t)?;
    let times = axis.points();
    let field = packet.to_field(&consts);

    // spatial factor at the detector
    let spatial_amp = match opts.engine {
        Engine::ClosedForm => field.spatial.propagate(consts.hbar * s / mass).eval(x_det),
        Engine::Quadrature => {
            let env = Envelope::Gaussian(field.spatial);
            let src = source_grid_for(
                &env,
                x_det,
                x_det,
                s,
                mass,
                consts.hbar,
                &opts.quadrature,
                "x",
            )?;
            let vals: Vec<Complex<f64>> = src
                .points()
                .iter()
                .map(|&x| field.spatial.eval(x))
                .collect();
            quadrature_1d(&src, &vals, &[x_det], s, mass, consts.hbar)[0]
        }
    };
    let spatial_weight = spatial_amp.norm_sqr();

    // temporal factor, one column per gate
    let per_gate: Vec<Vec<Complex<f64>>> = match (theory, opts.engine) {
        (Theory::Floquet, _) => field
            .temporal
            .iter()
            .map(|e| {
                let moved = e.shifted(s);
                times.iter().map(|&t| moved.eval(t)).collect()
            })
            .collect(),
        (_, Engine::ClosedForm) => {
            let evolved = evolve_closed_form(packet, Dynamics::Stueckelberg, s, mass, &consts)?;
            evolved
                .temporal
                .iter()
                .map(|e| times.iter().map(|&t| e.eval(t)).collect())
                .collect()
        }
        (_, Engine::Quadrature) => {
            let mu_t = -mass * consts.c * consts.c;
            let src = source_grid_for_all(
                &field.temporal,
                axis.min,
                axis.max,
                s,
                mu_t,
                consts.hbar,
                &opts.quadrature,
                "t",
            )?;
            let pts = src.points();
            field
                .temporal
                .iter()
                .map(|e| {
                    let vals: Vec<Complex<f64>> = pts.iter().map(|&t| e.eval(t)).collect();
                    quadrature_1d(&src, &vals, &times, s, mu_t, consts.hbar)
                })
                .collect()
        }
    };
    let mut intensity = Vec::with_capacity(times.len());
    let mut incoherent = Vec::with_capacity(times.len());
    for i in 0..times.len() {
        let mut sum = Complex::new(0.0, 0.0);
        let mut inc = 0.0;
        for g in &per_gate {
            sum += g[i];
            inc += g[i].norm_sqr();
        }
        intensity.push(spatial_weight * sum.norm_sqr());
        incoherent.push(spatial_weight * inc);
    }

    let (norm_drift, evolution) = if opts.evolution {
        let closed = evolve_closed_form(packet, theory_dynamics(theory), s, mass, &consts);
        let grid = match closed {
            Ok(f) => f.auto_grid(8.0, opts.evolution_samples)?,
            // rectangular gates under Stueckelberg: window from the stand-in Gaussians
            Err(_) => {
                let mut f = field.clone();
                f.spatial = f.spatial.propagate(consts.hbar * s / mass);
                f.temporal = arriving.iter().map(|g| Envelope::Gaussian(*g)).collect();
                f.auto_grid(8.0, opts.evolution_samples)?
            }
        };
        let result = match theory {
            Theory::Floquet => propagate_floquet(
                packet,
                s,
                mass,
                &consts,
                opts.engine,
                &grid,
                &opts.quadrature,
            )?,
            _ => propagate_stueckelberg(
                packet,
                s,
                mass,
                &consts,
                opts.engine,
                &grid,
                &opts.quadrature,
            )?,
        };
        (Some(result.norm_drift), Some(result.field))
    } else {
        (None, None)
    };
    Ok((
        empty_trace(times, intensity, incoherent),
        norm_drift,
        evolution,
    ))
}

fn theory_dynamics(theory: Theory) -> Dynamics {
    match theory {
        Theory::SchrodingerControl => Dynamics::Schrodinger,
        Theory::Floquet => Dynamics::Floquet,
        Theory::Stueckelberg => Dynamics::Stueckelberg,
    }
}

/// Each gate emits the spatial packet at its centre time with weight equal
/// to the gate's norm; the packets then evolve separately and their
/// intensities add.
fn control_run(
    setup: &TwoGateSetup,
    packet: &SpacetimePacket<f64>,
    opts: &RunOptions,
) -> Result<RunParts> {
    let consts = setup.constants;
    let mass = setup.mass;
    let x_det = setup.detector_x();
    let env = packet.spatial.envelope(&consts);
    let flight = mass * setup.flight_distance / setup.p0;
    let spread = env.propagate(consts.hbar * flight / mass).amplitude_sigma() * mass / setup.p0;
    let emissions: Vec<(f64, f64)> = packet
        .gates
        .iter()
        .map(|g| (g.center_t, g.amplitude.norm_sqr()))
        .collect();
    let (lo, hi) = union(emissions.iter().map(|(t, _)| {
        (
            t + flight - opts.window_reach * spread,
            t + flight + opts.window_reach * spread,
        )
    }));
    let axis = time_axis(lo, hi, opts.n_t)?;
    let times = axis.points();

    let amplitude_at = |elapsed: f64| -> Result<Complex<f64>> {
        if !(elapsed > 0.0) {
            return Ok(Complex::new(0.0, 0.0));
        }
        match opts.engine {
            Engine::ClosedForm => Ok(env.propagate(consts.hbar * elapsed / mass).eval(x_det)),
            Engine::Quadrature => {
                let src = source_grid_for(
                    &Envelope::Gaussian(env),
                    x_det,
                    x_det,
                    elapsed,
                    mass,
                    consts.hbar,
                    &opts.quadrature,
                    "x",
                )?;
                let vals: Vec<Complex<f64>> = src.points().iter().map(|&x| env.eval(x)).collect();
                Ok(quadrature_1d(&src, &vals, &[x_det], elapsed, mass, consts.hbar)[0])
            }
        }
    };
    let intensity: Vec<f64> = times
        .par_iter()
        .map(|&t| {
            emissions.iter().try_fold(0.0, |acc, &(t_k, weight)| {
                Ok(acc + weight * amplitude_at(t - t_k)?.norm_sqr())
            })
        })
        .collect::<Result<Vec<f64>>>()?;

    let (norm_drift, evolution) = if opts.evolution {
        let arrived = env.propagate(consts.hbar * flight / mass);
        let half = 8.0 * arrived.amplitude_sigma();
        let step = arrived.intensity_sigma() / opts.evolution_samples as f64;
        let n = (2.0 * half / step).ceil() as usize | 1;
        let grid = Grid1D::centered(setup.center_x + setup.p0 * flight / mass, half, n.max(33))?;
        let r = propagate_schrodinger(
            &packet.spatial,
            flight,
            mass,
            &consts,
            opts.engine,
            &grid,
            &opts.quadrature,
        )?;
        (Some(r.norm_drift), None)
    } else {
        (None, None)
    };
    Ok((
        empty_trace(times, intensity.clone(), intensity),
        norm_drift,
        evolution,
    ))
}

/// Which setup field a scan varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanParameter {
    GateSpacing,
    FlightDistance,
}

impl std::str::FromStr for ScanParameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gate_spacing" | "epsilon" => Ok(ScanParameter::GateSpacing),
            "flight_distance" | "L" => Ok(ScanParameter::FlightDistance),
            other => Err(Error::domain(format!(
                "unknown scan parameter {other:?}; expected gate_spacing or flight_distance"
            ))),
        }
    }
}

impl std::fmt::Display for ScanParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScanParameter::GateSpacing => "gate_spacing",
            ScanParameter::FlightDistance => "flight_distance",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub value: f64,
    pub gate_spacing: f64,
    pub flight_distance: f64,
    pub coherence_visibility: Option<f64>,
    pub fringe_visibility: Option<f64>,
    pub spacing_t: Option<f64>,
    pub spacing_t_predicted: f64,
    /// `gate_spacing * spacing_t`.
    pub epsilon_t_product: Option<f64>,
    pub relative_error: Option<f64>,
    pub peaks: usize,
    pub norm_drift: Option<f64>,
    /// Run failure, or the reason no fringes were reported.
    pub note: Option<String>,
}

/// Runs the experiment once per value; rows come back in input order and a
/// failing row does not stop the scan.
pub fn scan(
    theory: Theory,
    setup: &TwoGateSetup,
    parameter: ScanParameter,
    values: &[f64],
    opts: &RunOptions,
    threshold_fraction: f64,
) -> Result<Vec<ScanRow>> {
    if values.len() < 2 {
        return Err(Error::domain("a scan needs at least two values"));
    }
    Ok(values
        .par_iter()
        .map(|&value| {
            let mut row_setup = *setup;
            match parameter {
                ScanParameter::GateSpacing => row_setup.gate_spacing = value,
                ScanParameter::FlightDistance => row_setup.flight_distance = value,
            }
            scan_row(theory, &row_setup, value, opts, threshold_fraction)
        })
        .collect())
}

/// [`scan`] over the gate spacing.
pub fn visibility_scan(
    theory: Theory,
    setup: &TwoGateSetup,
    epsilon_values: &[f64],
    opts: &RunOptions,
    threshold_fraction: f64,
) -> Result<Vec<ScanRow>> {
    scan(
        theory,
        setup,
        ScanParameter::GateSpacing,
        epsilon_values,
        opts,
        threshold_fraction,
    )
}

fn scan_row(
    theory: Theory,
    setup: &TwoGateSetup,
    value: f64,
    opts: &RunOptions,
    threshold_fraction: f64,
) -> ScanRow {
    let mut row = ScanRow {
        value,
        gate_spacing: setup.gate_spacing,
        flight_distance: setup.flight_distance,
        coherence_visibility: None,
        fringe_visibility: None,
        spacing_t: None,
        spacing_t_predicted: setup.predicted_spacing(),
        epsilon_t_product: None,
        relative_error: None,
        peaks: 0,
        norm_drift: None,
        note: None,
    };
    let run = match run_two_gate(theory, setup, opts) {
        Ok(r) => r,
        Err(e) => {
            row.note = Some(e.to_string());
            return row;
        }
    };
    row.coherence_visibility = Some(coherence_visibility(&run.trace));
    row.norm_drift = run.norm_drift;
    match extract_fringes(&run.trace, threshold_fraction) {
        Ok(f) => {
            row.fringe_visibility = Some(f.visibility);
            row.spacing_t = Some(f.spacing_t);
            row.epsilon_t_product = Some(f.spacing_t * setup.gate_spacing);
            row.relative_error = f.relative_error;
            row.peaks = f.peak_times.len();
        }
        Err(Error::NoFringes { found }) => {
            row.peaks = found;
            row.note = Some(format!(
                "no fringes ({found} peak(s) in the central window)"
            ));
        }
        Err(e) => row.note = Some(e.to_string()),
    }
    row
}

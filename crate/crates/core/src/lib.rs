//! Interference in time: free propagation of space-time wave packets under
//! Schrödinger, Floquet and Stueckelberg evolution, the two-gate experiment,
//! and closed-form fringe-spacing estimates.
//!
//! The numerical core (envelopes, grids, packets, kernels, propagation) is
//! generic over [`scalar::Real`] (`f32` or `f64`). Laboratory units,
//! experiments, estimates and file I/O work in `f64`; the aliases below name
//! the `f64` instances.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod envelope;
pub mod error;
pub mod estimates;
pub mod experiments;
pub mod field;
pub mod fringes;
pub mod grid;
pub mod io;
pub mod kernels;
pub mod packet;
pub mod propagation;
pub mod scalar;
pub mod units;

pub use error::{Error, Result};
pub use experiments::{
    coherence_visibility, extract_fringes, run_two_gate, scan, visibility_scan, IntensityTrace,
    RunOptions, ScanParameter, ScanRow, Theory, TwoGateRun, TwoGateSetup,
};
pub use fringes::FringeReport;
pub use propagation::{Dynamics, Engine, QuadratureOptions};
pub use units::{MomentumModel, PhysicalConstants, PhysicalSetup, UnitScales};

pub type Constants = constants::Constants<f64>;
pub type Grid1D = grid::Grid1D<f64>;
pub type Grid2D = grid::Grid2D<f64>;
pub type ComplexGaussian = envelope::ComplexGaussian<f64>;
pub type GaussianSpatialPacket = packet::GaussianSpatialPacket<f64>;
pub type TimeGate = packet::TimeGate<f64>;
pub type SpacetimePacket = packet::SpacetimePacket<f64>;
pub type SampledField = field::SampledField<f64>;
pub type AnalyticField = field::AnalyticField<f64>;
pub type PropagationResult = propagation::PropagationResult<f64>;
pub type PropagationResult1D = propagation::PropagationResult1D<f64>;
pub type HamiltonDiagnostics = propagation::HamiltonDiagnostics<f64>;

//! Closed-form fringe-spacing estimates in SI units.
//!
//! Two products of gate spacing and fringe spacing are available:
//! `eps T = 2 pi hbar L / (p c^2)` from the relativistic two-gate phase, and
//! the crude non-relativistic `eps T = (pi hbar / 2) sqrt(m / 2) L E^(-3/2)`.
//! The equal-spacing time is the square root of either product.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{PhysicalConstants, PhysicalSetup};

/// Momentum (as `cp`, eV) quoted alongside the laboratory numbers.
pub const QUOTED_CP_EV: f64 = 1.21e3;
/// Quoted relativistic product, s^2.
pub const QUOTED_PRODUCT: f64 = 6.9e-30;
/// Quoted equal spacing for the relativistic product, s.
pub const QUOTED_SPACING: f64 = 2.6e-15;
/// Quoted crude product, s^2.
pub const QUOTED_CRUDE_PRODUCT: f64 = 9e-28;
/// Quoted crude spacing, s.
pub const QUOTED_CRUDE_SPACING: f64 = 30e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    /// `2 pi hbar L / (p c^2)`
    Relativistic,
    /// `(pi hbar / 2) sqrt(m / 2) L E^(-3/2)`
    CrudeNonrelativistic,
}

impl Formula {
    pub fn expression(self) -> &'static str {
        match self {
            Formula::Relativistic => "2 pi hbar L / (p c^2)",
            Formula::CrudeNonrelativistic => "(pi hbar / 2) sqrt(m / 2) L E_kin^(-3/2)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    /// s^2
    pub epsilon_t_product: f64,
    /// s
    pub equal_spacing_t: f64,
    pub inputs_echo: PhysicalSetup,
    pub formula: Formula,
    pub kinetic_energy_ev: f64,
    pub cp_ev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateComparison {
    pub crude: EstimateReport,
    pub relativistic: EstimateReport,
    /// crude / relativistic products.
    pub ratio: f64,
    /// The relativistic product evaluated with [`QUOTED_CP_EV`] instead of the derived `cp`.
    pub quoted_cp_product: f64,
    pub quoted_cp_spacing: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be > 0, got {v}")))
    }
}

/// `2 pi hbar L / (p c^2)` in s^2 for `L` in m and `cp` in eV.
pub fn stueckelberg_product_with(
    k: &PhysicalConstants,
    flight_distance: f64,
    cp_ev: f64,
) -> Result<f64> {
    positive("flight_distance", flight_distance)?;
    positive("cp", cp_ev)?;
    // p c^2 = (cp in J) c
    Ok(std::f64::consts::TAU * k.hbar * flight_distance / (cp_ev * k.ev_to_joule * k.c))
}

/// `(pi hbar / 2) sqrt(m / 2) L E^(-3/2)` in s^2 for `L` in m and `E` in eV.
pub fn crude_nonrelativistic_product_with(
    k: &PhysicalConstants,
    flight_distance: f64,
    kinetic_ev: f64,
) -> Result<f64> {
    positive("flight_distance", flight_distance)?;
    positive("kinetic energy", kinetic_ev)?;
    let e = kinetic_ev * k.ev_to_joule;
    Ok(
        std::f64::consts::FRAC_PI_2 * k.hbar * (k.electron_mass / 2.0).sqrt() * flight_distance
            / (e * e.sqrt()),
    )
}

/// [`stueckelberg_product_with`] using CODATA 2018.
pub fn stueckelberg_product(flight_distance: f64, cp_ev: f64) -> Result<f64> {
    stueckelberg_product_with(&PhysicalConstants::CODATA_2018, flight_distance, cp_ev)
}

/// [`crude_nonrelativistic_product_with`] using CODATA 2018.
pub fn crude_nonrelativistic_product(flight_distance: f64, kinetic_ev: f64) -> Result<f64> {
    crude_nonrelativistic_product_with(&PhysicalConstants::CODATA_2018, flight_distance, kinetic_ev)
}

/// Runs wavelength, photon count, kinetic energy and momentum through both
/// formulas.
pub fn compare_estimates_with(
    k: &PhysicalConstants,
    setup: &PhysicalSetup,
) -> Result<EstimateComparison> {
    setup.validate()?;
    let kinetic = setup.kinetic_energy(k)?;
    let cp = setup.cp(k)?;
    let report = |formula, product: f64| EstimateReport {
        epsilon_t_product: product,
        equal_spacing_t: product.sqrt(),
        inputs_echo: *setup,
        formula,
        kinetic_energy_ev: kinetic,
        cp_ev: cp,
    };
    let relativistic = report(
        Formula::Relativistic,
        stueckelberg_product_with(k, setup.flight_distance, cp)?,
    );
    let crude = report(
        Formula::CrudeNonrelativistic,
        crude_nonrelativistic_product_with(k, setup.flight_distance, kinetic)?,
    );
    let quoted = stueckelberg_product_with(k, setup.flight_distance, QUOTED_CP_EV)?;
    Ok(EstimateComparison {
        ratio: crude.epsilon_t_product / relativistic.epsilon_t_product,
        crude,
        relativistic,
        quoted_cp_product: quoted,
        quoted_cp_spacing: quoted.sqrt(),
    })
}

pub fn compare_estimates(setup: &PhysicalSetup) -> Result<EstimateComparison> {
    compare_estimates_with(&PhysicalConstants::CODATA_2018, setup)
}

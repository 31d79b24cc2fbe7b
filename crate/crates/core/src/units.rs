//! Physical constants, laboratory/internal unit conversion and the
//! photon-absorption kinematics that fix the emitted electron's energy and
//! momentum.
//!
//! Energies in this module are in eV, momenta are reported as `cp` in eV,
//! wavelengths in nm, lengths in m and times in s.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA constants needed by the kinematics chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Speed of light, m/s.
    pub c: f64,
    /// Electron mass, kg.
    pub electron_mass: f64,
    /// Electron rest energy, eV.
    pub electron_rest_energy: f64,
    /// Joules per eV.
    pub ev_to_joule: f64,
    /// h·c in eV·nm.
    pub hc: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 recommended values.
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        c: 299_792_458.0,
        electron_mass: 9.109_383_701_5e-31,
        electron_rest_energy: 510_998.950_00,
        ev_to_joule: 1.602_176_634e-19,
        hc: 1_239.841_984,
    };

    /// Checks the derived entries against the primary ones (relative 1e-6).
    pub fn check_consistency(&self) -> Result<()> {
        let rest = self.electron_mass * self.c * self.c / self.ev_to_joule;
        if !close(rest, self.electron_rest_energy, 1e-6) {
            return Err(Error::domain(format!(
                "electron_rest_energy {} inconsistent with m c^2 = {rest}",
                self.electron_rest_energy
            )));
        }
        let hc = self.hbar * self.c * std::f64::consts::TAU / (self.ev_to_joule * 1e-9);
        if !close(hc, self.hc, 1e-6) {
            return Err(Error::domain(format!(
                "hc {} inconsistent with 2 pi hbar c = {hc}",
                self.hc
            )));
        }
        Ok(())
    }

    pub fn photon_energy(&self, wavelength_nm: f64) -> Result<f64> {
        if !(wavelength_nm > 0.0) || !wavelength_nm.is_finite() {
            return Err(Error::domain(format!(
                "wavelength must be positive and finite, got {wavelength_nm} nm"
            )));
        }
        Ok(self.hc / wavelength_nm)
    }

    pub fn kinetic_from_photons(&self, photons: u32, wavelength_nm: f64) -> Result<f64> {
        if photons < 1 {
            return Err(Error::domain("photon count must be at least 1"));
        }
        Ok(f64::from(photons) * self.photon_energy(wavelength_nm)?)
    }

    /// `cp` in eV for an electron of kinetic energy `kinetic_ev`.
    pub fn momentum_from_kinetic(&self, kinetic_ev: f64, model: MomentumModel) -> Result<f64> {
        if !(kinetic_ev >= 0.0) || !kinetic_ev.is_finite() {
            return Err(Error::domain(format!(
                "kinetic energy must be non-negative and finite, got {kinetic_ev} eV"
            )));
        }
        let rest = self.electron_rest_energy;
        Ok(match model {
            MomentumModel::Nonrelativistic => (2.0 * rest * kinetic_ev).sqrt(),
            // (mc^2 + E)^2 - (mc^2)^2 expanded to avoid cancellation
            MomentumModel::Relativistic => (kinetic_ev * (2.0 * rest + kinetic_ev)).sqrt(),
        })
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

/// Photon energy in eV for a wavelength in nm, CODATA 2018 constants.
pub fn photon_energy(wavelength_nm: f64) -> Result<f64> {
    PhysicalConstants::CODATA_2018.photon_energy(wavelength_nm)
}

/// Kinetic energy in eV after absorbing `photons` photons.
pub fn kinetic_from_photons(photons: u32, wavelength_nm: f64) -> Result<f64> {
    PhysicalConstants::CODATA_2018.kinetic_from_photons(photons, wavelength_nm)
}

/// Electron `cp` in eV for a kinetic energy in eV.
pub fn momentum_from_kinetic(kinetic_ev: f64, model: MomentumModel) -> Result<f64> {
    PhysicalConstants::CODATA_2018.momentum_from_kinetic(kinetic_ev, model)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentumModel {
    #[default]
    Nonrelativistic,
    Relativistic,
}

/// Seconds, meters and kilograms per internal unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitScales {
    pub length_scale: f64,
    pub time_scale: f64,
    pub mass_scale: f64,
}

impl UnitScales {
    pub fn new(length_scale: f64, time_scale: f64, mass_scale: f64) -> Result<Self> {
        let scales = UnitScales {
            length_scale,
            time_scale,
            mass_scale,
        };
        scales.validate()?;
        Ok(scales)
    }

    /// Scales in which `hbar = c = mass = 1`.
    pub fn natural(mass_kg: f64, constants: &PhysicalConstants) -> Result<Self> {
        if !(mass_kg > 0.0) {
            return Err(Error::domain("natural units need a positive mass"));
        }
        let length = constants.hbar / (mass_kg * constants.c);
        Self::new(length, length / constants.c, mass_kg)
    }

    /// Natural units of the electron (Compton length and time).
    pub fn electron_natural() -> Self {
        let k = PhysicalConstants::CODATA_2018;
        Self::natural(k.electron_mass, &k).expect("CODATA electron scales are valid")
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("length_scale", self.length_scale),
            ("time_scale", self.time_scale),
            ("mass_scale", self.mass_scale),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn energy_scale(&self) -> f64 {
        self.mass_scale * self.length_scale * self.length_scale
            / (self.time_scale * self.time_scale)
    }

    pub fn momentum_scale(&self) -> f64 {
        self.mass_scale * self.length_scale / self.time_scale
    }

    pub fn action_scale(&self) -> f64 {
        self.energy_scale() * self.time_scale
    }

    pub fn velocity_scale(&self) -> f64 {
        self.length_scale / self.time_scale
    }

    /// hbar, c and a mass expressed in internal units.
    pub fn internal_constants(
        &self,
        constants: &PhysicalConstants,
        mass_kg: f64,
    ) -> (f64, f64, f64) {
        (
            constants.hbar / self.action_scale(),
            constants.c / self.velocity_scale(),
            mass_kg / self.mass_scale,
        )
    }
}

impl Default for UnitScales {
    fn default() -> Self {
        Self::electron_natural()
    }
}

/// Laboratory parameters of the two-gate experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalSetup {
    /// Laser wavelength, nm.
    pub wavelength: f64,
    pub photon_count: u32,
    /// Emitter to detector distance, m.
    pub flight_distance: f64,
    /// Time between the two gates, s.
    pub gate_spacing: f64,
    /// Gate width (amplitude standard deviation for Gaussian gates), s.
    pub gate_width: f64,
    #[serde(default)]
    pub momentum_model: MomentumModel,
}

impl PhysicalSetup {
    /// 850 nm, 300 photons, 1 cm flight; gates 2.6 fs apart and 0.1 fs wide.
    pub fn reference() -> Self {
        PhysicalSetup {
            wavelength: 850.0,
            photon_count: 300,
            flight_distance: 0.01,
            gate_spacing: 2.6e-15,
            gate_width: 1.0e-16,
            momentum_model: MomentumModel::Nonrelativistic,
        }
    }

    /// Returns the name of the first field violating its invariant.
    pub fn invalid_field(&self) -> Option<(&'static str, String)> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.wavelength) {
            return Some((
                "wavelength",
                format!("must be > 0, got {}", self.wavelength),
            ));
        }
        if self.photon_count < 1 {
            return Some(("photon_count", "must be >= 1".into()));
        }
        if !positive(self.flight_distance) {
            return Some((
                "flight_distance",
                format!("must be > 0, got {}", self.flight_distance),
            ));
        }
        if !(self.gate_spacing >= 0.0 && self.gate_spacing.is_finite()) {
            return Some((
                "gate_spacing",
                format!("must be >= 0, got {}", self.gate_spacing),
            ));
        }
        if !positive(self.gate_width) {
            return Some((
                "gate_width",
                format!("must be > 0, got {}", self.gate_width),
            ));
        }
        None
    }

    pub fn validate(&self) -> Result<()> {
        match self.invalid_field() {
            Some((field, msg)) => Err(Error::domain(format!("{field}: {msg}"))),
            None => Ok(()),
        }
    }

    pub fn kinetic_energy(&self, constants: &PhysicalConstants) -> Result<f64> {
        constants.kinetic_from_photons(self.photon_count, self.wavelength)
    }

    /// `cp` in eV through the configured momentum model.
    pub fn cp(&self, constants: &PhysicalConstants) -> Result<f64> {
        constants.momentum_from_kinetic(self.kinetic_energy(constants)?, self.momentum_model)
    }
}

/// A [`PhysicalSetup`] with every dimensional quantity divided by its scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InternalSetup {
    pub wavelength: f64,
    pub photon_count: u32,
    pub flight_distance: f64,
    pub gate_spacing: f64,
    pub gate_width: f64,
    pub momentum_model: MomentumModel,
}

const NM: f64 = 1e-9;

pub fn to_internal(setup: &PhysicalSetup, scales: &UnitScales) -> Result<InternalSetup> {
    scales.validate()?;
    Ok(InternalSetup {
        wavelength: setup.wavelength * NM / scales.length_scale,
        photon_count: setup.photon_count,
        flight_distance: setup.flight_distance / scales.length_scale,
        gate_spacing: setup.gate_spacing / scales.time_scale,
        gate_width: setup.gate_width / scales.time_scale,
        momentum_model: setup.momentum_model,
    })
}

pub fn from_internal(setup: &InternalSetup, scales: &UnitScales) -> Result<PhysicalSetup> {
    scales.validate()?;
    Ok(PhysicalSetup {
        wavelength: setup.wavelength * scales.length_scale / NM,
        photon_count: setup.photon_count,
        flight_distance: setup.flight_distance * scales.length_scale,
        gate_spacing: setup.gate_spacing * scales.time_scale,
        gate_width: setup.gate_width * scales.time_scale,
        momentum_model: setup.momentum_model,
    })
}

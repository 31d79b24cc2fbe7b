//! Space-time wave packets: a spatial Gaussian times a sum of time gates
//! times the plane-wave carrier `exp(i (p0 x - e0 t) / hbar)`.
//!
//! Width convention: the width of a Gaussian (spatial `width_sigma_x` or a
//! gate's `width_delta_t`) is the standard deviation of the *amplitude*
//! envelope, `exp(-u^2 / (2 width^2))`. The intensity standard deviation is
//! `width / sqrt 2`. A rectangular gate's width is its full duration.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::constants::Constants;
use crate::envelope::{ComplexGaussian, Envelope, RectPulse};
use crate::error::{Error, Result};
use crate::field::{AnalyticField, Carrier, Expectations, SampledField};
use crate::grid::Grid2D;
use crate::scalar::Real;

/// Minimum grid steps per packet feature before `norm2` trusts the grid.
pub const MIN_STEPS_PER_WIDTH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Deserialize<'de> + Default")
)]
pub struct GaussianSpatialPacket<T> {
    pub center_x: T,
    pub width_sigma_x: T,
    pub mean_momentum_p0: T,
    #[serde(default)]
    pub global_phase: T,
}

impl<T: Real> GaussianSpatialPacket<T> {
    pub fn new(center_x: T, width_sigma_x: T, mean_momentum_p0: T) -> Result<Self> {
        let p = GaussianSpatialPacket {
            center_x,
            width_sigma_x,
            mean_momentum_p0,
            global_phase: T::zero(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width_sigma_x > T::zero()) || !self.width_sigma_x.is_finite() {
            return Err(Error::domain(format!(
                "spatial width must be positive, got {}",
                self.width_sigma_x
            )));
        }
        if !self.center_x.is_finite() || !self.mean_momentum_p0.is_finite() {
            return Err(Error::domain(
                "spatial packet center and momentum must be finite",
            ));
        }
        Ok(())
    }

    /// Unit-norm envelope including the carrier `exp(i p0 x / hbar)`.
    pub fn envelope(&self, consts: &Constants<T>) -> ComplexGaussian<T> {
        let k = self.mean_momentum_p0 / consts.hbar;
        let phase = Complex::new(T::zero(), self.global_phase + k * self.center_x).exp();
        ComplexGaussian::normalized(self.center_x, self.width_sigma_x, k, phase)
    }

    pub fn evaluate(&self, x: T, consts: &Constants<T>) -> Complex<T> {
        self.envelope(consts).eval(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateProfile {
    #[default]
    Gaussian,
    Rectangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGate<T> {
    pub center_t: T,
    pub width_delta_t: T,
    #[serde(default)]
    pub profile: GateProfile,
    /// Complex weight; a gate with `|amplitude| = 1` carries unit norm in t.
    pub amplitude: Complex<T>,
}

impl<T: Real> TimeGate<T> {
    pub fn gaussian(center_t: T, width: T, amplitude: Complex<T>) -> Self {
        TimeGate {
            center_t,
            width_delta_t: width,
            profile: GateProfile::Gaussian,
            amplitude,
        }
    }

    pub fn rectangular(center_t: T, width: T, amplitude: Complex<T>) -> Self {
        TimeGate {
            center_t,
            width_delta_t: width,
            profile: GateProfile::Rectangular,
            amplitude,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width_delta_t > T::zero()) || !self.width_delta_t.is_finite() {
            return Err(Error::domain(format!(
                "gate width must be positive, got {}",
                self.width_delta_t
            )));
        }
        if !self.center_t.is_finite() {
            return Err(Error::domain("gate center must be finite"));
        }
        Ok(())
    }

    /// Gate envelope including the carrier `exp(-i e0 t / hbar)`.
    pub fn envelope(&self, e0: T, consts: &Constants<T>) -> Envelope<T> {
        let k = -e0 / consts.hbar;
        let scale = self.amplitude * Complex::new(T::zero(), k * self.center_t).exp();
        match self.profile {
            GateProfile::Gaussian => Envelope::Gaussian(ComplexGaussian::normalized(
                self.center_t,
                self.width_delta_t,
                k,
                scale,
            )),
            GateProfile::Rectangular => Envelope::Rect(RectPulse::normalized(
                self.center_t,
                self.width_delta_t,
                k,
                scale,
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Deserialize<'de> + Default")
)]
pub struct SpacetimePacket<T> {
    pub spatial: GaussianSpatialPacket<T>,
    pub gates: Vec<TimeGate<T>>,
    pub mean_energy_e0: T,
}

impl<T: Real> SpacetimePacket<T> {
    pub fn new(
        spatial: GaussianSpatialPacket<T>,
        gates: Vec<TimeGate<T>>,
        mean_energy_e0: T,
    ) -> Result<Self> {
        let p = SpacetimePacket {
            spatial,
            gates,
            mean_energy_e0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.spatial.validate()?;
        if self.gates.is_empty() {
            return Err(Error::domain("a space-time packet needs at least one gate"));
        }
        for g in &self.gates {
            g.validate()?;
        }
        if !self.mean_energy_e0.is_finite() {
            return Err(Error::domain("carrier energy must be finite"));
        }
        Ok(())
    }

    pub fn carrier(&self) -> Carrier<T> {
        Carrier {
            p0: self.spatial.mean_momentum_p0,
            e0: self.mean_energy_e0,
        }
    }

    pub fn to_field(&self, consts: &Constants<T>) -> AnalyticField<T> {
        AnalyticField {
            spatial: self.spatial.envelope(consts),
            temporal: self
                .gates
                .iter()
                .map(|g| g.envelope(self.mean_energy_e0, consts))
                .collect(),
            carrier: self.carrier(),
        }
    }

    /// The same packet with only gate `k`.
    pub fn single_gate(&self, k: usize) -> Self {
        SpacetimePacket {
            gates: vec![self.gates[k]],
            ..self.clone()
        }
    }

    pub fn translated(&self, dx: T, dt: T) -> Self {
        let mut p = self.clone();
        p.spatial.center_x += dx;
        for g in &mut p.gates {
            g.center_t += dt;
        }
        p
    }

    pub fn scaled(&self, by: Complex<T>) -> Self {
        let mut p = self.clone();
        for g in &mut p.gates {
            g.amplitude *= by;
        }
        p
    }
}

pub fn evaluate_packet<T: Real>(
    packet: &SpacetimePacket<T>,
    x: T,
    t: T,
    consts: &Constants<T>,
) -> Complex<T> {
    packet.to_field(consts).eval(x, t)
}

/// Checks that every packet feature spans at least [`MIN_STEPS_PER_WIDTH`] steps.
pub fn check_resolves<T: Real>(
    packet: &SpacetimePacket<T>,
    grid: &Grid2D<T>,
    consts: &Constants<T>,
) -> Result<()> {
    grid.validate()?;
    let field = packet.to_field(consts);
    let min = crate::scalar::count::<T>(MIN_STEPS_PER_WIDTH);
    let sx = field.spatial.intensity_sigma();
    let hx = grid.x_axis().step();
    if sx < min * hx {
        return Err(Error::Resolution {
            axis: "x",
            given: grid.n_x,
            required: required_points(grid.x_axis().span(), sx / min),
            detail: format!(
                "spatial width {sx} spans fewer than {MIN_STEPS_PER_WIDTH} steps of {hx}"
            ),
        });
    }
    let ht = grid.t_axis().step();
    let narrowest = field
        .temporal
        .iter()
        .map(|e| e.feature_width())
        .fold(T::infinity(), T::min);
    if narrowest < min * ht {
        return Err(Error::Resolution {
            axis: "t",
            given: grid.n_t,
            required: required_points(grid.t_axis().span(), narrowest / min),
            detail: format!(
                "gate width {narrowest} spans fewer than {MIN_STEPS_PER_WIDTH} steps of {ht}"
            ),
        });
    }
    Ok(())
}

fn required_points<T: Real>(span: T, step: T) -> usize {
    (span / step)
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX)
        .saturating_add(1)
}

pub fn sample_packet<T: Real>(
    packet: &SpacetimePacket<T>,
    grid: &Grid2D<T>,
    consts: &Constants<T>,
) -> SampledField<T> {
    packet.to_field(consts).sample(*grid)
}

/// Simpson estimate of the space-time norm on `grid`.
pub fn norm2<T: Real>(
    packet: &SpacetimePacket<T>,
    grid: &Grid2D<T>,
    consts: &Constants<T>,
) -> Result<T> {
    check_resolves(packet, grid, consts)?;
    Ok(sample_packet(packet, grid, consts).norm2())
}

pub fn expectations<T: Real>(
    packet: &SpacetimePacket<T>,
    grid: &Grid2D<T>,
    consts: &Constants<T>,
) -> Result<Expectations<T>> {
    check_resolves(packet, grid, consts)?;
    sample_packet(packet, grid, consts).expectations(consts.hbar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use proptest::prelude::*;

    fn c1() -> Complex<f64> {
        Complex::new(1.0, 0.0)
    }

    fn consts() -> Constants<f64> {
        Constants::natural()
    }

    fn single() -> SpacetimePacket<f64> {
        SpacetimePacket::new(
            GaussianSpatialPacket::new(0.5, 1.0, 1.5).unwrap(),
            vec![TimeGate::gaussian(-0.25, 0.5, c1())],
            2.0,
        )
        .unwrap()
    }

    fn grid(xc: f64, tc: f64) -> Grid2D<f64> {
        Grid2D::new(
            Grid1D::centered(xc, 10.0, 401).unwrap(),
            Grid1D::centered(tc, 5.0, 401).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn peak_modulus_at_center() {
        let p = single();
        let g = grid(0.5, -0.25);
        let peak = evaluate_packet(&p, 0.5, -0.25, &consts()).norm();
        let max = sample_packet(&p, &g, &consts())
            .values
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        assert!((peak - max).abs() < 1e-14);
    }

    #[test]
    fn coincident_gates_double_the_amplitude() {
        let p = single();
        let mut two = p.clone();
        two.gates.push(p.gates[0]);
        for (x, t) in [(0.0, 0.0), (1.3, -0.7), (-2.0, 0.4)] {
            let a = evaluate_packet(&p, x, t, &consts());
            let b = evaluate_packet(&two, x, t, &consts());
            assert!((b - a * 2.0).norm() <= 1e-15 * a.norm().max(1e-300));
        }
    }

    #[test]
    fn distant_gate_leaves_first_center_unchanged() {
        let p = single();
        let mut two = p.clone();
        two.gates
            .push(TimeGate::gaussian(-0.25 + 10.0 * 0.5, 0.5, c1()));
        let a = evaluate_packet(&p, 0.5, -0.25, &consts()).norm();
        let b = evaluate_packet(&two, 0.5, -0.25, &consts()).norm();
        // second gate contributes exp(-100/2) of its peak at the first center
        let bound = (-50.0f64).exp() * 1.0001;
        assert!((b - a).abs() / a <= bound);
        assert!((b - a).abs() / a < 1e-9);
    }

    #[test]
    fn norm_examples() {
        let p = single();
        let g = grid(0.5, -0.25);
        assert!((norm2(&p, &g, &consts()).unwrap() - 1.0).abs() < 1e-6);

        let half = Complex::new(0.5f64.sqrt(), 0.0);
        let two = SpacetimePacket::new(
            p.spatial,
            vec![
                TimeGate::gaussian(-2.0, 0.3, half),
                TimeGate::gaussian(2.0, 0.3, half),
            ],
            2.0,
        )
        .unwrap();
        assert!((norm2(&two, &grid(0.5, 0.0), &consts()).unwrap() - 1.0).abs() < 1e-6);

        let scaled = p.scaled(Complex::new(2.0, 0.0));
        let r = norm2(&scaled, &g, &consts()).unwrap() / norm2(&p, &g, &consts()).unwrap();
        assert!((r - 4.0).abs() < 1e-12);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let p = single();
        let coarse = Grid2D::new(
            Grid1D::centered(0.5, 10.0, 401).unwrap(),
            Grid1D::centered(0.0, 5.0, 21).unwrap(),
        )
        .unwrap();
        match norm2(&p, &coarse, &consts()) {
            Err(Error::Resolution { axis, required, .. }) => {
                assert_eq!(axis, "t");
                assert!(required > 21);
            }
            other => panic!("expected resolution error, got {other:?}"),
        }
    }

    #[test]
    fn moment_examples() {
        let p = single();
        let g = grid(0.5, -0.25);
        let e = expectations(&p, &g, &consts()).unwrap();
        let ht = g.t_axis().step();
        assert!((e.mean_x - 0.5).abs() < 1e-9);
        assert!((e.mean_t + 0.25).abs() < ht);
        // intensity sigma of a gate with amplitude sigma 0.5
        assert!((e.sigma_t / (0.5 / 2f64.sqrt()) - 1.0).abs() < 1e-2);
        assert!((e.sigma_t / (0.5 / 2f64.sqrt()) - 1.0).abs() < 1e-3);
        assert!((e.mean_p - 1.5).abs() < 1e-6);
        assert!((e.mean_e - 2.0).abs() < 1e-6);

        let half = Complex::new(0.5f64.sqrt(), 0.0);
        let two = SpacetimePacket::new(
            p.spatial,
            vec![
                TimeGate::gaussian(-1.5, 0.3, half),
                TimeGate::gaussian(2.5, 0.3, half),
            ],
            2.0,
        )
        .unwrap();
        let e = expectations(&two, &grid(0.5, 0.5), &consts()).unwrap();
        assert!((e.mean_t - 0.5).abs() < ht);
    }

    #[test]
    fn rectangular_gate_norm() {
        let p = SpacetimePacket::new(
            GaussianSpatialPacket::new(0.0, 1.0, 0.0).unwrap(),
            vec![TimeGate::rectangular(0.0, 2.0, c1())],
            0.0,
        )
        .unwrap();
        // box edges land on grid points: [-1, 1) with step 0.025
        let g = Grid2D::new(
            Grid1D::centered(0.0, 10.0, 401).unwrap(),
            Grid1D::centered(0.0, 5.0, 401).unwrap(),
        )
        .unwrap();
        let n = norm2(&p, &g, &consts()).unwrap();
        assert!((n - 1.0).abs() < 2e-2);
    }

    #[test]
    fn empty_gate_list_is_invalid() {
        let r = SpacetimePacket::new(
            GaussianSpatialPacket::new(0.0, 1.0, 0.0).unwrap(),
            vec![],
            0.0,
        );
        assert!(r.is_err());
        assert!(GaussianSpatialPacket::new(0.0, 0.0, 0.0).is_err());
        assert!(TimeGate::gaussian(0.0, -1.0, c1()).validate().is_err());
    }

    proptest! {
        #[test]
        fn evaluation_is_linear_in_gates(
            t1 in -3.0f64..3.0, t2 in -3.0f64..3.0, w1 in 0.1f64..2.0, w2 in 0.1f64..2.0,
            x in -4.0f64..4.0, t in -4.0f64..4.0, re in -1.0f64..1.0, im in -1.0f64..1.0,
        ) {
            let spatial = GaussianSpatialPacket::new(0.2, 1.3, 0.7).unwrap();
            let g1 = TimeGate::gaussian(t1, w1, Complex::new(re, im));
            let g2 = TimeGate::rectangular(t2, w2, c1());
            let both = SpacetimePacket::new(spatial, vec![g1, g2], 1.1).unwrap();
            let sum = evaluate_packet(&both.single_gate(0), x, t, &consts())
                + evaluate_packet(&both.single_gate(1), x, t, &consts());
            let direct = evaluate_packet(&both, x, t, &consts());
            prop_assert!((sum - direct).norm() <= 1e-12 * direct.norm().max(1e-300) + 1e-300);
        }

        #[test]
        fn norm_is_translation_invariant(dx in -5.0f64..5.0, dt in -5.0f64..5.0) {
            let p = single();
            let g = grid(0.5, -0.25);
            let a = norm2(&p, &g, &consts()).unwrap();
            let b = norm2(&p.translated(dx, dt), &g.translated(dx, dt), &consts()).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}

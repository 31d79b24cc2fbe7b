//! Applying the kernels to packets.
//!
//! Two engines are provided. The closed-form engine pushes every complex
//! Gaussian through the exact one-axis update (see [`ComplexGaussian`]); the
//! quadrature engine integrates the kernel against sampled data with
//! composite Simpson weights. Each serves as the other's check.
//!
//! Quadrature sums run in a fixed order per output point; output points are
//! filled in parallel, so results do not depend on the worker count.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::Constants;
use crate::envelope::{ComplexGaussian, Envelope};
use crate::error::{Error, Result};
use crate::field::{AnalyticField, SampledField};
use crate::grid::{points_for_phase_rate, Grid1D, Grid2D};
use crate::kernels::axis_kernel;
use crate::packet::{GaussianSpatialPacket, SpacetimePacket};
use crate::scalar::{cast, count, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    ClosedForm,
    Quadrature,
}

impl std::str::FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed_form" => Ok(Engine::ClosedForm),
            "quadrature" => Ok(Engine::Quadrature),
            other => Err(Error::domain(format!(
                "unknown engine {other:?}; expected closed_form or quadrature"
            ))),
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Engine::ClosedForm => "closed_form",
            Engine::Quadrature => "quadrature",
        })
    }
}

/// Which evolution law drives a packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dynamics {
    /// Parameter is the laboratory time; no coherence in t.
    Schrodinger,
    /// `K = E + H`: exact shift in t, Schrödinger spreading in x.
    Floquet,
    /// `(p^2 - E^2/c^2) / 2M`: spreading in both x and t.
    Stueckelberg,
}

/// Settings for source grids chosen by the quadrature engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureOptions {
    /// Target samples per period of the fastest integrand phase.
    pub samples_per_period: usize,
    /// Amplitude standard deviations of source kept on each side.
    pub reach: f64,
    /// Largest source grid the engine will build on one axis.
    pub max_points: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            samples_per_period: 16,
            reach: 8.0,
            max_points: 1 << 22,
        }
    }
}

/// Hard floor of the oscillation-resolution rule.
pub const MIN_SAMPLES_PER_PERIOD: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationResult<T> {
    pub field: SampledField<T>,
    /// `|norm2_after - norm2_before| / norm2_before`.
    pub norm_drift: T,
    pub engine: Engine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationResult1D<T> {
    pub grid: Grid1D<T>,
    pub values: Vec<Complex<T>>,
    pub norm_drift: T,
    pub engine: Engine,
}

impl<T: Real> PropagationResult1D<T> {
    pub fn norm2(&self) -> T {
        norm2_1d(&self.grid, &self.values)
    }
}

pub(crate) fn norm2_1d<T: Real>(grid: &Grid1D<T>, values: &[Complex<T>]) -> T {
    grid.simpson_weights()
        .iter()
        .zip(values)
        .map(|(w, v)| *w * v.norm_sqr())
        .sum()
}

fn drift<T: Real>(before: T, after: T) -> T {
    (after - before).abs() / before
}

/// `out_j = sum_i w_i k_mu(out_j - u_i, s) f_i` over a uniform source grid.
pub fn quadrature_1d<T: Real>(
    src: &Grid1D<T>,
    values: &[Complex<T>],
    out: &[T],
    s: T,
    mu: T,
    hbar: T,
) -> Vec<Complex<T>> {
    let weighted: Vec<Complex<T>> = src
        .simpson_weights()
        .iter()
        .zip(values)
        .map(|(w, f)| f * *w)
        .collect();
    let pts = src.points();
    out.par_iter()
        .map(|&u| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (wf, &ui) in weighted.iter().zip(&pts) {
                acc += axis_kernel(u - ui, s, mu, hbar) * wf;
            }
            acc
        })
        .collect()
}

/// Largest `|u - u'|` between an output range and a source range.
fn reach_between<T: Real>(src_lo: T, src_hi: T, out_lo: T, out_hi: T) -> T {
    (out_hi - src_lo).abs().max((src_hi - out_lo).abs())
}

fn kernel_phase_rate<T: Real>(reach: T, s: T, mu: T, hbar: T) -> T {
    mu.abs() * reach / (hbar * s.abs())
}

/// Source grid covering `envelopes` that resolves the integrand of the
/// one-axis quadrature onto outputs in `[out_lo, out_hi]`.
#[allow(clippy::too_many_arguments)]
pub fn source_grid_for<T: Real>(
    envelope: &Envelope<T>,
    out_lo: T,
    out_hi: T,
    s: T,
    mu: T,
    hbar: T,
    opts: &QuadratureOptions,
    axis: &'static str,
) -> Result<Grid1D<T>> {
    source_grid_for_all(
        std::slice::from_ref(envelope),
        out_lo,
        out_hi,
        s,
        mu,
        hbar,
        opts,
        axis,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn source_grid_for_all<T: Real>(
    envelopes: &[Envelope<T>],
    out_lo: T,
    out_hi: T,
    s: T,
    mu: T,
    hbar: T,
    opts: &QuadratureOptions,
    axis: &'static str,
) -> Result<Grid1D<T>> {
    let reach: T = cast(opts.reach);
    let (lo, hi) = envelopes
        .iter()
        .map(|e| e.support(reach))
        .fold((T::infinity(), T::neg_infinity()), |(a, b), (l, h)| {
            (a.min(l), b.max(h))
        });
    let source_rate = envelopes
        .iter()
        .map(|e| e.max_wavenumber(reach))
        .fold(T::zero(), T::max);
    let rate = kernel_phase_rate(reach_between(lo, hi, out_lo, out_hi), s, mu, hbar) + source_rate;
    let span = hi - lo;
    let n_phase = points_for_phase_rate(span, rate, opts.samples_per_period);
    let finest = envelopes
        .iter()
        .map(|e| e.feature_width())
        .fold(T::infinity(), T::min);
    let n_feature = (span / finest * cast(8.0))
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX)
        | 1;
    let n = n_phase.max(n_feature).max(33);
    if n > opts.max_points {
        return Err(Error::Resolution {
            axis,
            given: opts.max_points,
            required: n,
            detail: format!(
                "integrand phase varies at up to {rate} rad per unit over a span of {span}; \
                 the source grid would exceed the {} point cap",
                opts.max_points
            ),
        });
    }
    Grid1D::new(lo, hi, n)
}

/// Largest phase advance per unit estimated from adjacent samples whose
/// modulus exceeds 1e-6 of the peak.
fn sampled_phase_rate<T: Real>(
    values: impl Iterator<Item = Complex<T>> + Clone,
    h: T,
    peak: T,
) -> T {
    let floor = peak * cast(1e-6);
    let mut prev: Option<Complex<T>> = None;
    let mut rate = T::zero();
    for v in values {
        if let Some(p) = prev {
            if p.norm() > floor && v.norm() > floor {
                rate = rate.max((v * p.conj()).arg().abs() / h);
            }
        }
        prev = Some(v);
    }
    rate
}

#[allow(clippy::too_many_arguments)]
fn check_sampled_axis<T: Real>(
    axis: &'static str,
    src: &Grid1D<T>,
    source_rate: T,
    out_lo: T,
    out_hi: T,
    s: T,
    mu: T,
    hbar: T,
) -> Result<()> {
    let reach = reach_between(src.min, src.max, out_lo, out_hi);
    let rate = kernel_phase_rate(reach, s, mu, hbar) + source_rate;
    let required = points_for_phase_rate(src.span(), rate, MIN_SAMPLES_PER_PERIOD);
    if src.n < required {
        return Err(Error::Resolution {
            axis,
            given: src.n,
            required,
            detail: format!(
                "fewer than {MIN_SAMPLES_PER_PERIOD} samples per period of the integrand phase \
                 (rate {rate} rad per unit)"
            ),
        });
    }
    Ok(())
}

fn source_rates<T: Real>(src: &SampledField<T>) -> (T, T) {
    let peak = src.values.iter().map(|v| v.norm()).fold(T::zero(), T::max);
    let g = src.grid;
    let hx = g.x_axis().step();
    let ht = g.t_axis().step();
    let rate_t = (0..g.n_x)
        .map(|ix| sampled_phase_rate(src.column(ix).iter().copied(), ht, peak))
        .fold(T::zero(), T::max);
    let rate_x = (0..g.n_t)
        .map(|it| sampled_phase_rate((0..g.n_x).map(|ix| src.at(ix, it)), hx, peak))
        .fold(T::zero(), T::max);
    (rate_x, rate_t)
}

fn kernel_matrix<T: Real>(out: &[T], src: &Grid1D<T>, s: T, mu: T, hbar: T) -> Vec<Complex<T>> {
    let w = src.simpson_weights();
    let pts = src.points();
    out.par_iter()
        .flat_map_iter(|&u| {
            pts.iter()
                .zip(&w)
                .map(move |(&ui, &wi)| axis_kernel(u - ui, s, mu, hbar) * wi)
                .collect::<Vec<_>>()
        })
        .collect()
}

// ---------------------------------------------------------------- Schrödinger

/// Evolves a spatial packet over `t_elapsed` under the free Schrödinger kernel.
#[allow(clippy::too_many_arguments)]
pub fn propagate_schrodinger<T: Real>(
    packet: &GaussianSpatialPacket<T>,
    t_elapsed: T,
    mass: T,
    consts: &Constants<T>,
    engine: Engine,
    grid: &Grid1D<T>,
    opts: &QuadratureOptions,
) -> Result<PropagationResult1D<T>> {
    packet.validate()?;
    grid.validate()?;
    if !(t_elapsed >= T::zero()) {
        return Err(Error::domain(format!(
            "elapsed time must be >= 0, got {t_elapsed}"
        )));
    }
    let env = packet.envelope(consts);
    let pts = grid.points();
    let before = env.norm2();
    let values: Vec<Complex<T>> = if t_elapsed == T::zero() {
        pts.iter().map(|&x| env.eval(x)).collect()
    } else {
        match engine {
            Engine::ClosedForm => {
                let out = env.propagate(consts.hbar * t_elapsed / mass);
                pts.iter().map(|&x| out.eval(x)).collect()
            }
            Engine::Quadrature => {
                let src = source_grid_for(
                    &Envelope::Gaussian(env),
                    grid.min,
                    grid.max,
                    t_elapsed,
                    mass,
                    consts.hbar,
                    opts,
                    "x",
                )?;
                let vals: Vec<Complex<T>> = src.points().iter().map(|&x| env.eval(x)).collect();
                quadrature_1d(&src, &vals, &pts, t_elapsed, mass, consts.hbar)
            }
        }
    };
    let after = norm2_1d(grid, &values);
    Ok(PropagationResult1D {
        grid: *grid,
        values,
        norm_drift: drift(before, after),
        engine,
    })
}

// -------------------------------------------------------------------- Floquet

/// Spatial quadrature of each time slice; the output t axis is the source t
/// axis moved forward by `delta_s`.
pub fn floquet_sampled<T: Real>(
    source: &SampledField<T>,
    delta_s: T,
    mass: T,
    consts: &Constants<T>,
    out_x: &Grid1D<T>,
) -> Result<SampledField<T>> {
    if !(delta_s > T::zero()) {
        return Err(Error::domain(format!(
            "Floquet step must be > 0, got {delta_s}"
        )));
    }
    out_x.validate()?;
    let gx = source.grid.x_axis();
    let (rate_x, _) = source_rates(source);
    check_sampled_axis(
        "x",
        &gx,
        rate_x,
        out_x.min,
        out_x.max,
        delta_s,
        mass,
        consts.hbar,
    )?;
    let kx = kernel_matrix(&out_x.points(), &gx, delta_s, mass, consts.hbar);
    let (nxs, nt) = (gx.n, source.grid.n_t);
    let values: Vec<Complex<T>> = (0..out_x.n)
        .into_par_iter()
        .flat_map_iter(|io| {
            let krow = &kx[io * nxs..(io + 1) * nxs];
            (0..nt).map(move |it| {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (ix, k) in krow.iter().enumerate() {
                    acc += k * source.at(ix, it);
                }
                acc
            })
        })
        .collect();
    Ok(SampledField {
        grid: Grid2D::new(*out_x, source.grid.t_axis().translated(delta_s))?,
        values,
        carrier: source.carrier,
    })
}

/// Norm of the unevolved field on a grid that resolves its intensity.
fn input_norm<T: Real>(field: &AnalyticField<T>) -> Result<T> {
    Ok(field.sample(field.auto_grid(cast(8.0), 16)?).norm2())
}

fn spatial_source_grid<T: Real>(
    env: &ComplexGaussian<T>,
    out: &Grid1D<T>,
    s: T,
    mass: T,
    consts: &Constants<T>,
    opts: &QuadratureOptions,
) -> Result<Grid1D<T>> {
    source_grid_for(
        &Envelope::Gaussian(*env),
        out.min,
        out.max,
        s,
        mass,
        consts.hbar,
        opts,
        "x",
    )
}

/// Evolves a space-time packet by `delta_s` under the free Floquet kernel.
#[allow(clippy::too_many_arguments)]
pub fn propagate_floquet<T: Real>(
    packet: &SpacetimePacket<T>,
    delta_s: T,
    mass: T,
    consts: &Constants<T>,
    engine: Engine,
    grid: &Grid2D<T>,
    opts: &QuadratureOptions,
) -> Result<PropagationResult<T>> {
    packet.validate()?;
    grid.validate()?;
    if !(delta_s > T::zero()) {
        return Err(Error::domain(format!(
            "Floquet step must be > 0, got {delta_s}"
        )));
    }
    let field = packet.to_field(consts);
    let (before, mut out) = match engine {
        Engine::ClosedForm => (
            input_norm(&field)?,
            evolve_closed_form(packet, Dynamics::Floquet, delta_s, mass, consts)?.sample(*grid),
        ),
        Engine::Quadrature => {
            let src_t = grid.t_axis().translated(-delta_s);
            let src_x =
                spatial_source_grid(&field.spatial, &grid.x_axis(), delta_s, mass, consts, opts)?;
            let source = field.sample(Grid2D::new(src_x, src_t)?);
            (
                source.norm2(),
                floquet_sampled(&source, delta_s, mass, consts, &grid.x_axis())?,
            )
        }
    };
    out.grid = *grid;
    Ok(PropagationResult {
        norm_drift: drift(before, out.norm2()),
        field: out,
        engine,
    })
}

// --------------------------------------------------------------- Stueckelberg

/// Iterated (x then t) Simpson quadrature of the Stueckelberg kernel against
/// sampled data. The kernel factorizes per axis, so this equals the full 2D
/// tensor-product Simpson sum.
pub fn stueckelberg_sampled<T: Real>(
    source: &SampledField<T>,
    s: T,
    mass: T,
    consts: &Constants<T>,
    out: &Grid2D<T>,
) -> Result<SampledField<T>> {
    if !(s > T::zero()) {
        return Err(Error::domain(format!(
            "Stueckelberg step must be > 0, got {s}"
        )));
    }
    out.validate()?;
    let mu_t = -mass * consts.c * consts.c;
    let gx = source.grid.x_axis();
    let gt = source.grid.t_axis();
    let (rate_x, rate_t) = source_rates(source);
    check_sampled_axis("x", &gx, rate_x, out.x_min, out.x_max, s, mass, consts.hbar)?;
    check_sampled_axis("t", &gt, rate_t, out.t_min, out.t_max, s, mu_t, consts.hbar)?;

    let kx = kernel_matrix(&out.x_axis().points(), &gx, s, mass, consts.hbar);
    let kt = kernel_matrix(&out.t_axis().points(), &gt, s, mu_t, consts.hbar);
    let (nxs, nts) = (gx.n, gt.n);
    let values: Vec<Complex<T>> = (0..out.n_x)
        .into_par_iter()
        .flat_map_iter(|io| {
            let krow = &kx[io * nxs..(io + 1) * nxs];
            let mut partial = vec![Complex::new(T::zero(), T::zero()); nts];
            for (ix, k) in krow.iter().enumerate() {
                for (p, v) in partial.iter_mut().zip(source.column(ix)) {
                    *p += k * v;
                }
            }
            let kt = &kt;
            (0..out.n_t).map(move |jo| {
                let trow = &kt[jo * nts..(jo + 1) * nts];
                let mut acc = Complex::new(T::zero(), T::zero());
                for (k, p) in trow.iter().zip(&partial) {
                    acc += k * p;
                }
                acc
            })
        })
        .collect();
    Ok(SampledField {
        grid: *out,
        values,
        carrier: source.carrier,
    })
}

/// Evolves a space-time packet by `s_elapsed` under the free Stueckelberg kernel.
#[allow(clippy::too_many_arguments)]
pub fn propagate_stueckelberg<T: Real>(
    packet: &SpacetimePacket<T>,
    s_elapsed: T,
    mass: T,
    consts: &Constants<T>,
    engine: Engine,
    grid: &Grid2D<T>,
    opts: &QuadratureOptions,
) -> Result<PropagationResult<T>> {
    packet.validate()?;
    grid.validate()?;
    if !(s_elapsed > T::zero()) {
        return Err(Error::domain(format!(
            "Stueckelberg step must be > 0, got {s_elapsed}"
        )));
    }
    let field = packet.to_field(consts);
    let (before, out) = match engine {
        Engine::ClosedForm => (
            input_norm(&field)?,
            evolve_closed_form(packet, Dynamics::Stueckelberg, s_elapsed, mass, consts)?
                .sample(*grid),
        ),
        Engine::Quadrature => {
            let mu_t = -mass * consts.c * consts.c;
            let src_x = spatial_source_grid(
                &field.spatial,
                &grid.x_axis(),
                s_elapsed,
                mass,
                consts,
                opts,
            )?;
            let src_t = source_grid_for_all(
                &field.temporal,
                grid.t_min,
                grid.t_max,
                s_elapsed,
                mu_t,
                consts.hbar,
                opts,
                "t",
            )?;
            let source = field.sample(Grid2D::new(src_x, src_t)?);
            (
                source.norm2(),
                stueckelberg_sampled(&source, s_elapsed, mass, consts, grid)?,
            )
        }
    };
    Ok(PropagationResult {
        norm_drift: drift(before, out.norm2()),
        field: out,
        engine,
    })
}

/// Closed-form evolution of a packet by parameter `s` (the laboratory time
/// for [`Dynamics::Schrodinger`]). Stueckelberg needs Gaussian gates.
pub fn evolve_closed_form<T: Real>(
    packet: &SpacetimePacket<T>,
    dynamics: Dynamics,
    s: T,
    mass: T,
    consts: &Constants<T>,
) -> Result<AnalyticField<T>> {
    let field = packet.to_field(consts);
    if s == T::zero() {
        return Ok(field);
    }
    let spatial = field.spatial.propagate(consts.hbar * s / mass);
    let temporal = match dynamics {
        Dynamics::Schrodinger | Dynamics::Floquet => {
            field.temporal.iter().map(|e| e.shifted(s)).collect()
        }
        Dynamics::Stueckelberg => {
            let tau_t = -consts.hbar * s / (mass * consts.c * consts.c);
            field
                .temporal
                .iter()
                .map(|e| match e {
                    Envelope::Gaussian(g) => Ok(Envelope::Gaussian(g.propagate(tau_t))),
                    Envelope::Rect(_) => Err(Error::domain(
                        "closed-form Stueckelberg evolution needs Gaussian gates; use the quadrature engine",
                    )),
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(AnalyticField {
        spatial,
        temporal,
        carrier: field.carrier,
    })
}

// ---------------------------------------------------------------- diagnostics

/// Measured drift of the packet centroid against the Hamilton relations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonDiagnostics<T> {
    pub slope_x: T,
    pub slope_t: T,
    pub predicted_slope_x: T,
    pub predicted_slope_t: T,
}

/// Least-squares slopes of the grid centroids `<x>(s)` and `<t>(s)`.
///
/// Predictions: `dx/ds = p0 / M` for all three laws; `dt/ds = E0 / (M c^2)`
/// for Stueckelberg and 1 otherwise.
pub fn hamilton_diagnostics<T: Real>(
    packet: &SpacetimePacket<T>,
    dynamics: Dynamics,
    s_samples: &[T],
    mass: T,
    consts: &Constants<T>,
) -> Result<HamiltonDiagnostics<T>> {
    packet.validate()?;
    if s_samples.len() < 3 {
        return Err(Error::domain(
            "Hamilton diagnostics need at least 3 parameter samples",
        ));
    }
    let mut xs = Vec::with_capacity(s_samples.len());
    let mut ts = Vec::with_capacity(s_samples.len());
    for &s in s_samples {
        let field = evolve_closed_form(packet, dynamics, s, mass, consts)?;
        let grid = field.auto_grid(cast(8.0), 16)?;
        let e = field.sample(grid).expectations(consts.hbar)?;
        xs.push(e.mean_x);
        ts.push(e.mean_t);
    }
    let slope_x = least_squares_slope(s_samples, &xs)?;
    let slope_t = least_squares_slope(s_samples, &ts)?;
    let predicted_slope_t = match dynamics {
        Dynamics::Stueckelberg => packet.mean_energy_e0 / (mass * consts.c * consts.c),
        Dynamics::Schrodinger | Dynamics::Floquet => T::one(),
    };
    let out = HamiltonDiagnostics {
        slope_x,
        slope_t,
        predicted_slope_x: packet.spatial.mean_momentum_p0 / mass,
        predicted_slope_t,
    };
    if !(out.slope_x.is_finite() && out.slope_t.is_finite()) {
        return Err(Error::domain("non-finite Hamilton slope"));
    }
    Ok(out)
}

pub(crate) fn least_squares_slope<T: Real>(s: &[T], y: &[T]) -> Result<T> {
    let n = count::<T>(s.len());
    let ms = s.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (a, b) in s.iter().zip(y) {
        sxx += (*a - ms) * (*a - ms);
        sxy += (*a - ms) * (*b - my);
    }
    if !(sxx > T::zero()) {
        return Err(Error::domain(
            "degenerate parameter samples: all values equal",
        ));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packet::TimeGate;

    fn c1() -> Complex<f64> {
        Complex::new(1.0, 0.0)
    }

    fn k() -> Constants<f64> {
        Constants::natural()
    }

    #[test]
    fn zero_elapsed_is_identity() {
        let p = GaussianSpatialPacket::new(0.3, 1.0, 0.8).unwrap();
        let g = Grid1D::centered(0.0, 8.0, 101).unwrap();
        let r = propagate_schrodinger(
            &p,
            0.0,
            1.0,
            &k(),
            Engine::Quadrature,
            &g,
            &QuadratureOptions::default(),
        )
        .unwrap();
        for (x, v) in g.points().iter().zip(&r.values) {
            assert_eq!(*v, p.evaluate(*x, &k()));
        }
        assert!(propagate_schrodinger(
            &p,
            -1.0,
            1.0,
            &k(),
            Engine::ClosedForm,
            &g,
            &QuadratureOptions::default()
        )
        .is_err());
    }

    #[test]
    fn symmetric_packet_stays_put() {
        let p = GaussianSpatialPacket::new(1.5, 0.7, 0.0).unwrap();
        let g = Grid1D::centered(1.5, 20.0, 801).unwrap();
        for engine in [Engine::ClosedForm, Engine::Quadrature] {
            let r = propagate_schrodinger(
                &p,
                3.0,
                1.0,
                &k(),
                engine,
                &g,
                &QuadratureOptions::default(),
            )
            .unwrap();
            let w = g.simpson_weights();
            let n = r.norm2();
            let mean: f64 = g
                .points()
                .iter()
                .zip(&r.values)
                .zip(&w)
                .map(|((x, v), w)| w * x * v.norm_sqr())
                .sum::<f64>()
                / n;
            assert!((mean - 1.5).abs() < 1e-9 * 0.7);
        }
    }

    #[test]
    fn sampled_source_must_resolve_the_kernel() {
        let p = SpacetimePacket::new(
            GaussianSpatialPacket::new(0.0, 1.0, 0.0).unwrap(),
            vec![TimeGate::gaussian(0.0, 1.0, c1())],
            0.0,
        )
        .unwrap();
        let coarse = Grid2D::new(
            Grid1D::centered(0.0, 8.0, 17).unwrap(),
            Grid1D::centered(0.0, 8.0, 17).unwrap(),
        )
        .unwrap();
        let src = p.to_field(&k()).sample(coarse);
        let out = Grid2D::new(
            Grid1D::centered(0.0, 30.0, 11).unwrap(),
            Grid1D::centered(0.0, 30.0, 11).unwrap(),
        )
        .unwrap();
        match stueckelberg_sampled(&src, 0.5, 1.0, &k(), &out) {
            Err(Error::Resolution {
                required, given, ..
            }) => assert!(required > given),
            other => panic!("expected resolution error, got {other:?}"),
        }
    }

    #[test]
    fn rectangular_gates_need_quadrature_for_stueckelberg() {
        let p = SpacetimePacket::new(
            GaussianSpatialPacket::new(0.0, 1.0, 0.0).unwrap(),
            vec![TimeGate::rectangular(0.0, 1.0, c1())],
            0.0,
        )
        .unwrap();
        assert!(evolve_closed_form(&p, Dynamics::Stueckelberg, 1.0, 1.0, &k()).is_err());
        assert!(evolve_closed_form(&p, Dynamics::Floquet, 1.0, 1.0, &k()).is_ok());
    }

    #[test]
    fn slope_needs_spread_samples() {
        assert!(least_squares_slope(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0]).is_err());
        assert!(
            (least_squares_slope::<f64>(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap() - 2.0).abs()
                < 1e-15
        );
    }
}

//! Point evaluation of the free Schrödinger, Floquet and Stueckelberg
//! propagation kernels.
//!
//! All three are built from one per-axis factor
//!
//! ```text
//! k_mu(u, s) = sqrt(mu / (2 pi i hbar s)) * exp(i mu u^2 / (2 hbar s))
//! ```
//!
//! with `mu = m` on spatial axes and `mu = -M c^2` on the time axis of the
//! Stueckelberg kernel. The square root is pinned to
//! `sqrt(|mu| / (2 pi hbar |s|)) * exp(-i pi/4 * sign(mu s))`, the branch that
//! makes each axis a unitary group with the identity as its `s -> 0` limit.
//! The Stueckelberg kernel is normalized against the `dt` measure, so its
//! time-axis modulus is `sqrt(M c^2 / (2 pi hbar |s|))`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::scalar::{cast, Real};

/// Number of spatial axes, 1 to 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpatialDim(u8);

impl SpatialDim {
    pub const ONE: SpatialDim = SpatialDim(1);
    pub const THREE: SpatialDim = SpatialDim(3);

    pub fn new(d: usize) -> Result<Self> {
        match d {
            1..=3 => Ok(SpatialDim(d as u8)),
            _ => Err(Error::domain(format!(
                "spatial dimension must be 1, 2 or 3, got {d}"
            ))),
        }
    }

    pub fn get(self) -> usize {
        usize::from(self.0)
    }
}

/// A kernel value with the displacement and parameter it was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSample<T> {
    pub value: Complex<T>,
    pub displacement_x: T,
    pub displacement_t: T,
    pub evolution_param: T,
}

/// `sqrt(mu / (2 pi i hbar s))` on the pinned branch.
#[inline]
pub fn axis_prefactor<T: Real>(s: T, mu: T, hbar: T) -> Complex<T> {
    let modulus = (mu.abs() / (T::TAU() * hbar * s.abs())).sqrt();
    let sign = if (mu > T::zero()) == (s > T::zero()) {
        -T::one()
    } else {
        T::one()
    };
    Complex::from_polar(modulus, sign * T::FRAC_PI_4())
}

/// One-axis kernel `k_mu(u, s)`; `s` must be non-zero.
#[inline]
pub fn axis_kernel<T: Real>(u: T, s: T, mu: T, hbar: T) -> Complex<T> {
    axis_prefactor(s, mu, hbar)
        * Complex::from_polar(T::one(), mu * u * u / (cast::<T>(2.0) * hbar * s))
}

fn squared_norm<T: Real>(dx: &[T]) -> Result<(T, SpatialDim)> {
    let d = SpatialDim::new(dx.len())?;
    Ok((dx.iter().fold(T::zero(), |acc, v| acc + *v * *v), d))
}

fn nonzero<T: Real>(s: T, parameter: &'static str) -> Result<()> {
    if s == T::zero() {
        Err(Error::SingularKernel { parameter })
    } else if !s.is_finite() {
        Err(Error::domain(format!("{parameter} must be finite")))
    } else {
        Ok(())
    }
}

/// `(m / (2 pi i hbar t))^(d/2) exp(i m |dx|^2 / (2 hbar t))`, `d = dx.len()`.
pub fn schrodinger_kernel<T: Real>(
    dx: &[T],
    t: T,
    mass: T,
    consts: &Constants<T>,
) -> Result<Complex<T>> {
    nonzero(t, "t")?;
    let (r2, d) = squared_norm(dx)?;
    let pref = axis_prefactor(t, mass, consts.hbar).powu(d.get() as u32);
    Ok(pref * Complex::from_polar(T::one(), mass * r2 / (cast::<T>(2.0) * consts.hbar * t)))
}

/// Floquet kernel `delta(t' - t + s) G(dx, s)`: the delta is returned as the
/// source time it selects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloquetKernel<T> {
    /// Source time `t - s` picked out by the delta constraint.
    pub time_shift: T,
    pub spatial_part: Complex<T>,
}

pub fn floquet_kernel<T: Real>(
    dx: &[T],
    t: T,
    s: T,
    mass: T,
    consts: &Constants<T>,
) -> Result<FloquetKernel<T>> {
    nonzero(s, "s")?;
    Ok(FloquetKernel {
        time_shift: t - s,
        spatial_part: schrodinger_kernel(dx, s, mass, consts)?,
    })
}

/// Stueckelberg kernel `N_d(s) exp(i M (|dx|^2 - c^2 dt^2) / (2 s hbar))`.
pub fn stueckelberg_kernel<T: Real>(
    dx: &[T],
    dt: T,
    s: T,
    mass: T,
    consts: &Constants<T>,
) -> Result<Complex<T>> {
    nonzero(s, "s")?;
    let (r2, d) = squared_norm(dx)?;
    let interval = r2 - consts.c * consts.c * dt * dt;
    Ok(stueckelberg_prefactor(s, mass, d, consts)
        * Complex::from_polar(
            T::one(),
            mass * interval / (cast::<T>(2.0) * s * consts.hbar),
        ))
}

/// `N_d(s)`: one spatial factor per axis and one time factor with `mu = -M c^2`.
pub fn stueckelberg_prefactor<T: Real>(
    s: T,
    mass: T,
    d: SpatialDim,
    consts: &Constants<T>,
) -> Complex<T> {
    axis_prefactor(s, mass, consts.hbar).powu(d.get() as u32)
        * axis_prefactor(s, -mass * consts.c * consts.c, consts.hbar)
}

/// Which kernel an identity-limit check exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Schrodinger,
    Stueckelberg,
}

/// Deviation of `K_s f` from `f` as `s` is halved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityLimitReport<T> {
    pub kind: KernelKind,
    pub s_values: Vec<T>,
    /// Relative L2 deviation `||K_s f - f|| / ||f||` per `s`.
    pub deviations: Vec<T>,
    /// `log2(dev(s) / dev(s/2))` for successive pairs; 1 for first order.
    pub orders: Vec<T>,
}

/// Applies the kernel by quadrature to a Gaussian test packet at
/// `s0, s0/2, ...` (`levels` values) and reports the approach to the identity.
///
/// The test packet is a normalized Gaussian of amplitude width `sigma` on
/// every axis the kernel acts on (x for Schrödinger, x and t for
/// Stueckelberg). `s0 = 0` is surfaced as [`Error::SingularKernel`].
pub fn kernel_identity_limit<T: Real>(
    kind: KernelKind,
    sigma: T,
    s0: T,
    levels: usize,
    mass: T,
    consts: &Constants<T>,
) -> Result<IdentityLimitReport<T>> {
    use crate::envelope::ComplexGaussian;
    use crate::grid::Grid1D;
    use crate::propagation::{quadrature_1d, source_grid_for, QuadratureOptions};

    nonzero(s0, "s")?;
    if levels < 1 {
        return Err(Error::domain("identity limit needs at least one level"));
    }
    let test = ComplexGaussian::normalized(
        T::zero(),
        sigma,
        T::zero(),
        Complex::new(T::one(), T::zero()),
    );
    let axes: Vec<T> = match kind {
        KernelKind::Schrodinger => vec![mass],
        KernelKind::Stueckelberg => vec![mass, -mass * consts.c * consts.c],
    };
    let reach: T = cast(6.0);
    let out = Grid1D::centered(T::zero(), test.amplitude_sigma() * reach, 129)?;
    let opts = QuadratureOptions::default();
    let mut s_values = Vec::with_capacity(levels);
    let mut deviations = Vec::with_capacity(levels);
    let mut s = s0;
    for _ in 0..levels {
        // separable test packet: relative deviation combines per-axis overlaps
        let mut overlap_product = Complex::new(T::one(), T::zero());
        let mut norm_product = T::one();
        for &mu in &axes {
            let src = source_grid_for(
                &crate::envelope::Envelope::Gaussian(test),
                out.min,
                out.max,
                s,
                mu,
                consts.hbar,
                &opts,
                "x",
            )?;
            let src_vals: Vec<Complex<T>> = src.points().iter().map(|&u| test.eval(u)).collect();
            let result = quadrature_1d(&src, &src_vals, &out.points(), s, mu, consts.hbar);
            let w = out.simpson_weights();
            let pts = out.points();
            let mut overlap = Complex::new(T::zero(), T::zero());
            let mut n_out = T::zero();
            for ((wi, ui), r) in w.iter().zip(&pts).zip(&result) {
                overlap += test.eval(*ui).conj() * r * *wi;
                n_out += *wi * r.norm_sqr();
            }
            overlap_product *= overlap;
            norm_product *= n_out;
        }
        // ||g - f||^2 = ||g||^2 + ||f||^2 - 2 Re <f, g>, with ||f|| = 1
        let dev2 = norm_product + T::one() - cast::<T>(2.0) * overlap_product.re;
        s_values.push(s);
        deviations.push(dev2.max(T::zero()).sqrt());
        s /= cast(2.0);
    }
    let orders = deviations
        .windows(2)
        .map(|p| (p[0] / p[1]).ln() / T::LN_2())
        .collect();
    Ok(IdentityLimitReport {
        kind,
        s_values,
        deviations,
        orders,
    })
}

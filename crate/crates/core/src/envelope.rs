//! One-dimensional envelopes: complex Gaussians (closed under free
//! propagation) and rectangular pulses.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::{cast, Real};

/// `amp * exp(-(u - center)^2 / w + i k (u - center))` with `Re w > 0`.
///
/// Free propagation along one axis with kernel
/// `sqrt(mu / (2 pi i hbar s)) exp(i mu (u - u')^2 / (2 hbar s))` maps this
/// family onto itself with `tau = hbar s / mu`:
/// `w -> w + 2 i tau`, `center -> center + k tau`,
/// `amp -> amp sqrt(w) / sqrt(w') exp(i k^2 tau / 2)`.
/// `Re w` never changes, so both principal square roots stay on the same
/// sheet for every `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexGaussian<T> {
    pub amp: Complex<T>,
    pub w: Complex<T>,
    pub center: T,
    pub k: T,
}

impl<T: Real> ComplexGaussian<T> {
    /// Real Gaussian with amplitude standard deviation `sigma`, unit L2 norm
    /// times `scale`.
    pub fn normalized(center: T, sigma: T, k: T, scale: Complex<T>) -> Self {
        let norm = (T::PI() * sigma * sigma).powf(cast(-0.25));
        ComplexGaussian {
            amp: scale * norm,
            w: Complex::new(cast::<T>(2.0) * sigma * sigma, T::zero()),
            center,
            k,
        }
    }

    #[inline]
    pub fn eval(&self, u: T) -> Complex<T> {
        let v = u - self.center;
        let exponent =
            -Complex::new(v * v, T::zero()) / self.w + Complex::new(T::zero(), self.k * v);
        self.amp * exponent.exp()
    }

    /// Exact free evolution over `tau = hbar s / mu`.
    pub fn propagate(&self, tau: T) -> Self {
        let w_new = self.w + Complex::new(T::zero(), cast::<T>(2.0) * tau);
        let phase = Complex::new(T::zero(), self.k * self.k * tau / cast(2.0)).exp();
        ComplexGaussian {
            amp: self.amp * self.w.sqrt() / w_new.sqrt() * phase,
            w: w_new,
            center: self.center + self.k * tau,
            k: self.k,
        }
    }

    /// `Re(1/w)`, the decay rate of the intensity's log.
    fn decay(&self) -> T {
        self.w.inv().re
    }

    /// Integral of `|f|^2` over the real line.
    pub fn norm2(&self) -> T {
        self.amp.norm_sqr() * (T::PI() / (cast::<T>(2.0) * self.decay())).sqrt()
    }

    /// Standard deviation of `|f|^2`.
    pub fn intensity_sigma(&self) -> T {
        (cast::<T>(4.0) * self.decay()).sqrt().recip()
    }

    /// Standard deviation of the amplitude envelope (`sqrt 2` times the intensity one).
    pub fn amplitude_sigma(&self) -> T {
        self.intensity_sigma() * T::SQRT_2()
    }

    /// Upper bound of the local wavenumber on `[center - reach, center + reach]`.
    pub fn max_wavenumber(&self, reach: T) -> T {
        self.k.abs() + cast::<T>(2.0) * reach * self.w.inv().im.abs()
    }

    pub fn shifted(&self, by: T) -> Self {
        ComplexGaussian {
            center: self.center + by,
            ..*self
        }
    }

    pub fn scaled(&self, by: Complex<T>) -> Self {
        ComplexGaussian {
            amp: self.amp * by,
            ..*self
        }
    }
}

/// `amp * exp(i k (u - center))` on `[center - width/2, center + width/2)`, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectPulse<T> {
    pub amp: Complex<T>,
    pub center: T,
    pub width: T,
    pub k: T,
}

impl<T: Real> RectPulse<T> {
    pub fn normalized(center: T, width: T, k: T, scale: Complex<T>) -> Self {
        RectPulse {
            amp: scale / width.sqrt(),
            center,
            width,
            k,
        }
    }

    #[inline]
    pub fn eval(&self, u: T) -> Complex<T> {
        let v = u - self.center;
        let half = self.width / cast(2.0);
        if v >= -half && v < half {
            self.amp * Complex::new(T::zero(), self.k * v).exp()
        } else {
            Complex::new(T::zero(), T::zero())
        }
    }

    pub fn norm2(&self) -> T {
        self.amp.norm_sqr() * self.width
    }

    pub fn shifted(&self, by: T) -> Self {
        RectPulse {
            center: self.center + by,
            ..*self
        }
    }
}

/// Either envelope shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Envelope<T> {
    Gaussian(ComplexGaussian<T>),
    Rect(RectPulse<T>),
}

impl<T: Real> Envelope<T> {
    #[inline]
    pub fn eval(&self, u: T) -> Complex<T> {
        match self {
            Envelope::Gaussian(g) => g.eval(u),
            Envelope::Rect(r) => r.eval(u),
        }
    }

    pub fn center(&self) -> T {
        match self {
            Envelope::Gaussian(g) => g.center,
            Envelope::Rect(r) => r.center,
        }
    }

    pub fn norm2(&self) -> T {
        match self {
            Envelope::Gaussian(g) => g.norm2(),
            Envelope::Rect(r) => r.norm2(),
        }
    }

    /// Interval outside which the envelope is below `exp(-reach^2/2)` of its
    /// peak (Gaussian, `reach` amplitude standard deviations) or exactly zero.
    pub fn support(&self, reach: T) -> (T, T) {
        match self {
            Envelope::Gaussian(g) => {
                let half = g.amplitude_sigma() * reach;
                (g.center - half, g.center + half)
            }
            Envelope::Rect(r) => {
                let half = r.width / cast(2.0);
                (r.center - half, r.center + half)
            }
        }
    }

    /// Smallest feature size: the intensity standard deviation or the box width.
    pub fn feature_width(&self) -> T {
        match self {
            Envelope::Gaussian(g) => g.intensity_sigma(),
            Envelope::Rect(r) => r.width,
        }
    }

    pub fn max_wavenumber(&self, reach: T) -> T {
        match self {
            Envelope::Gaussian(g) => g.max_wavenumber(g.amplitude_sigma() * reach),
            Envelope::Rect(r) => r.k.abs(),
        }
    }

    pub fn shifted(&self, by: T) -> Self {
        match self {
            Envelope::Gaussian(g) => Envelope::Gaussian(g.shifted(by)),
            Envelope::Rect(r) => Envelope::Rect(r.shifted(by)),
        }
    }

    pub fn as_gaussian(&self) -> Option<&ComplexGaussian<T>> {
        match self {
            Envelope::Gaussian(g) => Some(g),
            Envelope::Rect(_) => None,
        }
    }
}

//! Space-time fields: analytic (separable spatial Gaussian times a sum of
//! temporal envelopes) and sampled on a [`Grid2D`].

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::envelope::{ComplexGaussian, Envelope};
use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D};
use crate::scalar::{cast, Real};

/// Plane-wave carrier `exp(i (p0 x - e0 t) / hbar)` shared by a field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Carrier<T> {
    pub p0: T,
    pub e0: T,
}

impl<T: Real> Carrier<T> {
    #[inline]
    pub fn phase(&self, x: T, t: T, hbar: T) -> Complex<T> {
        Complex::new(T::zero(), (self.p0 * x - self.e0 * t) / hbar).exp()
    }
}

/// First and second moments of `|psi|^2` plus mean momentum and energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expectations<T> {
    pub mean_x: T,
    pub mean_t: T,
    pub mean_p: T,
    pub mean_e: T,
    pub sigma_x: T,
    pub sigma_t: T,
}

/// Complex amplitudes on a grid, stored x-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledField<T> {
    pub grid: Grid2D<T>,
    pub values: Vec<Complex<T>>,
    pub carrier: Carrier<T>,
}

impl<T: Real> SampledField<T> {
    /// Samples `f(x, t)` on `grid`; points are independent and filled in parallel.
    pub fn sample<F>(grid: Grid2D<T>, carrier: Carrier<T>, f: F) -> Self
    where
        F: Fn(T, T) -> Complex<T> + Sync,
    {
        let xs = grid.x_axis().points();
        let ts = grid.t_axis().points();
        let values = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(xs[idx / grid.n_t], ts[idx % grid.n_t]))
            .collect();
        SampledField {
            grid,
            values,
            carrier,
        }
    }

    #[inline]
    pub fn at(&self, ix: usize, it: usize) -> Complex<T> {
        self.values[self.grid.index(ix, it)]
    }

    /// The fixed-x column, contiguous in t.
    pub fn column(&self, ix: usize) -> &[Complex<T>] {
        let start = ix * self.grid.n_t;
        &self.values[start..start + self.grid.n_t]
    }

    /// Tensor-product Simpson estimate of the integral of `|psi|^2`.
    pub fn norm2(&self) -> T {
        let wx = self.grid.x_axis().simpson_weights();
        let wt = self.grid.t_axis().simpson_weights();
        let mut total = T::zero();
        for (ix, wxi) in wx.iter().enumerate() {
            let mut row = T::zero();
            for (v, wtj) in self.column(ix).iter().zip(&wt) {
                row += *wtj * v.norm_sqr();
            }
            total += *wxi * row;
        }
        total
    }

    /// `integral |psi(x, t)|^2 dx` for each grid time.
    pub fn temporal_marginal(&self) -> Vec<T> {
        let wx = self.grid.x_axis().simpson_weights();
        let mut out = vec![T::zero(); self.grid.n_t];
        for (ix, wxi) in wx.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(self.column(ix)) {
                *o += *wxi * v.norm_sqr();
            }
        }
        out
    }

    /// Relative L2 distance `||self - other|| / ||other||` on the shared grid.
    pub fn relative_l2(&self, other: &SampledField<T>) -> Result<T> {
        if self.grid != other.grid {
            return Err(Error::domain("relative_l2 needs identical grids"));
        }
        let diff = SampledField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
            carrier: self.carrier,
        };
        Ok((diff.norm2() / other.norm2()).sqrt())
    }

    /// Moments of `|psi|^2`; mean momentum and energy come from the carrier
    /// plus the first derivative moment of the demodulated envelope.
    pub fn expectations(&self, hbar: T) -> Result<Expectations<T>> {
        let gx = self.grid.x_axis();
        let gt = self.grid.t_axis();
        let xs = gx.points();
        let ts = gt.points();
        let wx = gx.simpson_weights();
        let wt = gt.simpson_weights();

        let env: Vec<Complex<T>> = (0..self.grid.len())
            .map(|idx| {
                let (ix, it) = (idx / self.grid.n_t, idx % self.grid.n_t);
                self.values[idx] * self.carrier.phase(xs[ix], ts[it], hbar).conj()
            })
            .collect();

        let mut n = T::zero();
        let (mut sx, mut st, mut sxx, mut stt) = (T::zero(), T::zero(), T::zero(), T::zero());
        let (mut jp, mut je) = (T::zero(), T::zero());
        for ix in 0..self.grid.n_x {
            for it in 0..self.grid.n_t {
                let w = wx[ix] * wt[it];
                let v = env[self.grid.index(ix, it)];
                let rho = w * v.norm_sqr();
                n += rho;
                sx += rho * xs[ix];
                st += rho * ts[it];
                sxx += rho * xs[ix] * xs[ix];
                stt += rho * ts[it] * ts[it];
                let dx = derivative(
                    |i| env[self.grid.index(i, it)],
                    ix,
                    self.grid.n_x,
                    gx.step(),
                );
                let dt = derivative(
                    |j| env[self.grid.index(ix, j)],
                    it,
                    self.grid.n_t,
                    gt.step(),
                );
                jp += w * (v.conj() * dx).im;
                je += w * (v.conj() * dt).im;
            }
        }
        if !(n > T::zero()) {
            return Err(Error::domain("expectations of a field with zero norm"));
        }
        let mean_x = sx / n;
        let mean_t = st / n;
        Ok(Expectations {
            mean_x,
            mean_t,
            mean_p: self.carrier.p0 + hbar * jp / n,
            mean_e: self.carrier.e0 - hbar * je / n,
            sigma_x: (sxx / n - mean_x * mean_x).max(T::zero()).sqrt(),
            sigma_t: (stt / n - mean_t * mean_t).max(T::zero()).sqrt(),
        })
    }
}

/// Fourth-order central difference, falling back to lower order at the edges.
fn derivative<T: Real>(f: impl Fn(usize) -> Complex<T>, i: usize, n: usize, h: T) -> Complex<T> {
    if n < 2 {
        return Complex::new(T::zero(), T::zero());
    }
    if i >= 2 && i + 2 < n {
        (f(i - 2) - f(i - 1) * cast::<T>(8.0) + f(i + 1) * cast::<T>(8.0) - f(i + 2))
            / (h * cast(12.0))
    } else if i >= 1 && i + 1 < n {
        (f(i + 1) - f(i - 1)) / (h * cast(2.0))
    } else if i == 0 {
        (f(1) - f(0)) / h
    } else {
        (f(i) - f(i - 1)) / h
    }
}

/// `spatial(x) * sum_k temporal_k(t)`; carrier phases live inside the envelopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticField<T> {
    pub spatial: ComplexGaussian<T>,
    pub temporal: Vec<Envelope<T>>,
    pub carrier: Carrier<T>,
}

impl<T: Real> AnalyticField<T> {
    #[inline]
    pub fn temporal_sum(&self, t: T) -> Complex<T> {
        self.temporal
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, e| acc + e.eval(t))
    }

    #[inline]
    pub fn eval(&self, x: T, t: T) -> Complex<T> {
        self.spatial.eval(x) * self.temporal_sum(t)
    }

    pub fn sample(&self, grid: Grid2D<T>) -> SampledField<T> {
        SampledField::sample(grid, self.carrier, |x, t| self.eval(x, t))
    }

    /// Range of t containing every temporal term out to `reach` amplitude sigmas.
    pub fn temporal_support(&self, reach: T) -> (T, T) {
        self.temporal
            .iter()
            .map(|e| e.support(reach))
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), (a, b)| {
                (lo.min(a), hi.max(b))
            })
    }

    /// Grid wide enough for the field and fine enough to resolve `|psi|^2`:
    /// `samples` points per intensity standard deviation and per beat period
    /// between temporal terms.
    pub fn auto_grid(&self, reach: T, samples: usize) -> Result<Grid2D<T>> {
        let half_x = self.spatial.amplitude_sigma() * reach;
        let sx = self.spatial.intensity_sigma();
        let nx = odd_points(half_x * cast(2.0), sx / crate::scalar::count(samples));
        let x = Grid1D::centered(self.spatial.center, half_x, nx)?;

        let (lo, hi) = self.temporal_support(reach);
        let mut finest = self
            .temporal
            .iter()
            .map(|e| e.feature_width())
            .fold(T::infinity(), T::min);
        let beat = intensity_beat_rate(&self.temporal, (hi - lo) / cast(2.0));
        if beat > T::zero() {
            finest = finest.min(T::TAU() / beat);
        }
        let nt = odd_points(hi - lo, finest / crate::scalar::count(samples));
        let t = Grid1D::new(lo, hi, nt)?;
        Grid2D::new(x, t)
    }
}

fn odd_points<T: Real>(span: T, step: T) -> usize {
    let n = (span / step).ceil().to_usize().unwrap_or(usize::MAX).max(2) + 1;
    if n.is_multiple_of(2) {
        n + 1
    } else {
        n
    }
}

/// Upper bound on the oscillation rate of cross terms between envelopes.
pub(crate) fn intensity_beat_rate<T: Real>(terms: &[Envelope<T>], reach: T) -> T {
    let mut rate = T::zero();
    for (i, a) in terms.iter().enumerate() {
        for b in &terms[i + 1..] {
            let r = match (a, b) {
                (Envelope::Gaussian(ga), Envelope::Gaussian(gb)) => {
                    let (ia, ib) = (ga.w.inv().im, gb.w.inv().im);
                    (ga.k - gb.k).abs()
                        + cast::<T>(2.0) * ia.abs().max(ib.abs()) * (ga.center - gb.center).abs()
                        + cast::<T>(2.0) * reach * (ia - ib).abs()
                }
                _ => a.max_wavenumber(cast(8.0)) + b.max_wavenumber(cast(8.0)),
            };
            rate = rate.max(r);
        }
    }
    rate
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expectations_of_plain_gaussian() {
        let field = AnalyticField {
            spatial: ComplexGaussian::<f64>::normalized(1.0, 0.8, 2.5, Complex::new(1.0, 0.0)),
            temporal: vec![Envelope::Gaussian(ComplexGaussian::normalized(
                -0.5,
                0.4,
                -3.0,
                Complex::new(1.0, 0.0),
            ))],
            carrier: Carrier { p0: 2.5, e0: 3.0 },
        };
        let grid = field.auto_grid(9.0, 24).unwrap();
        let sampled = field.sample(grid);
        assert!((sampled.norm2() - 1.0).abs() < 1e-10);
        let e = sampled.expectations(1.0).unwrap();
        assert!((e.mean_x - 1.0).abs() < 1e-10);
        assert!((e.mean_t + 0.5).abs() < 1e-10);
        assert!((e.sigma_x - 0.8 / 2f64.sqrt()).abs() < 1e-8);
        assert!((e.sigma_t - 0.4 / 2f64.sqrt()).abs() < 1e-8);
        assert!((e.mean_p - 2.5).abs() < 1e-8);
        assert!((e.mean_e - 3.0).abs() < 1e-8);
    }

    #[test]
    fn envelope_momentum_shows_up_in_mean_p() {
        // envelope carries k = 0.3 beyond the declared carrier
        let field = AnalyticField {
            spatial: ComplexGaussian::<f64>::normalized(0.0, 2.0, 0.3, Complex::new(1.0, 0.0)),
            temporal: vec![Envelope::Gaussian(ComplexGaussian::normalized(
                0.0,
                1.0,
                0.0,
                Complex::new(1.0, 0.0),
            ))],
            carrier: Carrier { p0: 0.0, e0: 0.0 },
        };
        let e = field
            .sample(field.auto_grid(9.0, 24).unwrap())
            .expectations(1.0)
            .unwrap();
        assert!((e.mean_p - 0.3).abs() < 1e-7);
    }

    #[test]
    fn zero_field_has_no_expectations() {
        let grid = Grid2D::new(
            Grid1D::new(0.0, 1.0, 5).unwrap(),
            Grid1D::new(0.0, 1.0, 5).unwrap(),
        )
        .unwrap();
        let f = SampledField::sample(grid, Carrier { p0: 0.0, e0: 0.0 }, |_, _| {
            Complex::new(0.0, 0.0)
        });
        assert!(matches!(f.expectations(1.0), Err(Error::Domain(_))));
    }
}

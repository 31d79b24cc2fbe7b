//! Uniform sampling grids and composite Simpson weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cast, count, Real};

/// Uniform 1D grid of `n` points spanning `[min, max]` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid1D<T> {
    pub min: T,
    pub max: T,
    pub n: usize,
}

impl<T: Real> Grid1D<T> {
    pub fn new(min: T, max: T, n: usize) -> Result<Self> {
        let g = Grid1D { min, max, n };
        g.validate()?;
        Ok(g)
    }

    /// Grid centred on `center` with half-width `half`.
    pub fn centered(center: T, half: T, n: usize) -> Result<Self> {
        Self::new(center - half, center + half, n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::domain(format!("grid needs n >= 2, got {}", self.n)));
        }
        if !(self.max > self.min) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::domain(format!(
                "grid needs finite max > min, got [{}, {}]",
                self.min, self.max
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn step(&self) -> T {
        (self.max - self.min) / count::<T>(self.n - 1)
    }

    #[inline]
    pub fn point(&self, i: usize) -> T {
        // interpolate from both ends so the last point is exactly `max`
        let f = count::<T>(i) / count::<T>(self.n - 1);
        self.min * (T::one() - f) + self.max * f
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    pub fn span(&self) -> T {
        self.max - self.min
    }

    /// Index of the grid point nearest to `x` (clamped to the grid).
    pub fn nearest(&self, x: T) -> usize {
        let f = ((x - self.min) / self.step()).round();
        if f <= T::zero() {
            0
        } else {
            f.to_usize().unwrap_or(usize::MAX).min(self.n - 1)
        }
    }

    pub fn translated(&self, by: T) -> Self {
        Grid1D {
            min: self.min + by,
            max: self.max + by,
            n: self.n,
        }
    }

    pub fn simpson_weights(&self) -> Vec<T> {
        simpson_weights(self.n, self.step())
    }
}

/// Composite Simpson weights for `n` equally spaced samples with step `h`.
///
/// Odd `n` uses the 1-4-2-...-4-1 pattern. Even `n` closes the last three
/// intervals with the 3/8 rule. Two samples fall back to the trapezoid.
pub fn simpson_weights<T: Real>(n: usize, h: T) -> Vec<T> {
    let mut w = vec![T::zero(); n];
    match n {
        0 => {}
        1 => w[0] = T::zero(),
        2 => {
            w[0] = h / cast(2.0);
            w[1] = h / cast(2.0);
        }
        _ => {
            let simpson_end = if n % 2 == 1 { n - 1 } else { n - 4 };
            let third = h / cast(3.0);
            let mut i = 0;
            while i + 2 <= simpson_end {
                w[i] += third;
                w[i + 1] += third * cast(4.0);
                w[i + 2] += third;
                i += 2;
            }
            if n.is_multiple_of(2) {
                let e = h * cast(3.0 / 8.0);
                let s = simpson_end;
                w[s] += e;
                w[s + 1] += e * cast(3.0);
                w[s + 2] += e * cast(3.0);
                w[s + 3] += e;
            }
        }
    }
    w
}

/// Smallest odd point count giving at least `samples_per_period` samples per
/// period of a phase varying at `max_rate` rad per unit over `span`.
pub fn points_for_phase_rate<T: Real>(span: T, max_rate: T, samples_per_period: usize) -> usize {
    let periods = span * max_rate / T::TAU();
    let intervals = (periods * count::<T>(samples_per_period))
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX)
        .max(2);
    let n = intervals.saturating_add(1);
    if n.is_multiple_of(2) {
        n.saturating_add(1)
    } else {
        n
    }
}

/// Space-time rectangle sampled on an `n_x` by `n_t` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid2D<T> {
    pub x_min: T,
    pub x_max: T,
    pub n_x: usize,
    pub t_min: T,
    pub t_max: T,
    pub n_t: usize,
}

impl<T: Real> Grid2D<T> {
    pub fn new(x: Grid1D<T>, t: Grid1D<T>) -> Result<Self> {
        x.validate()?;
        t.validate()?;
        Ok(Self::from_axes(x, t))
    }

    pub(crate) fn from_axes(x: Grid1D<T>, t: Grid1D<T>) -> Self {
        Grid2D {
            x_min: x.min,
            x_max: x.max,
            n_x: x.n,
            t_min: t.min,
            t_max: t.max,
            n_t: t.n,
        }
    }

    pub fn x_axis(&self) -> Grid1D<T> {
        Grid1D {
            min: self.x_min,
            max: self.x_max,
            n: self.n_x,
        }
    }

    pub fn t_axis(&self) -> Grid1D<T> {
        Grid1D {
            min: self.t_min,
            max: self.t_max,
            n: self.n_t,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.x_axis().validate()?;
        self.t_axis().validate()
    }

    pub fn len(&self) -> usize {
        self.n_x * self.n_t
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index; samples are stored x-major so a fixed-x column is contiguous in t.
    #[inline]
    pub fn index(&self, ix: usize, it: usize) -> usize {
        ix * self.n_t + it
    }

    pub fn translated(&self, dx: T, dt: T) -> Self {
        Self::from_axes(self.x_axis().translated(dx), self.t_axis().translated(dt))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(n: usize, f: impl Fn(f64) -> f64) -> f64 {
        let g = Grid1D::new(0.0, 1.0, n).unwrap();
        g.simpson_weights()
            .iter()
            .zip(g.points())
            .map(|(w, x)| w * f(x))
            .sum()
    }

    #[test]
    fn simpson_exact_for_cubics() {
        for n in [3, 4, 5, 6, 7, 10, 11] {
            let v = integrate(n, |x| 4.0 * x * x * x - 3.0 * x * x + 2.0 * x + 1.0);
            assert!((v - 2.0).abs() < 1e-13, "n={n}: {v}");
        }
        assert!((integrate(2, |x| x) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn simpson_converges_on_smooth_functions() {
        let exact = 1.0 - (-1.0f64).exp();
        let v = integrate(101, |x| (-x).exp());
        assert!((v - exact).abs() < 1e-9);
        let v = integrate(100, |x| (-x).exp());
        assert!((v - exact).abs() < 1e-8);
    }

    #[test]
    fn grid_points_and_nearest() {
        let g = Grid1D::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.points(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(g.nearest(0.26), 3);
        assert_eq!(g.nearest(-7.0), 0);
        assert_eq!(g.nearest(7.0), 4);
        assert!(Grid1D::new(0.0, 1.0, 1).is_err());
        assert!(Grid1D::new(1.0, 1.0, 3).is_err());
    }

    #[test]
    fn phase_rate_rule() {
        // 10 periods at 8 samples per period -> 80 intervals -> 81 points
        let n = points_for_phase_rate(10.0 * std::f64::consts::TAU, 1.0, 8);
        assert_eq!(n, 81);
        assert_eq!(points_for_phase_rate(1.0, 1e-9, 8) % 2, 1);
    }

    #[test]
    fn f32_weights_sum_to_span() {
        let g = Grid1D::<f32>::new(0.0, 2.0, 9).unwrap();
        let s: f32 = g.simpson_weights().iter().sum();
        assert!((s - 2.0).abs() < 1e-6);
    }
}

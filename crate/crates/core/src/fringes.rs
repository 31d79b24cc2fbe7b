//! Peak analysis of arrival-time intensity traces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeReport {
    /// Refined peak positions inside the central window, ascending.
    pub peak_times: Vec<f64>,
    /// Median gap between adjacent peaks.
    pub spacing_t: f64,
    pub spacing_t_predicted: Option<f64>,
    /// `(I_max - I_min) / (I_max + I_min)` over the central window.
    pub visibility: f64,
    /// `|spacing_t - predicted| / predicted`.
    pub relative_error: Option<f64>,
    pub window: (f64, f64),
}

/// Intensity-weighted mean and standard deviation of a sampled trace
/// (trapezoid weights, so non-uniform times are fine).
pub fn trace_moments(times: &[f64], intensity: &[f64]) -> Result<(f64, f64)> {
    let n = times.len();
    if n < 2 {
        return Err(Error::domain("moments need at least two samples"));
    }
    let mut total = 0.0;
    let mut first = 0.0;
    let mut second = 0.0;
    for i in 0..n {
        let lo = if i == 0 { times[0] } else { times[i - 1] };
        let hi = if i + 1 == n {
            times[n - 1]
        } else {
            times[i + 1]
        };
        let w = 0.5 * (hi - lo) * intensity[i];
        total += w;
        first += w * times[i];
        second += w * times[i] * times[i];
    }
    if !(total > 0.0) {
        return Err(Error::NoFringes { found: 0 });
    }
    let mean = first / total;
    let var = (second / total - mean * mean).max(0.0);
    Ok((mean, var.sqrt()))
}

/// Half-width of the central window in envelope standard deviations.
pub const CENTRAL_WINDOW_SIGMAS: f64 = 1.5;

fn validate(times: &[f64], intensity: &[f64], threshold_fraction: f64) -> Result<()> {
    if times.is_empty() {
        return Err(Error::domain("empty trace"));
    }
    if times.len() != intensity.len() {
        return Err(Error::domain(format!(
            "trace has {} times but {} intensities",
            times.len(),
            intensity.len()
        )));
    }
    if !(threshold_fraction > 0.0 && threshold_fraction < 1.0) {
        return Err(Error::domain(format!(
            "threshold_fraction must lie in (0, 1), got {threshold_fraction}"
        )));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("trace times must be strictly increasing"));
    }
    if intensity.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::domain(
            "trace intensities must be finite and non-negative",
        ));
    }
    Ok(())
}

/// Index ranges `[start, end]` of local maxima. A plateau counts once and is
/// reported by its leftmost sample; trace endpoints never count.
fn local_maxima(y: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < y.len() {
        if y[i] > y[i - 1] {
            let mut j = i;
            while j + 1 < y.len() && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < y.len() && y[j + 1] < y[i] {
                out.push((i, j));
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Vertex of the parabola through three neighbours; plain sample time for plateaus.
fn refine(times: &[f64], y: &[f64], start: usize, end: usize) -> f64 {
    if start != end {
        return times[start];
    }
    let (a, b, c) = (y[start - 1], y[start], y[start + 1]);
    let denom = a - 2.0 * b + c;
    if denom >= 0.0 {
        return times[start];
    }
    let delta = 0.5 * (a - c) / denom;
    let h = if delta < 0.0 {
        times[start] - times[start - 1]
    } else {
        times[start + 1] - times[start]
    };
    times[start] + delta * h
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Finds fringe peaks above `threshold_fraction * max(intensity)` inside the
/// central window `|t - <t>| <= 1.5 sigma_t`.
pub fn find_fringes(
    times: &[f64],
    intensity: &[f64],
    threshold_fraction: f64,
    predicted_spacing: Option<f64>,
) -> Result<FringeReport> {
    validate(times, intensity, threshold_fraction)?;
    let (mean, sigma) = trace_moments(times, intensity)?;
    let lo = mean - CENTRAL_WINDOW_SIGMAS * sigma;
    let hi = mean + CENTRAL_WINDOW_SIGMAS * sigma;
    let peak = intensity.iter().copied().fold(0.0, f64::max);
    let threshold = threshold_fraction * peak;

    let peak_times: Vec<f64> = local_maxima(intensity)
        .into_iter()
        .filter(|&(i, _)| intensity[i] > threshold && times[i] >= lo && times[i] <= hi)
        .map(|(i, j)| refine(times, intensity, i, j))
        .collect();
    if peak_times.len() < 2 {
        return Err(Error::NoFringes {
            found: peak_times.len(),
        });
    }
    let spacing_t = median(peak_times.windows(2).map(|w| w[1] - w[0]).collect());

    let (mut i_max, mut i_min) = (f64::NEG_INFINITY, f64::INFINITY);
    for (t, v) in times.iter().zip(intensity) {
        if *t >= lo && *t <= hi {
            i_max = i_max.max(*v);
            i_min = i_min.min(*v);
        }
    }
    let visibility = if i_max + i_min > 0.0 {
        (i_max - i_min) / (i_max + i_min)
    } else {
        0.0
    };
    let relative_error = predicted_spacing.map(|p| (spacing_t - p).abs() / p);
    Ok(FringeReport {
        peak_times,
        spacing_t,
        spacing_t_predicted: predicted_spacing,
        visibility,
        relative_error,
        window: (lo, hi),
    })
}

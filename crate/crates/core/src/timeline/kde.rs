//! Gaussian kernel density of revision activity over time.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{RevisionTimeline, Timestamp};
use crate::error::{Error, Result};

/// Number of evaluation points in every density grid.
pub const GRID_POINTS: usize = 512;

/// Grid half-width beyond the first and last revision, in bandwidths.
const GRID_MARGIN: f64 = 3.0;

/// Smallest bandwidth as a fraction of the timeline span. Keeps
/// grid spacing below 1.5 bandwidths so the sampled curve integrates to 1.
const MIN_BANDWIDTH_SPAN_FRACTION: f64 = 1.0 / 700.0;

/// Bandwidth used when the spread of the sample is zero.
const FALLBACK_BANDWIDTH_DAYS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Bandwidth {
    /// Silverman's rule of thumb.
    #[default]
    Auto,
    /// Fixed kernel width in days.
    Days(f64),
}

/// Density sampled on an even grid. Positions are in days since `origin`
/// (the first revision); density is per day.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DensityGrid {
    pub origin: Timestamp,
    pub bandwidth_days: f64,
    pub days: Vec<f64>,
    pub density: Vec<f64>,
}

impl DensityGrid {
    pub fn step(&self) -> f64 {
        if self.days.len() < 2 {
            0.0
        } else {
            self.days[1] - self.days[0]
        }
    }

    pub fn max_density(&self) -> f64 {
        self.density.iter().copied().fold(0.0, f64::max)
    }

    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        self.days
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0)
            .sum()
    }

    pub fn instant_at(&self, days: f64) -> Timestamp {
        Timestamp::from_days_since(self.origin, days)
    }
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `1.06 * min(sd, IQR / 1.34) * n^(-1/5)`, falling back to the standard
/// deviation when the IQR is zero. `None` when the sample has no spread.
pub fn silverman_bandwidth(samples: &[f64]) -> Option<f64> {
    let n = samples.len();
    if n < 2 {
        return None;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    let sd = libm::sqrt(var);
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let mut spread = sd.min(iqr / 1.34);
    if spread <= 0.0 {
        spread = sd;
    }
    (spread > 0.0).then(|| 1.06 * spread * libm::pow(n as f64, -0.2))
}

/// Explicit bandwidths must also respect the span floor; a narrower kernel
/// would fall between grid points.
fn resolve_bandwidth(samples: &[f64], bandwidth: Bandwidth) -> Result<f64> {
    let span = samples.last().copied().unwrap_or(0.0) - samples.first().copied().unwrap_or(0.0);
    let floor = span * MIN_BANDWIDTH_SPAN_FRACTION;
    match bandwidth {
        Bandwidth::Days(h) if !(h.is_finite() && h > 0.0) => {
            Err(Error::argument(format!("bandwidth must be finite and positive, got {h}")))
        }
        Bandwidth::Days(h) if h < floor => Err(Error::argument(format!(
            "bandwidth {h} days is below {floor:.4} days, too narrow for a {GRID_POINTS}-point grid over this timeline"
        ))),
        Bandwidth::Days(h) => Ok(h),
        Bandwidth::Auto => {
            Ok(match silverman_bandwidth(samples) {
                Some(h) => h.max(floor),
                None => FALLBACK_BANDWIDTH_DAYS,
            })
        }
    }
}

/// Gaussian KDE of the timeline's revision instants on a
/// [`GRID_POINTS`]-point grid spanning `[first - 3h, last + 3h]`.
pub fn kde_density(timeline: &RevisionTimeline, bandwidth: Bandwidth) -> Result<DensityGrid> {
    let samples = timeline.day_offsets();
    let h = resolve_bandwidth(&samples, bandwidth)?;
    let lo = -GRID_MARGIN * h;
    let hi = samples[samples.len() - 1] + GRID_MARGIN * h;
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let norm = 1.0 / (samples.len() as f64 * h * libm::sqrt(2.0 * PI));

    let days: Vec<f64> = (0..GRID_POINTS).map(|i| lo + step * i as f64).collect();
    let density = days
        .iter()
        .map(|&x| {
            norm * samples
                .iter()
                .map(|&s| {
                    let z = (x - s) / h;
                    libm::exp(-0.5 * z * z)
                })
                .sum::<f64>()
        })
        .collect();

    Ok(DensityGrid {
        origin: timeline.first(),
        bandwidth_days: h,
        days,
        density,
    })
}

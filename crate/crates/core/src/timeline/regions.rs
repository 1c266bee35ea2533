//! Dense regions of revision activity and their position in the timeline.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{kde_density, Bandwidth, DensityGrid, RevisionTimeline, Timestamp};
use crate::corpus::Label;
use crate::error::{Error, Result};

/// A maximal interval where density stays at or above the threshold.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DenseRegion {
    pub start: Timestamp,
    pub end: Timestamp,
    /// Peak density inside the region over the article's peak density.
    pub normalized_density: f64,
    pub revision_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegionParams {
    pub bandwidth: Bandwidth,
    pub threshold_ratio: f64,
}

impl Default for RegionParams {
    fn default() -> Self {
        Self {
            bandwidth: Bandwidth::Auto,
            threshold_ratio: 0.5,
        }
    }
}

fn check_threshold(threshold_ratio: f64) -> Result<()> {
    if !(threshold_ratio > 0.0 && threshold_ratio < 1.0) {
        return Err(Error::argument(format!("threshold ratio must lie in (0, 1), got {threshold_ratio}")));
    }
    Ok(())
}

/// Position where the linear interpolant between grid points `a` and `b`
/// reaches `level`.
fn crossing(grid: &DensityGrid, a: usize, b: usize, level: f64) -> f64 {
    let (ya, yb) = (grid.density[a], grid.density[b]);
    let (xa, xb) = (grid.days[a], grid.days[b]);
    if yb == ya {
        return xa;
    }
    xa + (level - ya) / (yb - ya) * (xb - xa)
}

/// Thresholds `grid` at `threshold_ratio * max` and returns the maximal
/// runs above it. Region edges are the linear-interpolated threshold
/// crossings (or the grid ends), so a higher threshold always yields
/// regions nested inside those of a lower one.
pub fn dense_regions(grid: &DensityGrid, threshold_ratio: f64, timeline: &RevisionTimeline) -> Result<Vec<DenseRegion>> {
    check_threshold(threshold_ratio)?;
    let n = grid.density.len();
    if n == 0 || grid.days.len() != n {
        return Err(Error::argument("empty or malformed density grid"));
    }
    let max = grid.max_density();
    if max <= 0.0 {
        return Err(Error::argument("density grid has no mass"));
    }
    let level = threshold_ratio * max;

    let mut regions = Vec::new();
    let mut i = 0;
    while i < n {
        if grid.density[i] < level {
            i += 1;
            continue;
        }
        let first = i;
        while i + 1 < n && grid.density[i + 1] >= level {
            i += 1;
        }
        let last = i;
        i += 1;

        let start_days = if first == 0 { grid.days[0] } else { crossing(grid, first - 1, first, level) };
        let end_days = if last + 1 == n { grid.days[n - 1] } else { crossing(grid, last, last + 1, level) };
        let start = grid.instant_at(start_days);
        let mut end = grid.instant_at(end_days);
        if end <= start {
            end = Timestamp(start.0 + 1);
        }
        let peak = grid.density[first..=last].iter().copied().fold(0.0, f64::max);
        let revision_count = timeline.timestamps().iter().filter(|t| **t >= start && **t <= end).count();
        regions.push(DenseRegion {
            start,
            end,
            normalized_density: peak / max,
            revision_count,
        });
    }
    Ok(regions)
}

/// Share of an article's dense regions touching each quarter of its span.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuartileDistribution {
    pub q: [f64; 4],
}

/// Cuts `[first, last]` into four equal parts and reports, per part, the
/// fraction of regions overlapping it. A region overlapping several parts
/// counts in each; regions reaching past either end of the timeline count
/// toward the outer quartile.
pub fn quartile_distribution(regions: &[DenseRegion], timeline: &RevisionTimeline) -> Result<QuartileDistribution> {
    let span = timeline.span_seconds();
    if span <= 0 {
        return Err(Error::domain(format!("timeline {} has zero span", timeline.article_id())));
    }
    if regions.is_empty() {
        return Ok(QuartileDistribution { q: [0.0; 4] });
    }
    let first = timeline.first().0 as f64;
    let bound = |i: usize| match i {
        0 => f64::NEG_INFINITY,
        4 => f64::INFINITY,
        _ => first + span as f64 * i as f64 / 4.0,
    };
    let mut hits = [0usize; 4];
    for r in regions {
        let (s, e) = (r.start.0 as f64, r.end.0 as f64);
        for (i, hit) in hits.iter_mut().enumerate() {
            if s < bound(i + 1) && e > bound(i) {
                *hit += 1;
            }
        }
    }
    let total = regions.len() as f64;
    Ok(QuartileDistribution {
        q: hits.map(|h| h as f64 / total),
    })
}

/// Element-wise mean; `None` for an empty slice.
pub fn mean_quartiles(dists: &[QuartileDistribution]) -> Option<QuartileDistribution> {
    if dists.is_empty() {
        return None;
    }
    let mut q = [0.0; 4];
    for d in dists {
        for (acc, v) in q.iter_mut().zip(d.q) {
            *acc += v;
        }
    }
    Some(QuartileDistribution {
        q: q.map(|v| v / dists.len() as f64),
    })
}

/// Fraction of the timeline's revisions that fall inside any dense region.
pub fn revisions_in_regions(timeline: &RevisionTimeline, params: &RegionParams) -> Result<f64> {
    let grid = kde_density(timeline, params.bandwidth)?;
    let regions = dense_regions(&grid, params.threshold_ratio, timeline)?;
    let inside = timeline
        .timestamps()
        .iter()
        .filter(|t| regions.iter().any(|r| **t >= r.start && **t <= r.end))
        .count();
    Ok(inside as f64 / timeline.timestamps().len() as f64)
}

/// Per-label histogram of in-region revision fractions over `[0, 1]`,
/// each label's bins summing to 1 (all zeros for an absent label).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LabelHistogram {
    pub edges: Vec<f64>,
    pub hoax: Vec<f64>,
    pub legitimate: Vec<f64>,
    pub hoax_articles: usize,
    pub legitimate_articles: usize,
}

pub fn density_histogram(timelines: &[RevisionTimeline], bins: usize, params: &RegionParams) -> Result<LabelHistogram> {
    if timelines.is_empty() {
        return Err(Error::argument("no timelines"));
    }
    if bins < 2 {
        return Err(Error::argument(format!("need at least 2 bins, got {bins}")));
    }
    check_threshold(params.threshold_ratio)?;
    let mut counts = [vec![0usize; bins], vec![0usize; bins]];
    for t in timelines {
        let f = revisions_in_regions(t, params)?;
        let idx = ((f * bins as f64) as usize).min(bins - 1);
        counts[t.label().as_u8() as usize][idx] += 1;
    }
    let normalize = |c: &[usize]| -> Vec<f64> {
        let total: usize = c.iter().sum();
        c.iter().map(|&v| if total == 0 { 0.0 } else { v as f64 / total as f64 }).collect()
    };
    let [legit, hoax] = &counts;
    Ok(LabelHistogram {
        edges: (0..=bins).map(|i| i as f64 / bins as f64).collect(),
        hoax: normalize(hoax),
        legitimate: normalize(legit),
        hoax_articles: hoax.iter().sum(),
        legitimate_articles: legit.iter().sum(),
    })
}

impl LabelHistogram {
    pub fn for_label(&self, label: Label) -> &[f64] {
        match label {
            Label::Hoax => &self.hoax,
            Label::Legitimate => &self.legitimate,
        }
    }
}

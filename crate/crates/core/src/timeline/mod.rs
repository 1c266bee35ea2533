//! Revision-timeline forensics.
//!
//! A [`RevisionTimeline`] is the sorted list of edit instants of one
//! article. From it we derive monthly count series (for changepoint
//! detection), a kernel density over time (for dense regions), and the
//! per-quartile distribution of those regions.

mod bocpd;
mod calendar;
mod kde;
mod regions;
mod series;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

pub use bocpd::{bocpd, ChangepointSet, GammaPoissonPrior, DEFAULT_HAZARD_LAMBDA};
pub use calendar::{Timestamp, YearMonth, SECONDS_PER_DAY};
pub use kde::{kde_density, silverman_bandwidth, Bandwidth, DensityGrid, GRID_POINTS};
pub use regions::{
    dense_regions, density_histogram, mean_quartiles, quartile_distribution, revisions_in_regions,
    DenseRegion, LabelHistogram, QuartileDistribution, RegionParams,
};
pub use series::{bin_by_month, MonthSeries};

use crate::corpus::Label;
use crate::error::{Error, Result};

/// Ordered revision instants of one article.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevisionTimeline {
    article_id: String,
    label: Label,
    timestamps: Vec<Timestamp>,
}

impl RevisionTimeline {
    /// Validates that `timestamps` is non-empty and non-decreasing.
    pub fn new(article_id: impl Into<String>, label: Label, timestamps: Vec<Timestamp>) -> Result<Self> {
        let article_id = article_id.into();
        if timestamps.is_empty() {
            return Err(Error::validation(format!("timeline {article_id}: no revisions")));
        }
        if let Some(i) = timestamps.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::validation(format!(
                "timeline {article_id}: revision {} precedes revision {i}",
                i + 1
            )));
        }
        Ok(Self {
            article_id,
            label,
            timestamps,
        })
    }

    /// Sorts `timestamps` before validating.
    pub fn from_unsorted(article_id: impl Into<String>, label: Label, mut timestamps: Vec<Timestamp>) -> Result<Self> {
        timestamps.sort_unstable();
        Self::new(article_id, label, timestamps)
    }

    pub fn article_id(&self) -> &str {
        &self.article_id
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn timestamps(&self) -> &[Timestamp] {
        &self.timestamps
    }

    pub fn first(&self) -> Timestamp {
        self.timestamps[0]
    }

    pub fn last(&self) -> Timestamp {
        self.timestamps[self.timestamps.len() - 1]
    }

    /// `last - first` in seconds.
    pub fn span_seconds(&self) -> i64 {
        self.last().0 - self.first().0
    }

    /// Revision offsets from the first revision, in fractional days.
    pub fn day_offsets(&self) -> Vec<f64> {
        let origin = self.first();
        self.timestamps.iter().map(|t| t.days_since(origin)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn timeline_validation() {
        assert!(RevisionTimeline::new("a", Label::Hoax, vec![]).is_err());
        assert!(RevisionTimeline::new("a", Label::Hoax, vec![Timestamp(5), Timestamp(4)]).is_err());
        let t = RevisionTimeline::from_unsorted("a", Label::Hoax, vec![Timestamp(5), Timestamp(4)]).unwrap();
        assert_eq!(t.span_seconds(), 1);
        let t = RevisionTimeline::new("a", Label::Hoax, vec![Timestamp(0), Timestamp(0), Timestamp(86_400)]).unwrap();
        assert_eq!(t.day_offsets(), [0.0, 0.0, 1.0]);
    }
}

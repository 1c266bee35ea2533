use alloc::vec;
use alloc::vec::Vec;

use super::{RevisionTimeline, YearMonth};

/// Revision counts per consecutive calendar month, from the month of the
/// first revision through the month of the last.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MonthSeries {
    pub start_month: YearMonth,
    pub counts: Vec<u64>,
}

impl MonthSeries {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Calendar month of position `i`.
    pub fn month_at(&self, i: usize) -> YearMonth {
        self.start_month.offset(i as i64)
    }
}

pub fn bin_by_month(timeline: &RevisionTimeline) -> MonthSeries {
    let start_month = timeline.first().year_month();
    let len = (timeline.last().year_month().index() - start_month.index() + 1) as usize;
    let mut counts = vec![0u64; len];
    for t in timeline.timestamps() {
        counts[(t.year_month().index() - start_month.index()) as usize] += 1;
    }
    MonthSeries { start_month, counts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Label;
    use crate::timeline::Timestamp;

    #[test]
    fn interior_gaps_are_zero() {
        let t = RevisionTimeline::new(
            "a",
            Label::Hoax,
            vec![
                Timestamp::from_civil(2020, 1, 5, 0, 0, 0),
                Timestamp::from_civil(2020, 1, 20, 0, 0, 0),
                Timestamp::from_civil(2020, 3, 1, 0, 0, 0),
            ],
        )
        .unwrap();
        let s = bin_by_month(&t);
        assert_eq!(s.start_month, YearMonth { year: 2020, month: 1 });
        assert_eq!(s.counts, [2, 0, 1]);
        assert_eq!(s.month_at(2), YearMonth { year: 2020, month: 3 });
    }

    #[test]
    fn single_revision() {
        let t = RevisionTimeline::new("a", Label::Hoax, vec![Timestamp(0)]).unwrap();
        assert_eq!(bin_by_month(&t).counts, [1]);
    }

    #[test]
    fn year_boundary() {
        let t = RevisionTimeline::new(
            "a",
            Label::Legitimate,
            vec![
                Timestamp::from_civil(2019, 12, 31, 23, 59, 59),
                Timestamp::from_civil(2020, 1, 1, 0, 0, 0),
            ],
        )
        .unwrap();
        assert_eq!(bin_by_month(&t).counts, [1, 1]);
    }
}

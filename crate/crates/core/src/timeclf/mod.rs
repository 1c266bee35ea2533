//! Timeline classifier: one `MM-YYYY` token per revision, TF-IDF weighted
//! and fed to a linear max-margin model.

mod svm;
mod tfidf;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use svm::{objective, predict, score, train_svm, train_svm_traced, LinearModel, TrainConfig};
pub use tfidf::{fit_tfidf, transform, SparseVector, TfidfModel};

use crate::corpus::{stratified_partition, Label, RatioSetting};
use crate::error::{Error, Result};
use crate::eval::{evaluate, EvalReport};
use crate::timeline::RevisionTimeline;

/// Month tokens of one article's revisions, in revision order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonthTokenDoc {
    pub article_id: String,
    pub tokens: Vec<String>,
}

pub fn month_tokens(timeline: &RevisionTimeline) -> MonthTokenDoc {
    MonthTokenDoc {
        article_id: timeline.article_id().into(),
        tokens: timeline.timestamps().iter().map(|t| t.year_month().to_string()).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentConfig {
    pub test_fraction: f64,
    pub train: TrainConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            test_fraction: 0.3,
            train: TrainConfig::default(),
        }
    }
}

/// Everything one timeline experiment produced.
#[derive(Debug, Clone)]
pub struct TimelineExperiment {
    pub report: EvalReport,
    pub tfidf: TfidfModel,
    pub model: LinearModel,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
    /// Legitimate timelines left out to reach the ratio.
    pub unused_negatives: usize,
}

/// Keeps every hoax and at most `k` legitimate timelines per hoax, chosen
/// by a seeded shuffle of the id-sorted negatives.
pub fn select_for_ratio(timelines: &[RevisionTimeline], ratio: RatioSetting, seed: u64) -> (Vec<&RevisionTimeline>, usize) {
    let mut hoaxes: Vec<&RevisionTimeline> = timelines.iter().filter(|t| t.label() == Label::Hoax).collect();
    let mut negatives: Vec<&RevisionTimeline> = timelines.iter().filter(|t| t.label() == Label::Legitimate).collect();
    negatives.sort_by(|a, b| a.article_id().cmp(b.article_id()));
    let cap = hoaxes.len() * ratio.negatives_per_hoax();
    let mut unused = 0;
    if negatives.len() > cap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6e65_6761_7469_7665);
        negatives.shuffle(&mut rng);
        unused = negatives.len() - cap;
        negatives.truncate(cap);
    }
    hoaxes.extend(negatives);
    (hoaxes, unused)
}

/// Split, fit TF-IDF on the training side only, train, and score the test
/// side. A pure function of its arguments.
pub fn run_timeline_experiment(
    timelines: &[RevisionTimeline],
    ratio: RatioSetting,
    seed: u64,
    config: &ExperimentConfig,
) -> Result<TimelineExperiment> {
    let ids: BTreeSet<&str> = timelines.iter().map(|t| t.article_id()).collect();
    if ids.len() != timelines.len() {
        return Err(Error::validation("duplicate article ids among timelines"));
    }
    let (selected, unused_negatives) = select_for_ratio(timelines, ratio, seed);
    let items: Vec<(&str, Label)> = selected.iter().map(|t| (t.article_id(), t.label())).collect();
    let (train_ids, test_ids) = stratified_partition(&items, config.test_fraction, seed)?;

    let lookup = |ids: &[String]| -> Vec<&RevisionTimeline> {
        let wanted: BTreeSet<&str> = ids.iter().map(String::as_str).collect();
        let mut v: Vec<&RevisionTimeline> = selected.iter().copied().filter(|t| wanted.contains(t.article_id())).collect();
        v.sort_by(|a, b| a.article_id().cmp(b.article_id()));
        v
    };
    let train = lookup(&train_ids);
    let test = lookup(&test_ids);

    let train_docs: Vec<MonthTokenDoc> = train.iter().map(|t| month_tokens(t)).collect();
    let tfidf = fit_tfidf(&train_docs)?;
    let xs: Vec<SparseVector> = train_docs.iter().map(|d| transform(&tfidf, d)).collect();
    let ys: Vec<Label> = train.iter().map(|t| t.label()).collect();
    let train_config = TrainConfig { seed, ..config.train };
    let model = train_svm(&xs, &ys, &train_config)?;

    let mut predictions = Vec::with_capacity(test.len());
    for t in &test {
        predictions.push(predict(&model, &transform(&tfidf, &month_tokens(t)))?);
    }
    let gold: Vec<Label> = test.iter().map(|t| t.label()).collect();
    let report = evaluate(format!("{ratio}"), &predictions, &gold)?;

    Ok(TimelineExperiment {
        report,
        tfidf,
        model,
        train_ids,
        test_ids,
        unused_negatives,
    })
}

//! Labeled articles, text views and reproducible stratified splits.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::stylometry::sentence_spans;

/// Class label. Hoax is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Legitimate = 0,
    Hoax = 1,
}

impl Label {
    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn from_u8(v: u8) -> Option<Label> {
        match v {
            0 => Some(Label::Legitimate),
            1 => Some(Label::Hoax),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Hoax => "hoax",
            Label::Legitimate => "legitimate",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "hoax" => Ok(Label::Hoax),
            "0" | "legitimate" | "real" => Ok(Label::Legitimate),
            other => Err(Error::validation(alloc::format!("unknown label {other:?}"))),
        }
    }
}

#[cfg(feature = "serde")]
mod label_serde {
    use super::Label;
    use core::fmt;
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};

    impl serde::Serialize for Label {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_u8(self.as_u8())
        }
    }

    struct LabelVisitor;

    impl Visitor<'_> for LabelVisitor {
        type Value = Label;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("0, 1, \"hoax\" or \"legitimate\"")
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<Label, E> {
            u8::try_from(v)
                .ok()
                .and_then(Label::from_u8)
                .ok_or_else(|| E::custom(alloc::format!("label must be 0 or 1, got {v}")))
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<Label, E> {
            u64::try_from(v)
                .map_err(|_| E::custom(alloc::format!("label must be 0 or 1, got {v}")))
                .and_then(|v| self.visit_u64(v))
        }

        fn visit_bool<E: de::Error>(self, v: bool) -> Result<Label, E> {
            Ok(if v { Label::Hoax } else { Label::Legitimate })
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<Label, E> {
            v.parse().map_err(E::custom)
        }
    }

    impl<'de> serde::Deserialize<'de> for Label {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Label, D::Error> {
            d.deserialize_any(LabelVisitor)
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Source {
    WikipediaLive,
    ArchiveImport,
    #[default]
    Unknown,
}

/// One labeled Wikipedia page.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Article {
    pub id: String,
    pub title: String,
    pub text: String,
    pub label: Label,
    #[cfg_attr(feature = "serde", serde(default))]
    pub source: Source,
}

impl Article {
    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::validation("empty id"));
        }
        if self.text.trim().is_empty() {
            return Err(Error::validation(alloc::format!("article {}: empty text", self.id)));
        }
        Ok(())
    }
}

/// Number of legitimate negatives retrieved per hoax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RatioSetting {
    OneToTwo,
    OneToTen,
    OneToHundred,
}

impl RatioSetting {
    pub const ALL: [RatioSetting; 3] = [
        RatioSetting::OneToTwo,
        RatioSetting::OneToTen,
        RatioSetting::OneToHundred,
    ];

    pub fn negatives_per_hoax(self) -> usize {
        match self {
            RatioSetting::OneToTwo => 2,
            RatioSetting::OneToTen => 10,
            RatioSetting::OneToHundred => 100,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RatioSetting::OneToTwo => "1H2R",
            RatioSetting::OneToTen => "1H10R",
            RatioSetting::OneToHundred => "1H100R",
        }
    }
}

impl fmt::Display for RatioSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RatioSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1h2r" | "2" => Ok(RatioSetting::OneToTwo),
            "1h10r" | "10" => Ok(RatioSetting::OneToTen),
            "1h100r" | "100" => Ok(RatioSetting::OneToHundred),
            other => Err(Error::argument(alloc::format!(
                "unknown ratio {other:?} (expected 1h2r, 1h10r or 1h100r)"
            ))),
        }
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for RatioSetting {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for RatioSetting {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = <alloc::borrow::Cow<'de, str> as serde::Deserialize>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which part of the article text a classifier sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum TextView {
    /// First sentence only.
    Definition,
    FullText,
    /// Full text with the first sentence removed.
    FullTextNoDefinition,
}

impl TextView {
    pub const ALL: [TextView; 3] = [
        TextView::Definition,
        TextView::FullText,
        TextView::FullTextNoDefinition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TextView::Definition => "definition",
            TextView::FullText => "full-text",
            TextView::FullTextNoDefinition => "full-text-no-definition",
        }
    }

    /// The text this view exposes for `article`; `None` when the view is
    /// empty (a single-sentence article without its definition).
    pub fn apply(self, article: &Article) -> Option<&str> {
        let text = match self {
            TextView::Definition => extract_definition(&article.text),
            TextView::FullText => article.text.trim(),
            TextView::FullTextNoDefinition => strip_definition(&article.text).trim_end(),
        };
        (!text.is_empty()).then_some(text)
    }
}

impl fmt::Display for TextView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TextView {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "definition" | "def" => Ok(TextView::Definition),
            "fulltext" | "full-text" | "full" => Ok(TextView::FullText),
            "fulltext-no-definition" | "full-text-no-definition" | "nodef" | "no-definition" => {
                Ok(TextView::FullTextNoDefinition)
            }
            other => Err(Error::argument(alloc::format!(
                "unknown view {other:?} (expected definition, fulltext or nodef)"
            ))),
        }
    }
}

/// The first sentence of `text`, or the whole trimmed text when it has no
/// sentence terminator.
pub fn extract_definition(text: &str) -> &str {
    match sentence_spans(text).first() {
        Some(span) => &text[span.clone()],
        None => text.trim(),
    }
}

/// Everything after the first sentence, left-trimmed. Empty for
/// single-sentence texts.
pub fn strip_definition(text: &str) -> &str {
    match sentence_spans(text).first() {
        Some(span) => text[span.end..].trim_start(),
        None => "",
    }
}

/// A reproducible train/test partition of article ids.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DatasetSplit {
    pub train: Vec<String>,
    pub test: Vec<String>,
    pub ratio: RatioSetting,
    pub view: TextView,
    pub seed: u64,
    pub test_fraction: f64,
    /// Ids removed because the view left them without text.
    pub dropped: Vec<String>,
}

fn check_fraction(test_fraction: f64) -> Result<()> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::argument(alloc::format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    Ok(())
}

/// Label-stratified random partition of `(id, label)` items.
///
/// Each label group is sorted by id, shuffled with a ChaCha8 stream seeded
/// by `seed`, and its first `round(test_fraction * n)` members (clamped to
/// `1..n`) go to the test side. Both returned id lists are sorted, so the
/// result depends only on the set of items, not their order.
pub fn stratified_partition(
    items: &[(&str, Label)],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<String>, Vec<String>)> {
    check_fraction(test_fraction)?;
    let mut groups: BTreeMap<Label, Vec<&str>> = BTreeMap::new();
    for &(id, label) in items {
        groups.entry(label).or_default().push(id);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for label in [Label::Hoax, Label::Legitimate] {
        let mut ids = groups.remove(&label).unwrap_or_default();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() < 2 {
            return Err(Error::validation(alloc::format!(
                "need at least 2 {label} examples to populate both partitions, got {}",
                ids.len()
            )));
        }
        ids.shuffle(&mut rng);
        let n = ids.len();
        let n_test = (libm::round(test_fraction * n as f64) as usize).clamp(1, n - 1);
        test.extend(ids[..n_test].iter().map(|s| String::from(*s)));
        train.extend(ids[n_test..].iter().map(|s| String::from(*s)));
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Builds the split for one (ratio, view) setting: every hoax in `corpus`
/// plus the given negatives, filtered through `view`, partitioned by
/// [`stratified_partition`].
pub fn make_split(
    corpus: &[Article],
    negatives: &[String],
    ratio: RatioSetting,
    view: TextView,
    seed: u64,
    test_fraction: f64,
) -> Result<DatasetSplit> {
    check_fraction(test_fraction)?;
    let by_id: BTreeMap<&str, &Article> = corpus.iter().map(|a| (a.id.as_str(), a)).collect();

    let mut selected: Vec<&Article> = corpus.iter().filter(|a| a.label == Label::Hoax).collect();
    if selected.is_empty() {
        return Err(Error::validation("corpus contains no hoax articles"));
    }
    let hoaxes = selected.len();
    let mut seen = alloc::collections::BTreeSet::new();
    for id in negatives {
        if !seen.insert(id.as_str()) {
            continue;
        }
        match by_id.get(id.as_str()) {
            Some(a) if a.label == Label::Legitimate => selected.push(a),
            Some(_) => {
                return Err(Error::validation(alloc::format!("negative {id} is labeled hoax")))
            }
            None => return Err(Error::validation(alloc::format!("negative {id} is not in the corpus"))),
        }
    }
    if selected.len() == hoaxes {
        return Err(Error::validation("no negatives supplied"));
    }

    let mut dropped = Vec::new();
    let mut items = Vec::with_capacity(selected.len());
    for a in selected {
        if view.apply(a).is_some() {
            items.push((a.id.as_str(), a.label));
        } else {
            dropped.push(a.id.clone());
        }
    }
    dropped.sort_unstable();

    let (train, test) = stratified_partition(&items, test_fraction, seed)?;
    Ok(DatasetSplit {
        train,
        test,
        ratio,
        view,
        seed,
        test_fraction,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::ToString;
    use alloc::vec;

    fn article(id: &str, label: Label, text: &str) -> Article {
        Article {
            id: id.to_string(),
            title: id.to_string(),
            text: text.to_string(),
            label,
            source: Source::Unknown,
        }
    }

    #[test]
    fn definition_examples() {
        assert_eq!(extract_definition("Foo is a bird. It lives in Peru."), "Foo is a bird.");
        assert_eq!(
            extract_definition("Dr. Smith founded Acme Corp. in 1901. It failed."),
            "Dr. Smith founded Acme Corp. in 1901."
        );
        assert_eq!(
            extract_definition("No terminal punctuation here"),
            "No terminal punctuation here"
        );
    }

    #[test]
    fn strip_examples() {
        assert_eq!(strip_definition("A. B. C."), "B. C.");
        assert_eq!(strip_definition("Only one sentence."), "");
        assert_eq!(strip_definition("First one. Second one."), "Second one.");
    }

    #[test]
    fn views() {
        let a = article("a", Label::Hoax, "  One. Two.  ");
        assert_eq!(TextView::Definition.apply(&a), Some("One."));
        assert_eq!(TextView::FullText.apply(&a), Some("One. Two."));
        assert_eq!(TextView::FullTextNoDefinition.apply(&a), Some("Two."));
        let b = article("b", Label::Hoax, "Just one.");
        assert_eq!(TextView::FullTextNoDefinition.apply(&b), None);
    }

    #[test]
    fn ratio_names_round_trip() {
        for r in RatioSetting::ALL {
            assert_eq!(r.name().parse::<RatioSetting>().unwrap(), r);
        }
        assert_eq!(RatioSetting::OneToTen.negatives_per_hoax(), 10);
        assert!("1h3r".parse::<RatioSetting>().is_err());
        for v in TextView::ALL {
            assert_eq!(v.name().parse::<TextView>().unwrap(), v);
        }
    }

    fn synthetic(hoaxes: usize, negatives: usize) -> (Vec<Article>, Vec<String>) {
        let mut corpus = Vec::new();
        for i in 0..hoaxes {
            corpus.push(article(&format!("h{i:04}"), Label::Hoax, "A hoax. It is fake."));
        }
        let mut neg = Vec::new();
        for i in 0..negatives {
            let id = format!("n{i:05}");
            corpus.push(article(&id, Label::Legitimate, "A page. It is real."));
            neg.push(id);
        }
        (corpus, neg)
    }

    #[test]
    fn split_sizes_follow_rounding() {
        let (corpus, neg) = synthetic(311, 622);
        let split = make_split(&corpus, &neg, RatioSetting::OneToTwo, TextView::FullText, 7, 0.3).unwrap();
        // round(0.3 * 311) = 93 hoaxes and round(0.3 * 622) = 187 negatives on the test side
        assert_eq!((split.train.len(), split.test.len()), (653, 280));
        let test_hoax = split.test.iter().filter(|id| id.starts_with('h')).count();
        assert_eq!(test_hoax, 93);
    }

    #[test]
    fn split_is_deterministic_and_order_free() {
        let (mut corpus, neg) = synthetic(20, 40);
        let a = make_split(&corpus, &neg, RatioSetting::OneToTwo, TextView::Definition, 3, 0.3).unwrap();
        corpus.reverse();
        let b = make_split(&corpus, &neg, RatioSetting::OneToTwo, TextView::Definition, 3, 0.3).unwrap();
        assert_eq!(a, b);
        let c = make_split(&corpus, &neg, RatioSetting::OneToTwo, TextView::Definition, 4, 0.3).unwrap();
        assert_ne!(a.test, c.test);
    }

    #[test]
    fn split_errors() {
        let (corpus, neg) = synthetic(0, 4);
        assert!(matches!(
            make_split(&corpus, &neg, RatioSetting::OneToTwo, TextView::FullText, 1, 0.3),
            Err(Error::Validation(_))
        ));
        let (corpus, _) = synthetic(4, 4);
        assert!(make_split(&corpus, &[], RatioSetting::OneToTwo, TextView::FullText, 1, 0.3).is_err());
        assert!(make_split(&corpus, &["h0000".into()], RatioSetting::OneToTwo, TextView::FullText, 1, 0.3).is_err());
        assert!(make_split(&corpus, &["zzz".into()], RatioSetting::OneToTwo, TextView::FullText, 1, 0.3).is_err());
        let neg = vec!["n00000".to_string(), "n00001".to_string()];
        assert!(make_split(&corpus, &neg, RatioSetting::OneToTwo, TextView::FullText, 1, 1.0).is_err());
    }

    #[test]
    fn nodef_view_drops_single_sentence_articles() {
        let (mut corpus, neg) = synthetic(4, 8);
        corpus[0].text = "Only one sentence.".into();
        let split = make_split(&corpus, &neg, RatioSetting::OneToTwo, TextView::FullTextNoDefinition, 1, 0.3).unwrap();
        assert_eq!(split.dropped, ["h0000"]);
        assert_eq!(split.train.len() + split.test.len(), 11);
    }
}

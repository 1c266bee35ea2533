//! Surface statistics of article text: sentence and word segmentation,
//! syllable counting, Flesch-Kincaid grade, and group comparisons.
//!
//! The segmenter here is shared with [`crate::corpus`] so that the
//! definition view of an article is exactly its first sentence as counted
//! by the statistics.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::corpus::{Article, Label};
use crate::error::{Error, Result};

/// Tokens that end in a period without ending a sentence. Compared
/// case-insensitively against the text preceding the period.
const ABBREVIATIONS: &[&str] = &["dr", "mr", "mrs", "st", "no", "vs", "etc", "e.g", "i.e"];

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}')
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\'' || c == '\u{2019}'
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

fn ends_with_abbreviation(before: &str) -> bool {
    let token = before
        .rsplit(char::is_whitespace)
        .next()
        .unwrap_or("")
        .trim_start_matches(|c: char| !c.is_alphanumeric());
    if token.is_empty() {
        return false;
    }
    ABBREVIATIONS.iter().any(|abbr| {
        token.len() == abbr.len()
            && token
                .chars()
                .zip(abbr.chars())
                .all(|(a, b)| a.to_lowercase().eq(core::iter::once(b)))
    })
}

/// Byte ranges of the words in `text`: maximal runs of alphanumerics and
/// apostrophes, with leading/trailing apostrophes trimmed.
pub fn word_spans(text: &str) -> Vec<Range<usize>> {
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let push = |s: usize, e: usize, spans: &mut Vec<Range<usize>>| {
        let run = &text[s..e];
        let lead = run.len() - run.trim_start_matches(is_apostrophe).len();
        let trimmed = run.trim_matches(is_apostrophe);
        if !trimmed.is_empty() {
            spans.push(s + lead..s + lead + trimmed.len());
        }
    };
    for (i, c) in text.char_indices() {
        match (is_word_char(c), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                push(s, i, &mut spans);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        push(s, text.len(), &mut spans);
    }
    spans
}

fn has_word(text: &str) -> bool {
    text.chars().any(char::is_alphanumeric)
}

/// Byte ranges of the sentences in `text`.
///
/// A sentence ends at a run of `.`, `!` or `?` (plus any closing quotes or
/// brackets) that is followed by whitespace and an uppercase letter, or by
/// the end of the text. A lone period after a stoplisted abbreviation never
/// ends a sentence. Fragments without any word are merged into the next
/// sentence, so every span contains at least one word.
pub fn sentence_spans(text: &str) -> Vec<Range<usize>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let n = chars.len();
    let byte_after = |k: usize| chars[k].0 + chars[k].1.len_utf8();

    let mut spans: Vec<Range<usize>> = Vec::new();
    let mut start: Option<usize> = None;
    let mut i = 0;
    while i < n {
        let (pos, c) = chars[i];
        if start.is_none() && !c.is_whitespace() {
            start = Some(pos);
        }
        if !is_terminator(c) {
            i += 1;
            continue;
        }

        let mut last = i;
        while last + 1 < n && is_terminator(chars[last + 1].1) {
            last += 1;
        }
        let run_end = last;
        while last + 1 < n && is_closer(chars[last + 1].1) {
            last += 1;
        }
        let mut next = last + 1;
        while next < n && chars[next].1.is_whitespace() {
            next += 1;
        }
        let mut boundary = next == n || (next > last + 1 && chars[next].1.is_uppercase());
        if boundary && c == '.' && run_end == i && ends_with_abbreviation(&text[..pos]) {
            boundary = false;
        }

        if boundary {
            if let Some(s) = start {
                let end = byte_after(last);
                if has_word(&text[s..end]) {
                    spans.push(s..end);
                    start = None;
                }
            }
        }
        i = last + 1;
    }

    if let Some(s) = start {
        let end = s + text[s..].trim_end().len();
        if has_word(&text[s..end]) {
            spans.push(s..end);
        } else if let Some(prev) = spans.last_mut() {
            prev.end = end;
        }
    }
    spans
}

/// Splits `text` into sentences and words. The word list equals the
/// concatenation of the per-sentence word lists.
pub fn segment(text: &str) -> (Vec<&str>, Vec<&str>) {
    let sentences = sentence_spans(text).into_iter().map(|r| &text[r]).collect();
    let words = word_spans(text).into_iter().map(|r| &text[r]).collect();
    (sentences, words)
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Vowel-group syllable estimate, never below 1.
///
/// A terminal silent `e` is subtracted unless the word ends in a
/// consonant followed by `le` (`table` keeps both syllables).
pub fn count_syllables(word: &str) -> usize {
    let lower: Vec<char> = word.chars().flat_map(char::to_lowercase).collect();
    let mut groups = 0usize;
    let mut in_group = false;
    for &c in &lower {
        let v = is_vowel(c);
        if v && !in_group {
            groups += 1;
        }
        in_group = v;
    }
    if lower.last() == Some(&'e') {
        let n = lower.len();
        let consonant_le = n >= 3
            && lower[n - 2] == 'l'
            && lower[n - 3].is_alphabetic()
            && !is_vowel(lower[n - 3]);
        if !consonant_le {
            groups = groups.saturating_sub(1);
        }
    }
    groups.max(1)
}

/// `0.39 * words/sentences + 11.8 * syllables/words - 15.59`.
pub fn fk_formula(words: usize, sentences: usize, syllables: usize) -> Result<f64> {
    if words == 0 || sentences == 0 {
        return Err(Error::domain("Flesch-Kincaid grade needs at least one sentence and one word"));
    }
    let wps = words as f64 / sentences as f64;
    let spw = syllables as f64 / words as f64;
    Ok(0.39 * wps + 11.8 * spw - 15.59)
}

/// Flesch-Kincaid grade of `text` under the shared segmenter.
pub fn fk_grade(text: &str) -> Result<f64> {
    let (sentences, words) = segment(text);
    let syllables: usize = words.iter().map(|w| count_syllables(w)).sum();
    fk_formula(words.len(), sentences.len(), syllables)
}

/// Per-article surface statistics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StyleStats {
    pub article_id: alloc::string::String,
    pub word_count: usize,
    pub sentence_count: usize,
    /// Words per sentence.
    pub avg_sentence_len: f64,
    /// Alphanumeric characters per word.
    pub avg_word_len: f64,
    pub syllable_count: usize,
    pub fk_grade: f64,
}

impl StyleStats {
    pub fn metric(&self, metric: Metric) -> f64 {
        match metric {
            Metric::WordCount => self.word_count as f64,
            Metric::AvgSentenceLen => self.avg_sentence_len,
            Metric::AvgWordLen => self.avg_word_len,
            Metric::FkGrade => self.fk_grade,
        }
    }
}

pub fn text_stats(id: &str, text: &str) -> Result<StyleStats> {
    let (sentences, words) = segment(text);
    if words.is_empty() {
        return Err(Error::domain("text contains no words"));
    }
    let syllable_count: usize = words.iter().map(|w| count_syllables(w)).sum();
    let letters: usize = words
        .iter()
        .map(|w| w.chars().filter(|c| c.is_alphanumeric()).count())
        .sum();
    Ok(StyleStats {
        article_id: id.into(),
        word_count: words.len(),
        sentence_count: sentences.len(),
        avg_sentence_len: words.len() as f64 / sentences.len() as f64,
        avg_word_len: letters as f64 / words.len() as f64,
        syllable_count,
        fk_grade: fk_formula(words.len(), sentences.len(), syllable_count)?,
    })
}

pub fn style_stats(article: &Article) -> Result<StyleStats> {
    text_stats(&article.id, &article.text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Metric {
    WordCount,
    AvgSentenceLen,
    AvgWordLen,
    FkGrade,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::WordCount,
        Metric::AvgSentenceLen,
        Metric::AvgWordLen,
        Metric::FkGrade,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::WordCount => "word_count",
            Metric::AvgSentenceLen => "avg_sentence_len",
            Metric::AvgWordLen => "avg_word_len",
            Metric::FkGrade => "fk_grade",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Medians {
    pub word_count: f64,
    pub avg_sentence_len: f64,
    pub avg_word_len: f64,
    pub fk_grade: f64,
}

/// Fixed-bin histogram; `edges` has one more entry than `counts`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricHistogram {
    pub metric: Metric,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StyleReport {
    pub group: Label,
    pub articles: usize,
    pub medians: Medians,
    pub histograms: Vec<MetricHistogram>,
}

/// Lower median: the element at index `(n - 1) / 2` of the sorted values.
pub fn lower_median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(sorted[(sorted.len() - 1) / 2])
}

fn shared_edges(a: &[f64], b: &[f64], bins: usize) -> Vec<f64> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in a.iter().chain(b) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if hi <= lo {
        hi = lo + 1.0;
    }
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|i| lo + width * i as f64).collect();
    edges.push(hi);
    edges
}

fn bin_counts(values: &[f64], edges: &[f64]) -> Vec<u64> {
    let bins = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[bins]);
    let mut counts = vec![0u64; bins];
    for &v in values {
        let idx = (((v - lo) / (hi - lo)) * bins as f64) as usize;
        counts[idx.min(bins - 1)] += 1;
    }
    counts
}

/// Medians and shared-bin histograms of every metric for both groups.
pub fn compare_groups(
    hoax: &[StyleStats],
    legit: &[StyleStats],
    bins: usize,
) -> Result<(StyleReport, StyleReport)> {
    if hoax.is_empty() || legit.is_empty() {
        return Err(Error::argument("both groups need at least one article"));
    }
    if bins == 0 {
        return Err(Error::argument("histogram needs at least one bin"));
    }
    let column = |group: &[StyleStats], m: Metric| -> Vec<f64> { group.iter().map(|s| s.metric(m)).collect() };

    let mut reports = [(Label::Hoax, hoax), (Label::Legitimate, legit)].map(|(label, group)| {
        let med = |m| lower_median(&column(group, m)).unwrap_or(f64::NAN);
        StyleReport {
            group: label,
            articles: group.len(),
            medians: Medians {
                word_count: med(Metric::WordCount),
                avg_sentence_len: med(Metric::AvgSentenceLen),
                avg_word_len: med(Metric::AvgWordLen),
                fk_grade: med(Metric::FkGrade),
            },
            histograms: Vec::new(),
        }
    });

    for metric in Metric::ALL {
        let (h, l) = (column(hoax, metric), column(legit, metric));
        let edges = shared_edges(&h, &l, bins);
        for (report, values) in reports.iter_mut().zip([&h, &l]) {
            report.histograms.push(MetricHistogram {
                metric,
                counts: bin_counts(values, &edges),
                edges: edges.clone(),
            });
        }
    }
    let [h, l] = reports;
    Ok((h, l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn two_short_sentences() {
        let (s, w) = segment("Hi there. Bye now.");
        assert_eq!(s, ["Hi there.", "Bye now."]);
        assert_eq!(w, ["Hi", "there", "Bye", "now"]);
    }

    #[test]
    fn honorific_does_not_split() {
        let (s, _) = segment("Mr. Jones left. He returned.");
        assert_eq!(s, ["Mr. Jones left.", "He returned."]);
    }

    #[test]
    fn empty_text() {
        let (s, w) = segment("");
        assert!(s.is_empty() && w.is_empty());
        let (s, w) = segment("   \n ");
        assert!(s.is_empty() && w.is_empty());
    }

    #[test]
    fn lowercase_after_period_continues_sentence() {
        let (s, _) = segment("Dr. Smith founded Acme Corp. in 1901. It failed.");
        assert_eq!(s, ["Dr. Smith founded Acme Corp. in 1901.", "It failed."]);
    }

    #[test]
    fn abbreviations_are_case_insensitive_and_cover_latin_forms() {
        let (s, _) = segment("Cats, dogs, etc. Are pets. See e.g. Rex. Done.");
        assert_eq!(s, ["Cats, dogs, etc. Are pets.", "See e.g. Rex.", "Done."]);
        let (s, _) = segment("Item NO. Five exists.");
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn terminator_runs_and_closing_quotes() {
        let (s, _) = segment("Really?! Yes. He said \"Go.\" Then he left");
        assert_eq!(s, ["Really?!", "Yes.", "He said \"Go.\"", "Then he left"]);
    }

    #[test]
    fn wordless_fragments_merge_forward() {
        let (s, w) = segment("... Hello there.");
        assert_eq!(s, ["... Hello there."]);
        assert_eq!(w.len(), 2);
        let (s, _) = segment("Fine. !!!");
        assert_eq!(s, ["Fine. !!!"]);
    }

    #[test]
    fn words_keep_inner_apostrophes_only() {
        let (_, w) = segment("Don't 'quote' O'Brien's rock'n'roll '' 42");
        assert_eq!(w, ["Don't", "quote", "O'Brien's", "rock'n'roll", "42"]);
    }

    #[test]
    fn non_latin_punctuation_separates_words() {
        let (_, w) = segment("naïve café\u{2014}résumé");
        assert_eq!(w, ["naïve", "café", "résumé"]);
    }

    #[test]
    fn syllables() {
        assert_eq!(count_syllables("cat"), 1);
        assert_eq!(count_syllables("table"), 2);
        assert_eq!(count_syllables("make"), 1);
        assert_eq!(count_syllables("the"), 1);
        assert_eq!(count_syllables("apple"), 2);
        assert_eq!(count_syllables("whale"), 1);
        assert_eq!(count_syllables("beautiful"), 3);
        assert_eq!(count_syllables("rhythm"), 1);
        assert_eq!(count_syllables("1901"), 1);
        assert_eq!(count_syllables("TABLE"), 2);
    }

    #[test]
    fn fk_formula_hand_values() {
        assert!((fk_formula(3, 1, 3).unwrap() - (-2.62)).abs() < 1e-12);
        assert!((fk_formula(20, 1, 30).unwrap() - 9.91).abs() < 1e-12);
        assert!(matches!(fk_formula(0, 1, 0), Err(Error::Domain(_))));
        assert!(fk_grade("").is_err());
    }

    #[test]
    fn stats_hand_counts() {
        let s = text_stats("a", "Hi there. Bye now.").unwrap();
        assert_eq!((s.word_count, s.sentence_count), (4, 2));
        assert_eq!(s.avg_sentence_len, 2.0);
        assert_eq!(s.avg_word_len, 3.25);
        let s = text_stats("b", "Hello").unwrap();
        assert_eq!((s.word_count, s.sentence_count, s.avg_sentence_len), (1, 1, 1.0));
        assert!(text_stats("c", " ... ").is_err());
    }

    fn stats_with_words(id: &str, words: usize) -> StyleStats {
        StyleStats {
            article_id: id.to_string(),
            word_count: words,
            sentence_count: 1,
            avg_sentence_len: words as f64,
            avg_word_len: 4.0,
            syllable_count: words,
            fk_grade: 1.0,
        }
    }

    #[test]
    fn lower_median_convention() {
        assert_eq!(lower_median(&[4.0, 1.0, 3.0, 2.0]), Some(2.0));
        assert_eq!(lower_median(&[5.0]), Some(5.0));
        assert_eq!(lower_median(&[]), None);
    }

    #[test]
    fn compare_groups_shares_bins() {
        let h = [stats_with_words("h", 10)];
        let l: Vec<_> = (1..=4).map(|i| stats_with_words("l", i * 100)).collect();
        let (hr, lr) = compare_groups(&h, &l, 5).unwrap();
        assert_eq!(hr.medians.word_count, 10.0);
        assert_eq!(lr.medians.word_count, 200.0);
        for (a, b) in hr.histograms.iter().zip(&lr.histograms) {
            assert_eq!(a.edges, b.edges);
            assert_eq!(a.counts.iter().sum::<u64>(), 1);
            assert_eq!(b.counts.iter().sum::<u64>(), 4);
        }
        assert!(compare_groups(&[], &l, 5).is_err());
    }
}

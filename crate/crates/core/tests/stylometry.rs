use hoaxscope_core::stylometry::{
    compare_groups, count_syllables, fk_formula, fk_grade, lower_median, segment, sentence_spans, text_stats, Metric,
};
use proptest::prelude::*;

fn sentence() -> impl Strategy<Value = String> {
    (
        "[A-Z][a-z]{0,8}",
        proptest::collection::vec("[a-z]{1,10}", 0..12),
        prop_oneof![Just("."), Just("!"), Just("?")],
    )
        .prop_map(|(head, rest, end)| {
            let last = rest.last().unwrap_or(&head).to_lowercase();
            let mut s = head;
            for w in rest {
                s.push(' ');
                s.push_str(&w);
            }
            // an abbreviation before '.' does not close a sentence
            let abbreviation = ["dr", "mr", "mrs", "st", "no", "vs", "etc"].contains(&last.as_str());
            s.push_str(if abbreviation && end == "." { "!" } else { end });
            s
        })
}

fn text() -> impl Strategy<Value = String> {
    proptest::collection::vec(sentence(), 1..8).prop_map(|v| v.join(" "))
}

proptest! {
    #[test]
    fn resegmenting_a_sentence_yields_itself(t in text()) {
        let (sentences, _) = segment(&t);
        for s in sentences {
            let (again, _) = segment(s);
            prop_assert_eq!(again, vec![s]);
        }
    }

    #[test]
    fn words_are_concatenated_sentence_words(t in text()) {
        let (sentences, words) = segment(&t);
        let per_sentence: Vec<&str> = sentences.iter().flat_map(|s| segment(s).1).collect();
        prop_assert_eq!(words, per_sentence);
    }

    #[test]
    fn generated_sentences_are_recovered(v in proptest::collection::vec(sentence(), 1..8)) {
        let joined = v.join(" ");
        let (sentences, _) = segment(&joined);
        prop_assert_eq!(sentences, v.iter().map(String::as_str).collect::<Vec<_>>());
    }

    #[test]
    fn fk_invariant_under_duplication(t in text()) {
        let doubled = format!("{t} {t}");
        let a = fk_grade(&t).unwrap();
        let b = fk_grade(&doubled).unwrap();
        prop_assert!((a - b).abs() <= 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn syllables_at_least_one(w in "[a-zA-Z]{1,20}") {
        prop_assert!(count_syllables(&w) >= 1);
    }

    #[test]
    fn stats_identities(t in text()) {
        let s = text_stats("x", &t).unwrap();
        prop_assert!(s.word_count >= s.sentence_count && s.sentence_count >= 1);
        // exact up to the rounding of one division and one multiplication
        let words = s.word_count as f64;
        prop_assert!((s.avg_sentence_len * s.sentence_count as f64 - words).abs() <= 4.0 * f64::EPSILON * words);
        prop_assert!(s.fk_grade.is_finite());
    }

    #[test]
    fn histograms_conserve_counts(
        a in proptest::collection::vec(text(), 1..6),
        b in proptest::collection::vec(text(), 1..6),
        bins in 2usize..12,
    ) {
        let sa: Vec<_> = a.iter().map(|t| text_stats("a", t).unwrap()).collect();
        let sb: Vec<_> = b.iter().map(|t| text_stats("b", t).unwrap()).collect();
        let (ra, rb) = compare_groups(&sa, &sb, bins).unwrap();
        for (ha, hb) in ra.histograms.iter().zip(&rb.histograms) {
            prop_assert_eq!(&ha.edges, &hb.edges);
            prop_assert_eq!(ha.counts.iter().sum::<u64>(), sa.len() as u64);
            prop_assert_eq!(hb.counts.iter().sum::<u64>(), sb.len() as u64);
        }
    }
}

#[test]
fn fk_fixture_values() {
    assert!((fk_formula(3, 1, 3).unwrap() - (-2.62)).abs() < 1e-6);
    assert!((fk_formula(20, 1, 30).unwrap() - 9.91).abs() < 1e-6);
    // "The cat sat." is 3 one-syllable words in one sentence
    assert!((fk_grade("The cat sat.").unwrap() - (-2.62)).abs() < 1e-6);
    assert!(fk_formula(0, 1, 0).is_err());
    assert!(fk_grade("").is_err());
}

#[test]
fn median_convention() {
    assert_eq!(lower_median(&[4.0, 1.0, 3.0, 2.0]), Some(2.0));
    assert_eq!(lower_median(&[5.0]), Some(5.0));
    assert_eq!(lower_median(&[]), None);
}

#[test]
fn single_article_group_medians() {
    let s = text_stats("a", "Hi there. Bye now.").unwrap();
    let (r, _) = compare_groups(std::slice::from_ref(&s), std::slice::from_ref(&s), 4).unwrap();
    for m in Metric::ALL {
        let got = match m {
            Metric::WordCount => r.medians.word_count,
            Metric::AvgSentenceLen => r.medians.avg_sentence_len,
            Metric::AvgWordLen => r.medians.avg_word_len,
            Metric::FkGrade => r.medians.fk_grade,
        };
        assert_eq!(got, s.metric(m));
    }
    assert!(compare_groups(&[], std::slice::from_ref(&s), 4).is_err());
}

#[test]
fn spans_cover_sentences() {
    let t = "Mr. Jones left. He returned.";
    let spans = sentence_spans(t);
    assert_eq!(spans.iter().map(|r| &t[r.clone()]).collect::<Vec<_>>(), ["Mr. Jones left.", "He returned."]);
}

mod common;

use common::*;
use disfix::engine::{correct, DetectorConfig, DisfluencyType};
use disfix::{detokenize, tokenize, LanguageTag};

#[test]
fn hand_tokenized_sentences() {
    for lang in LanguageTag::ALL {
        for case in tokenization_cases(lang) {
            let t = tokenize(&case.text, lang);
            let texts: Vec<&str> = t.tokens.iter().map(|t| t.text.as_str()).collect();
            assert_eq!(texts, case.tokens, "{:?}", case.text);
            let punct: Vec<usize> = t.tokens.iter().filter(|t| !t.is_word).map(|t| t.index).collect();
            assert_eq!(punct, case.punct, "{:?}", case.text);
            let detok = detokenize(&t);
            assert_eq!(detok, case.detok, "{:?}", case.text);
            assert_eq!(tokenize(&detok, lang).tokens, t.tokens, "round trip of {:?}", case.text);
        }
    }
}

#[test]
fn fixture_sizes() {
    assert_eq!(tokenization_cases(LanguageTag::En).len(), 20);
    assert_eq!(labeled(LanguageTag::En, "corrections.txt").len(), 30);
    assert_eq!(labeled(LanguageTag::En, "mixed.txt").len(), 50);
    assert_eq!(labeled(LanguageTag::Hi, "corrections.txt").len(), 30);
}

fn check_labels(lang: LanguageTag, name: &str) {
    let cfg = DetectorConfig::default();
    let mut failures = Vec::new();
    for line in labeled(lang, name) {
        let t = tokenize(&line.raw, lang);
        assert_eq!(t.word_texts(), line.gold.tokens, "{name}: {:?}", line.raw);
        let r = correct(&t, &cfg).unwrap();
        let got: Vec<DisfluencyType> = r.labels.iter().map(|l| l.kind).collect();
        if got != line.gold.labels {
            failures.push(format!("{:?}\n  gold {:?}\n  got  {:?}", line.raw, line.gold.labels, got));
        }
        assert_eq!(r.fluent.word_texts(), line.gold.gold_fluent_tokens(), "{:?}", line.raw);
    }
    assert!(failures.is_empty(), "{lang} {name}:\n{}", failures.join("\n"));
}

#[test]
fn english_corrections_match_hand_labels() {
    check_labels(LanguageTag::En, "corrections.txt");
}

#[test]
fn hindi_corrections_match_hand_labels() {
    check_labels(LanguageTag::Hi, "corrections.txt");
}

#[test]
fn english_false_starts_match_hand_labels() {
    check_labels(LanguageTag::En, "false_starts.txt");
}

#[test]
fn hindi_false_starts_match_hand_labels() {
    check_labels(LanguageTag::Hi, "false_starts.txt");
}

#[test]
fn english_mixed_transcripts_match_hand_labels() {
    check_labels(LanguageTag::En, "mixed.txt");
}

#[test]
fn hindi_mixed_transcripts_match_hand_labels() {
    check_labels(LanguageTag::Hi, "mixed.txt");
}

#[test]
fn utterance_types_follow_gold_histograms() {
    let cfg = DetectorConfig::default();
    for lang in LanguageTag::ALL {
        for line in all_labeled(lang) {
            let r = correct(&tokenize(&line.raw, lang), &cfg).unwrap();
            assert_eq!(r.utterance_type, line.gold.injection, "{:?}", line.raw);
            assert_eq!(r.histogram.total(), r.disfluency_count);
        }
    }
}

#![allow(dead_code)]

pub mod fake;

use std::path::PathBuf;

use disfix::synth::{parse_bracketed_file, AnnotatedUtterance};
use disfix::LanguageTag;
use serde::Deserialize;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn fixture(lang: LanguageTag, name: &str) -> String {
    let path = data_dir().join("fixtures").join(lang.code()).join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn audio_fixture(name: &str) -> Vec<u8> {
    let path = data_dir().join("fixtures").join("audio").join(name);
    std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[derive(Debug, Deserialize)]
pub struct TokenCase {
    pub text: String,
    pub tokens: Vec<String>,
    pub punct: Vec<usize>,
    pub detok: String,
}

pub fn tokenization_cases(lang: LanguageTag) -> Vec<TokenCase> {
    fixture(lang, "tokenization.jsonl")
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

/// One hand-labeled line: the transcript as spoken plus its gold labels.
pub struct LabeledLine {
    pub raw: String,
    pub gold: AnnotatedUtterance,
}

/// Drops the `[T:` openers and `]` closers, keeping the words and
/// punctuation inside them.
pub fn strip_brackets(line: &str) -> String {
    let mut out = String::new();
    let mut rest = line;
    while let Some(open) = rest.find('[') {
        out.push_str(&rest[..open]);
        let colon = rest[open..].find(':').unwrap() + open;
        rest = &rest[colon + 1..];
        let close = rest.find(']').unwrap();
        out.push_str(rest[..close].trim_start());
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn labeled(lang: LanguageTag, name: &str) -> Vec<LabeledLine> {
    let body = fixture(lang, name);
    let gold = parse_bracketed_file(&body, lang).unwrap();
    let raw = body
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(strip_brackets);
    raw.zip(gold).map(|(raw, gold)| LabeledLine { raw, gold }).collect()
}

pub const LABELED_FIXTURES: [&str; 3] = ["corrections.txt", "false_starts.txt", "mixed.txt"];

pub fn all_labeled(lang: LanguageTag) -> Vec<LabeledLine> {
    LABELED_FIXTURES.iter().flat_map(|f| labeled(lang, f)).collect()
}

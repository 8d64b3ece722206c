use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{rng_for, seed_words, AnnotatedUtterance, GeneratorConfig, SynthError};
use crate::engine::DisfluencyType;
use crate::text::LanguageTag;

type Labeled = (Vec<String>, Vec<DisfluencyType>);

fn fluent(words: &[String]) -> Labeled {
    (words.to_vec(), vec![DisfluencyType::Fluent; words.len()])
}

/// Inserts fillers at word boundaries (`0..=words.len()`). Several fillers
/// at one boundary keep their given order.
pub fn insert_fillers(words: &[String], insertions: &[(usize, String)]) -> Labeled {
    let mut sorted: Vec<&(usize, String)> = insertions.iter().collect();
    sorted.sort_by_key(|(at, _)| *at);
    let mut out = (Vec::new(), Vec::new());
    let mut pending = sorted.into_iter().peekable();
    for boundary in 0..=words.len() {
        while let Some((_, filler)) = pending.next_if(|(at, _)| *at == boundary) {
            out.0.push(filler.clone());
            out.1.push(DisfluencyType::Filler);
        }
        if let Some(w) = words.get(boundary) {
            out.0.push(w.clone());
            out.1.push(DisfluencyType::Fluent);
        }
    }
    out
}

/// Puts `extra` copies of `words[start..start + n]` right before it. All
/// copies but the last are gold Repetition.
pub fn repeat_ngram(words: &[String], start: usize, n: usize, extra: usize) -> Labeled {
    let (mut tokens, mut labels) = fluent(&words[..start]);
    let gram = &words[start..start + n];
    for _ in 0..extra {
        tokens.extend_from_slice(gram);
        labels.extend(std::iter::repeat_n(DisfluencyType::Repetition, n));
    }
    let (tail_tokens, tail_labels) = fluent(&words[start..]);
    tokens.extend(tail_tokens);
    labels.extend(tail_labels);
    (tokens, labels)
}

/// `... <distractor> <editing term> words[at] ...`, with the distractor and
/// the term gold Correction.
pub fn insert_correction(
    words: &[String],
    at: usize,
    distractor: &str,
    term: &str,
    lang: LanguageTag,
) -> Labeled {
    let (mut tokens, mut labels) = fluent(&words[..at]);
    tokens.push(distractor.to_string());
    labels.push(DisfluencyType::Correction);
    for w in term.split_whitespace() {
        // the English pronoun is written capitalized
        let w = if lang == LanguageTag::En && w == "i" { "I" } else { w };
        tokens.push(w.to_string());
        labels.push(DisfluencyType::Correction);
    }
    let (tail_tokens, tail_labels) = fluent(&words[at..]);
    tokens.extend(tail_tokens);
    labels.extend(tail_labels);
    (tokens, labels)
}

/// Keeps the first half of a word (at least one character) and marks it
/// with a trailing `-`.
pub fn truncate_word(word: &str) -> String {
    let chars: Vec<char> = word.chars().collect();
    let keep = chars.len().div_ceil(2).max(1);
    let mut out: String = chars[..keep.min(chars.len())].iter().collect();
    out.push('-');
    out
}

/// Prepends the first `k` words with the last of them truncated.
pub fn prepend_false_start(words: &[String], k: usize) -> Labeled {
    let mut tokens: Vec<String> = words[..k - 1].to_vec();
    tokens.push(truncate_word(&words[k - 1]));
    let mut labels = vec![DisfluencyType::FalseStart; k];
    let (rest_tokens, rest_labels) = fluent(words);
    tokens.extend(rest_tokens);
    labels.extend(rest_labels);
    (tokens, labels)
}

fn pick<'a>(rng: &mut ChaCha8Rng, items: &'a [String]) -> &'a String {
    &items[rng.random_range(0..items.len())]
}

fn finish(
    seed_text: &str,
    cfg: &GeneratorConfig,
    injection: DisfluencyType,
    (tokens, labels): Labeled,
) -> AnnotatedUtterance {
    AnnotatedUtterance { tokens, labels, lang: cfg.lang, seed_text: seed_text.to_string(), injection }
}

fn filler_with(seed_text: &str, rng: &mut ChaCha8Rng, cfg: &GeneratorConfig) -> Result<AnnotatedUtterance, SynthError> {
    let words = seed_words(seed_text, cfg.lang)?;
    if cfg.fillers.is_empty() {
        return Err(SynthError::EmptyList("filler"));
    }
    let count = rng.random_range(1..=3);
    let insertions: Vec<(usize, String)> = (0..count)
        .map(|_| (rng.random_range(0..=words.len()), pick(rng, &cfg.fillers).clone()))
        .collect();
    Ok(finish(seed_text, cfg, DisfluencyType::Filler, insert_fillers(&words, &insertions)))
}

fn repetition_with(seed_text: &str, rng: &mut ChaCha8Rng, cfg: &GeneratorConfig) -> Result<AnnotatedUtterance, SynthError> {
    let words = seed_words(seed_text, cfg.lang)?;
    let n = rng.random_range(1..=cfg.max_repeat_ngram.max(1).min(words.len()));
    let start = rng.random_range(0..=words.len() - n);
    let extra = rng.random_range(1..=2);
    Ok(finish(seed_text, cfg, DisfluencyType::Repetition, repeat_ngram(&words, start, n, extra)))
}

fn correction_with(seed_text: &str, rng: &mut ChaCha8Rng, cfg: &GeneratorConfig) -> Result<AnnotatedUtterance, SynthError> {
    let words = seed_words(seed_text, cfg.lang)?;
    if cfg.editing_terms.is_empty() {
        return Err(SynthError::EmptyList("editing-term"));
    }
    if cfg.distractors.is_empty() {
        return Err(SynthError::EmptyList("distractor"));
    }
    let at = rng.random_range(0..words.len());
    let term = pick(rng, &cfg.editing_terms).clone();
    let term_first = term.split_whitespace().next().unwrap_or("").to_string();
    let corrected = words[at].to_lowercase();
    let previous = at.checked_sub(1).map(|p| words[p].to_lowercase());
    // a distractor equal to a neighbour would read as a repetition
    let candidates: Vec<String> = cfg
        .distractors
        .iter()
        .filter(|d| {
            let d = d.to_lowercase();
            d != corrected && Some(&d) != previous.as_ref() && d != term_first
        })
        .cloned()
        .collect();
    if candidates.is_empty() {
        return Err(SynthError::EmptyList("distractor"));
    }
    let distractor = pick(rng, &candidates).clone();
    Ok(finish(
        seed_text,
        cfg,
        DisfluencyType::Correction,
        insert_correction(&words, at, &distractor, &term, cfg.lang),
    ))
}

fn false_start_with(seed_text: &str, rng: &mut ChaCha8Rng, cfg: &GeneratorConfig) -> Result<AnnotatedUtterance, SynthError> {
    let words = seed_words(seed_text, cfg.lang)?;
    let k = rng.random_range(1..=words.len().min(3));
    Ok(finish(seed_text, cfg, DisfluencyType::FalseStart, prepend_false_start(&words, k)))
}

pub(crate) fn inject(
    kind: DisfluencyType,
    seed_text: &str,
    rng: &mut ChaCha8Rng,
    cfg: &GeneratorConfig,
) -> Result<AnnotatedUtterance, SynthError> {
    match kind {
        DisfluencyType::Filler => filler_with(seed_text, rng, cfg),
        DisfluencyType::Repetition => repetition_with(seed_text, rng, cfg),
        DisfluencyType::Correction => correction_with(seed_text, rng, cfg),
        DisfluencyType::FalseStart => false_start_with(seed_text, rng, cfg),
        DisfluencyType::Fluent => AnnotatedUtterance::fluent(seed_text, cfg.lang),
    }
}

/// 1–3 fillers at uniformly chosen word boundaries.
pub fn inject_filler(seed_text: &str, rng_seed: u64, cfg: &GeneratorConfig) -> Result<AnnotatedUtterance, SynthError> {
    filler_with(seed_text, &mut rng_for(rng_seed, 0), cfg)
}

/// 1–2 extra copies of a random n-gram, `n <= max_repeat_ngram`.
pub fn inject_repetition(seed_text: &str, rng_seed: u64, cfg: &GeneratorConfig) -> Result<AnnotatedUtterance, SynthError> {
    repetition_with(seed_text, &mut rng_for(rng_seed, 0), cfg)
}

/// A distractor plus editing phrase before a random word.
pub fn inject_correction(seed_text: &str, rng_seed: u64, cfg: &GeneratorConfig) -> Result<AnnotatedUtterance, SynthError> {
    correction_with(seed_text, &mut rng_for(rng_seed, 0), cfg)
}

/// A truncated restart of the first 1–3 words.
pub fn inject_false_start(seed_text: &str, rng_seed: u64, cfg: &GeneratorConfig) -> Result<AnnotatedUtterance, SynthError> {
    false_start_with(seed_text, &mut rng_for(rng_seed, 0), cfg)
}

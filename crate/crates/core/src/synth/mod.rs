//! Synthetic disfluent utterances with gold token labels, and token-level
//! scoring of any labeler against them.
//!
//! # Reproducibility
//!
//! All randomness comes from `ChaCha8Rng` (crate `rand_chacha`) seeded with
//! `seed_from_u64`. In [`generate_corpus`] the type assignment shuffle uses
//! stream 0 of the corpus seed and utterance `i` uses stream `i + 1`, so each
//! utterance depends only on `(seed, i)`. Uniform integers are drawn with
//! `rand` 0.9's `random_range`.

mod eval;
mod injection;

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::config::{parse_list, read_list, ConfigError};
use crate::engine::{DetectorConfig, DisfluencyType};
use crate::text::{tokenize, LanguageTag};

pub use eval::{engine_labeler, evaluate, EvalReport, Prf};
pub use injection::{
    inject_correction, inject_false_start, inject_filler, inject_repetition, insert_correction,
    insert_fillers, prepend_false_start, repeat_ngram, truncate_word,
};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("input utterance has no words")]
    EmptyInput,
    #[error("{0} list is empty")]
    EmptyList(&'static str),
    #[error("invalid mix: {0}")]
    InvalidMix(String),
    #[error("seed list is empty")]
    NoSeeds,
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("utterance {index} ({seed_text:?}): labeler returned {got} labels for {expected} tokens")]
    LabelCountMismatch { index: usize, seed_text: String, expected: usize, got: usize },
    #[error("utterance {index} ({seed_text:?}): {message}")]
    Labeler { index: usize, seed_text: String, message: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Word tokens with one gold type each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedUtterance {
    pub tokens: Vec<String>,
    pub labels: Vec<DisfluencyType>,
    pub lang: LanguageTag,
    pub seed_text: String,
    /// Which injector produced the utterance (`Fluent` for untouched seeds).
    pub injection: DisfluencyType,
}

impl AnnotatedUtterance {
    pub fn fluent(seed_text: &str, lang: LanguageTag) -> Result<Self, SynthError> {
        let words = seed_words(seed_text, lang)?;
        Ok(AnnotatedUtterance {
            labels: vec![DisfluencyType::Fluent; words.len()],
            tokens: words,
            lang,
            seed_text: seed_text.to_string(),
            injection: DisfluencyType::Fluent,
        })
    }

    /// Tokens whose gold label is `Fluent`.
    pub fn gold_fluent_tokens(&self) -> Vec<&str> {
        self.tokens
            .iter()
            .zip(&self.labels)
            .filter(|(_, l)| !l.is_disfluent())
            .map(|(t, _)| t.as_str())
            .collect()
    }

    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

pub(crate) fn seed_words(seed_text: &str, lang: LanguageTag) -> Result<Vec<String>, SynthError> {
    let words: Vec<String> =
        tokenize(seed_text, lang).words().map(|t| t.text.clone()).collect();
    if words.is_empty() {
        return Err(SynthError::EmptyInput);
    }
    Ok(words)
}

/// Lexicons the injectors draw from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub lang: LanguageTag,
    pub fillers: Vec<String>,
    /// Editing phrases as they are inserted (space-separated words).
    pub editing_terms: Vec<String>,
    pub distractors: Vec<String>,
    pub max_repeat_ngram: usize,
}

fn builtin_distractors(lang: LanguageTag) -> &'static str {
    match lang {
        LanguageTag::En => include_str!("../../data/lexicons/en/distractors.txt"),
        LanguageTag::Hi => include_str!("../../data/lexicons/hi/distractors.txt"),
    }
}

impl GeneratorConfig {
    /// Shares the detector's filler and editing-term lexicons, so the rule
    /// engine has a matched oracle.
    pub fn matched(detector: &DetectorConfig, lang: LanguageTag) -> Result<Self, SynthError> {
        let lex = detector.lexicon(lang)?;
        Ok(GeneratorConfig {
            lang,
            fillers: lex.fillers().iter().cloned().collect(),
            editing_terms: lex.editing_terms().iter().map(|t| t.join(" ")).collect(),
            distractors: parse_list(builtin_distractors(lang)).collect(),
            max_repeat_ngram: detector.max_repeat_ngram(),
        })
    }

    /// Held-out fillers and editing phrases that the default detector
    /// lexicons do not contain, for measuring generalization.
    pub fn adversarial(lang: LanguageTag) -> Self {
        let (fillers, terms) = match lang {
            LanguageTag::En => (
                include_str!("../../data/lexicons/adversarial/en/fillers.txt"),
                include_str!("../../data/lexicons/adversarial/en/editing_terms.txt"),
            ),
            LanguageTag::Hi => (
                include_str!("../../data/lexicons/adversarial/hi/fillers.txt"),
                include_str!("../../data/lexicons/adversarial/hi/editing_terms.txt"),
            ),
        };
        GeneratorConfig {
            lang,
            fillers: parse_list(fillers).collect(),
            editing_terms: parse_list(terms).collect(),
            distractors: parse_list(builtin_distractors(lang)).collect(),
            max_repeat_ngram: crate::engine::config::DEFAULT_MAX_REPEAT_NGRAM,
        }
    }

    /// Reads `fillers.txt`, `editing_terms.txt` and `distractors.txt` from
    /// `<dir>/<lang>/`.
    pub fn load_dir(dir: &Path, lang: LanguageTag, max_repeat_ngram: usize) -> Result<Self, SynthError> {
        let base = dir.join(lang.code());
        Ok(GeneratorConfig {
            lang,
            fillers: read_list(&base.join("fillers.txt"))?,
            editing_terms: read_list(&base.join("editing_terms.txt"))?,
            distractors: read_list(&base.join("distractors.txt"))?,
            max_repeat_ngram,
        })
    }
}

/// Per-type proportions for [`generate_corpus`]. `Fluent` is the share of
/// seeds left untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct Mix {
    shares: BTreeMap<DisfluencyType, f64>,
}

impl Mix {
    pub fn new(shares: impl IntoIterator<Item = (DisfluencyType, f64)>) -> Result<Self, SynthError> {
        let mut map = BTreeMap::new();
        for (kind, share) in shares {
            if !share.is_finite() || share < 0.0 {
                return Err(SynthError::InvalidMix(format!("{kind} share {share} is not a non-negative number")));
            }
            if map.insert(kind, share).is_some() {
                return Err(SynthError::InvalidMix(format!("{kind} listed twice")));
            }
        }
        let sum: f64 = map.values().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(SynthError::InvalidMix(format!("shares sum to {sum}, expected 1")));
        }
        Ok(Mix { shares: map })
    }

    /// Parses `Filler=0.5,Repetition=0.5`.
    pub fn parse(text: &str) -> Result<Self, SynthError> {
        let mut shares = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| SynthError::InvalidMix(format!("expected Type=share, got {part:?}")))?;
            let kind: DisfluencyType = name.trim().parse().map_err(SynthError::InvalidMix)?;
            let share: f64 = value
                .trim()
                .parse()
                .map_err(|_| SynthError::InvalidMix(format!("bad share {value:?}")))?;
            shares.push((kind, share));
        }
        Mix::new(shares)
    }

    pub fn uniform_disfluent() -> Self {
        Mix::new(DisfluencyType::DISFLUENT.map(|k| (k, 0.25))).expect("valid")
    }

    /// Largest-remainder quotas summing to `n`. Ties in the remainder go to
    /// the type listed first in [`DisfluencyType::ALL`].
    pub fn quotas(&self, n: usize) -> BTreeMap<DisfluencyType, usize> {
        let mut quotas: BTreeMap<DisfluencyType, usize> = BTreeMap::new();
        let mut remainders: Vec<(DisfluencyType, f64)> = Vec::new();
        for (&kind, &share) in &self.shares {
            let exact = share * n as f64;
            let floor = exact.floor();
            quotas.insert(kind, floor as usize);
            remainders.push((kind, exact - floor));
        }
        let assigned: usize = quotas.values().sum();
        remainders.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        for (kind, _) in remainders.into_iter().take(n.saturating_sub(assigned)) {
            *quotas.get_mut(&kind).unwrap() += 1;
        }
        quotas
    }
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generates `n` utterances; utterance `i` is built from `seeds[i % len]`.
pub fn generate_corpus(
    seeds: &[String],
    mix: &Mix,
    n: usize,
    rng_seed: u64,
    cfg: &GeneratorConfig,
) -> Result<Vec<AnnotatedUtterance>, SynthError> {
    if seeds.is_empty() {
        return Err(SynthError::NoSeeds);
    }
    let mut kinds: Vec<DisfluencyType> = mix
        .quotas(n)
        .into_iter()
        .flat_map(|(kind, count)| std::iter::repeat_n(kind, count))
        .collect();
    kinds.shuffle(&mut rng_for(rng_seed, 0));

    kinds
        .into_par_iter()
        .enumerate()
        .map(|(i, kind)| {
            let seed = &seeds[i % seeds.len()];
            let mut rng = rng_for(rng_seed, i as u64 + 1);
            injection::inject(kind, seed, &mut rng, cfg)
        })
        .collect()
}

/// Reads seed sentences, one per line; blank lines and `#` comments skipped.
pub fn read_seeds(path: &Path) -> Result<Vec<String>, SynthError> {
    let body = std::fs::read_to_string(path)
        .map_err(|source| SynthError::Io { path: path.to_path_buf(), source })?;
    Ok(body
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

pub fn builtin_seeds(lang: LanguageTag) -> Vec<String> {
    let body = match lang {
        LanguageTag::En => include_str!("../../data/seeds/en.txt"),
        LanguageTag::Hi => include_str!("../../data/seeds/hi.txt"),
    };
    body.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect()
}

pub fn write_jsonl<W: Write>(out: &mut W, corpus: &[AnnotatedUtterance]) -> std::io::Result<()> {
    for u in corpus {
        serde_json::to_writer(&mut *out, u)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Streams a JSONL corpus, validating each line. Line numbers are 1-based.
pub fn read_jsonl<R: BufRead>(
    reader: R,
) -> impl Iterator<Item = Result<AnnotatedUtterance, SynthError>> {
    reader.lines().enumerate().filter_map(|(i, line)| {
        let line_no = i + 1;
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(SynthError::Parse { line: line_no, message: e.to_string() })),
        };
        if line.trim().is_empty() {
            return None;
        }
        Some(parse_corpus_line(&line).map_err(|message| SynthError::Parse { line: line_no, message }))
    })
}

fn parse_corpus_line(line: &str) -> Result<AnnotatedUtterance, String> {
    let u: AnnotatedUtterance = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if u.tokens.len() != u.labels.len() {
        return Err(format!("{} tokens but {} labels", u.tokens.len(), u.labels.len()));
    }
    if let Some(t) = u.tokens.iter().find(|t| t.is_empty() || t.chars().any(char::is_whitespace)) {
        return Err(format!("token {t:?} is empty or contains whitespace"));
    }
    Ok(u)
}

/// Parses the bracketed annotation used by the hand-labeled fixtures:
/// `go [C: left I mean] right`, with tags `F` (filler), `R` (repetition),
/// `C` (correction) and `S` (false start). Punctuation is dropped.
pub fn parse_bracketed(line: &str, lang: LanguageTag) -> Result<AnnotatedUtterance, String> {
    let mut tokens = Vec::new();
    let mut labels = Vec::new();
    let mut rest = line;
    let mut push_words = |text: &str, kind: DisfluencyType, tokens: &mut Vec<String>| {
        for w in tokenize(text, lang).words() {
            tokens.push(w.text.clone());
            labels.push(kind);
        }
    };
    while let Some(open) = rest.find('[') {
        push_words(&rest[..open], DisfluencyType::Fluent, &mut tokens);
        let close = rest[open..].find(']').ok_or("unclosed '['")? + open;
        let inner = &rest[open + 1..close];
        let (tag, body) = inner.split_once(':').ok_or("expected [TAG: words]")?;
        let kind = match tag.trim() {
            "F" => DisfluencyType::Filler,
            "R" => DisfluencyType::Repetition,
            "C" => DisfluencyType::Correction,
            "S" => DisfluencyType::FalseStart,
            other => return Err(format!("unknown tag {other:?}")),
        };
        push_words(body, kind, &mut tokens);
        rest = &rest[close + 1..];
    }
    if rest.contains(']') {
        return Err("unmatched ']'".into());
    }
    push_words(rest, DisfluencyType::Fluent, &mut tokens);

    let histogram = crate::classifier::TypeHistogram::from_kinds(labels.iter().copied());
    let seed_text = tokens
        .iter()
        .zip(&labels)
        .filter(|(_, l)| !l.is_disfluent())
        .map(|(t, _)| t.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    Ok(AnnotatedUtterance {
        tokens,
        labels,
        lang,
        seed_text,
        injection: crate::classifier::classify_utterance(&histogram),
    })
}

/// Parses a bracketed fixture file; `#` lines and blank lines are skipped.
pub fn parse_bracketed_file(body: &str, lang: LanguageTag) -> Result<Vec<AnnotatedUtterance>, SynthError> {
    body.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| parse_bracketed(l, lang).map_err(|message| SynthError::Parse { line: i + 1, message }))
        .collect()
}

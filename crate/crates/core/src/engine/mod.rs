//! Disfluency correction: label every word fluent or disfluent, drop the
//! disfluent ones, and count what was removed.
//!
//! Labeling goes through the [`TokenLabeler`] trait. [`RuleLabeler`] is the
//! shipped backend: four detectors run in a fixed order (filler, repetition,
//! correction, false start), each seeing the words claimed before it.
//! [`correct`] then re-labels its own output until nothing more is removed,
//! capped at [`MAX_CORRECTION_PASSES`].

pub mod config;
mod detect;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{self, ClassifierError, TypeHistogram};
use crate::text::{self, Token, Transcript};
pub use config::{ConfigError, DetectorConfig, LanguageLexicon};
use detect::WordClaims;

pub const MAX_CORRECTION_PASSES: usize = 3;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("expected {expected} labels (one per word token), got {got}")]
    LabelCountMismatch { expected: usize, got: usize },
    #[error("label {position} refers to token {got}, expected word token {expected}")]
    LabelIndexMismatch { position: usize, expected: usize, got: usize },
    #[error(transparent)]
    Spans(#[from] ClassifierError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DisfluencyType {
    Filler,
    Repetition,
    Correction,
    FalseStart,
    Fluent,
}

impl DisfluencyType {
    pub const ALL: [DisfluencyType; 5] = [
        DisfluencyType::Filler,
        DisfluencyType::Repetition,
        DisfluencyType::Correction,
        DisfluencyType::FalseStart,
        DisfluencyType::Fluent,
    ];

    /// The four disfluent kinds, excluding `Fluent`.
    pub const DISFLUENT: [DisfluencyType; 4] = [
        DisfluencyType::Filler,
        DisfluencyType::Repetition,
        DisfluencyType::Correction,
        DisfluencyType::FalseStart,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DisfluencyType::Filler => "Filler",
            DisfluencyType::Repetition => "Repetition",
            DisfluencyType::Correction => "Correction",
            DisfluencyType::FalseStart => "FalseStart",
            DisfluencyType::Fluent => "Fluent",
        }
    }

    pub fn is_disfluent(self) -> bool {
        self != DisfluencyType::Fluent
    }
}

impl fmt::Display for DisfluencyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DisfluencyType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DisfluencyType::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown disfluency type {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Fluent,
    Disfluent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenLabel {
    pub token_index: usize,
    pub verdict: Verdict,
    #[serde(rename = "type")]
    pub kind: DisfluencyType,
}

impl TokenLabel {
    pub fn fluent(token_index: usize) -> Self {
        TokenLabel { token_index, verdict: Verdict::Fluent, kind: DisfluencyType::Fluent }
    }

    pub fn disfluent(token_index: usize, kind: DisfluencyType) -> Self {
        debug_assert!(kind.is_disfluent());
        TokenLabel { token_index, verdict: Verdict::Disfluent, kind }
    }

    pub fn is_disfluent(&self) -> bool {
        self.verdict == Verdict::Disfluent
    }
}

/// A contiguous run of disfluent words, `[start, end)` in token indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisfluencySpan {
    pub start: usize,
    pub end: usize,
    #[serde(rename = "type")]
    pub kind: DisfluencyType,
    /// Name of the rule that produced the span.
    pub detector: String,
    /// Word tokens inside the span; punctuation in between is not counted.
    pub word_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionResult {
    pub source: Transcript,
    /// One label per word token of `source`.
    pub labels: Vec<TokenLabel>,
    pub spans: Vec<DisfluencySpan>,
    pub fluent: Transcript,
    pub histogram: TypeHistogram,
    pub utterance_type: DisfluencyType,
    pub disfluency_count: usize,
}

impl CorrectionResult {
    pub fn fluent_text(&self) -> String {
        text::detokenize(&self.fluent)
    }
}

/// Anything that can assign one label per word token. A learned model can
/// implement this and reuse [`correct_with`].
pub trait TokenLabeler: Send + Sync {
    fn label(&self, t: &Transcript)
        -> Result<(Vec<TokenLabel>, Vec<DisfluencySpan>), EngineError>;
}

/// The deterministic rule backend.
#[derive(Debug, Clone, Default)]
pub struct RuleLabeler {
    pub config: DetectorConfig,
}

impl RuleLabeler {
    pub fn new(config: DetectorConfig) -> Self {
        RuleLabeler { config }
    }
}

impl TokenLabeler for RuleLabeler {
    fn label(
        &self,
        t: &Transcript,
    ) -> Result<(Vec<TokenLabel>, Vec<DisfluencySpan>), EngineError> {
        label_tokens(t, &self.config)
    }
}

pub fn detect_fillers(
    t: &Transcript,
    cfg: &DetectorConfig,
) -> Result<Vec<DisfluencySpan>, ConfigError> {
    let mut claims = WordClaims::new(t);
    detect::claim_fillers(&mut claims, t, cfg)?;
    Ok(claims.spans(|_| true))
}

/// Repetition spans. Filler words are claimed first (and skipped over) but
/// only repetition spans are returned.
pub fn detect_repetitions(t: &Transcript, cfg: &DetectorConfig) -> Vec<DisfluencySpan> {
    let mut claims = WordClaims::new(t);
    let _ = detect::claim_fillers(&mut claims, t, cfg);
    detect::claim_repetitions(&mut claims, cfg);
    claims.spans(|c| c.kind == DisfluencyType::Repetition)
}

/// Correction spans, computed after the filler and repetition passes.
pub fn detect_corrections(t: &Transcript, cfg: &DetectorConfig) -> Vec<DisfluencySpan> {
    let mut claims = WordClaims::new(t);
    let _ = detect::claim_fillers(&mut claims, t, cfg);
    detect::claim_repetitions(&mut claims, cfg);
    detect::claim_corrections(&mut claims, t, cfg);
    claims.spans(|c| c.kind == DisfluencyType::Correction)
}

/// False-start spans, computed after all other passes.
pub fn detect_false_starts(t: &Transcript, cfg: &DetectorConfig) -> Vec<DisfluencySpan> {
    let mut claims = WordClaims::new(t);
    let _ = detect::claim_fillers(&mut claims, t, cfg);
    detect::claim_repetitions(&mut claims, cfg);
    detect::claim_corrections(&mut claims, t, cfg);
    detect::claim_false_starts(&mut claims, cfg);
    claims.spans(|c| c.kind == DisfluencyType::FalseStart)
}

/// Runs all detectors and returns one label per word token plus the merged
/// spans. Punctuation tokens get no label.
pub fn label_tokens(
    t: &Transcript,
    cfg: &DetectorConfig,
) -> Result<(Vec<TokenLabel>, Vec<DisfluencySpan>), EngineError> {
    let mut claims = WordClaims::new(t);
    detect::claim_fillers(&mut claims, t, cfg)?;
    detect::claim_repetitions(&mut claims, cfg);
    detect::claim_corrections(&mut claims, t, cfg);
    detect::claim_false_starts(&mut claims, cfg);

    let labels = (0..claims.len())
        .map(|w| {
            let token = claims.token_index(w);
            match claims.claim(w) {
                Some(c) => TokenLabel::disfluent(token, c.kind),
                None => TokenLabel::fluent(token),
            }
        })
        .collect();
    Ok((labels, claims.spans(|_| true)))
}

/// Drops disfluent words. Punctuation survives only if the nearest word
/// before it survived; leading punctuation is kept.
pub fn apply_removal(t: &Transcript, labels: &[TokenLabel]) -> Result<Transcript, EngineError> {
    let expected = t.word_count();
    if labels.len() != expected {
        return Err(EngineError::LabelCountMismatch { expected, got: labels.len() });
    }
    let mut labels_iter = labels.iter().enumerate();
    let mut keep_punct = true;
    let mut tokens: Vec<Token> = Vec::with_capacity(t.tokens.len());
    for token in &t.tokens {
        let keep = if token.is_word {
            let (position, label) = labels_iter.next().expect("counted above");
            if label.token_index != token.index {
                return Err(EngineError::LabelIndexMismatch {
                    position,
                    expected: token.index,
                    got: label.token_index,
                });
            }
            keep_punct = !label.is_disfluent();
            keep_punct
        } else {
            keep_punct
        };
        if keep {
            tokens.push(Token { text: token.text.clone(), index: tokens.len(), is_word: token.is_word });
        }
    }
    let raw_text = text::join_tokens(tokens.iter().map(|t| (t.text.as_str(), t.is_word)));
    Ok(Transcript { tokens, lang: t.lang, raw_text })
}

pub fn correct(t: &Transcript, cfg: &DetectorConfig) -> Result<CorrectionResult, EngineError> {
    correct_with(&RuleLabeler::new(cfg.clone()), t)
}

/// Label, remove, and repeat on the output until no word is removed or
/// [`MAX_CORRECTION_PASSES`] passes have run. Labels and spans of later
/// passes are mapped back onto the source tokens.
pub fn correct_with(
    labeler: &dyn TokenLabeler,
    t: &Transcript,
) -> Result<CorrectionResult, EngineError> {
    let (mut labels, mut spans) = labeler.label(t)?;
    let mut current = apply_removal(t, &labels)?;

    for _ in 1..MAX_CORRECTION_PASSES {
        if current.word_count() == 0 {
            break;
        }
        let (pass_labels, pass_spans) = labeler.label(&current)?;
        if !pass_labels.iter().any(TokenLabel::is_disfluent) {
            break;
        }
        // current's k-th word is the k-th surviving source word
        let survivors: Vec<usize> =
            labels.iter().enumerate().filter(|(_, l)| !l.is_disfluent()).map(|(w, _)| w).collect();
        let current_word_of_token = word_positions(&current);
        for (k, label) in pass_labels.iter().enumerate() {
            if label.is_disfluent() {
                let source_word = survivors[k];
                labels[source_word] = TokenLabel::disfluent(labels[source_word].token_index, label.kind);
            }
        }
        for span in pass_spans {
            let words: Vec<usize> = (span.start..span.end)
                .filter_map(|tok| current_word_of_token[tok])
                .map(|k| survivors[k])
                .collect();
            spans.extend(split_into_runs(&words, &labels, &span));
        }
        current = apply_removal(&current, &pass_labels)?;
    }

    spans.sort_by_key(|s| s.start);
    let fluent = apply_removal(t, &labels)?;
    let histogram = classifier::classify_spans(&spans)?;
    let utterance_type = classifier::classify_utterance(&histogram);
    let disfluency_count = t.word_count() - fluent.word_count();
    Ok(CorrectionResult {
        source: t.clone(),
        labels,
        spans,
        fluent,
        histogram,
        utterance_type,
        disfluency_count,
    })
}

/// Source word count minus fluent word count.
pub fn disfluency_count(result: &CorrectionResult) -> usize {
    result.source.word_count() - result.fluent.word_count()
}

/// For each token index, its position among word tokens.
fn word_positions(t: &Transcript) -> Vec<Option<usize>> {
    let mut k = 0;
    t.tokens
        .iter()
        .map(|tok| {
            tok.is_word.then(|| {
                k += 1;
                k - 1
            })
        })
        .collect()
}

/// Splits source word positions into runs of consecutive words.
fn split_into_runs(
    words: &[usize],
    labels: &[TokenLabel],
    template: &DisfluencySpan,
) -> Vec<DisfluencySpan> {
    let mut out: Vec<DisfluencySpan> = Vec::new();
    let mut prev: Option<usize> = None;
    for &w in words {
        let token = labels[w].token_index;
        match out.last_mut() {
            Some(last) if prev == Some(w.wrapping_sub(1)) => {
                last.end = token + 1;
                last.word_count += 1;
            }
            _ => out.push(DisfluencySpan {
                start: token,
                end: token + 1,
                kind: template.kind,
                detector: template.detector.clone(),
                word_count: 1,
            }),
        }
        prev = Some(w);
    }
    out
}

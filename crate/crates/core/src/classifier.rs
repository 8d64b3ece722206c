//! Utterance-level disfluency type.
//!
//! Spans are reduced to a histogram of removed words per type, and the
//! utterance is labeled with the type that removed the most words. Ties go
//! to the more severe type: Correction, then FalseStart, Repetition, Filler.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{DisfluencySpan, DisfluencyType};

/// Tie-break order, most severe first.
pub const TIE_BREAK_PRIORITY: [DisfluencyType; 4] = [
    DisfluencyType::Correction,
    DisfluencyType::FalseStart,
    DisfluencyType::Repetition,
    DisfluencyType::Filler,
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifierError {
    #[error("spans [{0}, {1}) and [{2}, {3}) overlap")]
    Overlap(usize, usize, usize, usize),
    #[error("span [{0}, {1}) has type Fluent")]
    FluentSpan(usize, usize),
}

/// Removed-word counts per disfluent type.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeHistogram {
    #[serde(rename = "Filler")]
    pub filler: usize,
    #[serde(rename = "Repetition")]
    pub repetition: usize,
    #[serde(rename = "Correction")]
    pub correction: usize,
    #[serde(rename = "FalseStart")]
    pub false_start: usize,
}

impl TypeHistogram {
    pub fn get(&self, kind: DisfluencyType) -> usize {
        match kind {
            DisfluencyType::Filler => self.filler,
            DisfluencyType::Repetition => self.repetition,
            DisfluencyType::Correction => self.correction,
            DisfluencyType::FalseStart => self.false_start,
            DisfluencyType::Fluent => 0,
        }
    }

    /// Adds `n` words of `kind`; `Fluent` is ignored.
    pub fn add(&mut self, kind: DisfluencyType, n: usize) {
        match kind {
            DisfluencyType::Filler => self.filler += n,
            DisfluencyType::Repetition => self.repetition += n,
            DisfluencyType::Correction => self.correction += n,
            DisfluencyType::FalseStart => self.false_start += n,
            DisfluencyType::Fluent => {}
        }
    }

    pub fn total(&self) -> usize {
        self.filler + self.repetition + self.correction + self.false_start
    }

    /// Builds a histogram from per-word types.
    pub fn from_kinds(kinds: impl IntoIterator<Item = DisfluencyType>) -> Self {
        let mut h = TypeHistogram::default();
        for k in kinds {
            h.add(k, 1);
        }
        h
    }
}

pub fn classify_spans(spans: &[DisfluencySpan]) -> Result<TypeHistogram, ClassifierError> {
    let mut sorted: Vec<&DisfluencySpan> = spans.iter().collect();
    sorted.sort_by_key(|s| (s.start, s.end));
    for pair in sorted.windows(2) {
        if pair[1].start < pair[0].end {
            return Err(ClassifierError::Overlap(pair[0].start, pair[0].end, pair[1].start, pair[1].end));
        }
    }
    let mut hist = TypeHistogram::default();
    for span in spans {
        if !span.kind.is_disfluent() {
            return Err(ClassifierError::FluentSpan(span.start, span.end));
        }
        hist.add(span.kind, span.word_count);
    }
    Ok(hist)
}

pub fn classify_utterance(hist: &TypeHistogram) -> DisfluencyType {
    if hist.total() == 0 {
        return DisfluencyType::Fluent;
    }
    let rank = |k: DisfluencyType| TIE_BREAK_PRIORITY.len() - TIE_BREAK_PRIORITY.iter().position(|&p| p == k).unwrap();
    TIE_BREAK_PRIORITY
        .into_iter()
        .max_by_key(|&k| (hist.get(k), rank(k)))
        .expect("non-empty priority list")
}

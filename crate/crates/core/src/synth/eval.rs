use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{AnnotatedUtterance, SynthError};
use crate::classifier::{classify_utterance, TypeHistogram};
use crate::engine::{correct, DetectorConfig, DisfluencyType};
use crate::text::Transcript;

/// Token-level precision/recall/F1 with disfluent as the positive class.
///
/// An empty denominator counts as perfect: precision is 1 when nothing was
/// predicted, recall is 1 when nothing was gold.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub tokens: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    tp: usize,
    fp: usize,
    fn_: usize,
    tokens: usize,
}

impl Counts {
    fn prf(self) -> Prf {
        let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
        let precision = ratio(self.tp, self.tp + self.fp);
        let recall = ratio(self.tp, self.tp + self.fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            precision,
            recall,
            f1,
            true_positives: self.tp,
            false_positives: self.fp,
            false_negatives: self.fn_,
            tokens: self.tokens,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub overall: Prf,
    /// Micro-averaged over the utterances of each injection type.
    pub per_type: BTreeMap<DisfluencyType, Prf>,
    pub utterance_type_accuracy: f64,
    pub corpus_size: usize,
}

impl EvalReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<12} {:>9} {:>9} {:>9} {:>7} {:>7} {:>7} {:>8}",
            "type", "precision", "recall", "f1", "tp", "fp", "fn", "tokens"
        );
        let mut row = |name: &str, p: &Prf| {
            let _ = writeln!(
                out,
                "{:<12} {:>9.4} {:>9.4} {:>9.4} {:>7} {:>7} {:>7} {:>8}",
                name, p.precision, p.recall, p.f1, p.true_positives, p.false_positives,
                p.false_negatives, p.tokens
            );
        };
        for (kind, p) in &self.per_type {
            row(kind.name(), p);
        }
        row("overall", &self.overall);
        let _ = writeln!(out, "utterance type accuracy: {:.4}", self.utterance_type_accuracy);
        let _ = writeln!(out, "corpus size: {}", self.corpus_size);
        out
    }
}

/// The rule engine as a labeler: per-token types after full correction.
pub fn engine_labeler(
    cfg: &DetectorConfig,
) -> impl Fn(&AnnotatedUtterance) -> Result<Vec<DisfluencyType>, String> + Sync + '_ {
    move |u: &AnnotatedUtterance| {
        let t = Transcript::from_words(&u.tokens, u.lang);
        let result = correct(&t, cfg).map_err(|e| e.to_string())?;
        Ok(result.labels.iter().map(|l| l.kind).collect())
    }
}

/// Scores `labeler` (one type per token, `Fluent` = negative) against gold.
pub fn evaluate<F>(gold: &[AnnotatedUtterance], labeler: F) -> Result<EvalReport, SynthError>
where
    F: Fn(&AnnotatedUtterance) -> Result<Vec<DisfluencyType>, String>,
{
    if gold.is_empty() {
        return Err(SynthError::EmptyCorpus);
    }
    let mut overall = Counts::default();
    let mut per_type: BTreeMap<DisfluencyType, Counts> = BTreeMap::new();
    let mut type_hits = 0usize;

    for (index, u) in gold.iter().enumerate() {
        let predicted = labeler(u).map_err(|message| SynthError::Labeler {
            index,
            seed_text: u.seed_text.clone(),
            message,
        })?;
        if predicted.len() != u.tokens.len() {
            return Err(SynthError::LabelCountMismatch {
                index,
                seed_text: u.seed_text.clone(),
                expected: u.tokens.len(),
                got: predicted.len(),
            });
        }
        let group = per_type.entry(u.injection).or_default();
        for (g, p) in u.labels.iter().zip(&predicted) {
            for c in [&mut overall, &mut *group] {
                c.tokens += 1;
                match (g.is_disfluent(), p.is_disfluent()) {
                    (true, true) => c.tp += 1,
                    (false, true) => c.fp += 1,
                    (true, false) => c.fn_ += 1,
                    (false, false) => {}
                }
            }
        }
        let predicted_type = classify_utterance(&TypeHistogram::from_kinds(predicted));
        if predicted_type == u.injection {
            type_hits += 1;
        }
    }

    Ok(EvalReport {
        overall: overall.prf(),
        per_type: per_type.into_iter().map(|(k, c)| (k, c.prf())).collect(),
        utterance_type_accuracy: type_hits as f64 / gold.len() as f64,
        corpus_size: gold.len(),
    })
}

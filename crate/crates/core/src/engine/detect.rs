//! The four rule detectors and the token-claiming state they share.
//!
//! Detectors work on the word view of a transcript (punctuation dropped)
//! and claim word positions. A claimed word is never re-labeled by a later
//! detector, with one exception: an editing phrase such as "no no" that the
//! repetition pass already claimed is absorbed into the correction around it.

use super::config::{ConfigError, DetectorConfig};
use super::{DisfluencySpan, DisfluencyType};
use crate::text::Transcript;

pub(crate) const FILLER_DETECTOR: &str = "filler-lexicon";
pub(crate) const REPETITION_DETECTOR: &str = "ngram-repeat";
pub(crate) const CORRECTION_DETECTOR: &str = "editing-term";
pub(crate) const TRUNCATION_DETECTOR: &str = "false-start-truncation";
pub(crate) const RESTART_DETECTOR: &str = "false-start-restart";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Claim {
    pub kind: DisfluencyType,
    pub group: usize,
    pub detector: &'static str,
}

/// Lowercased words of a transcript plus per-word claims.
pub(crate) struct WordClaims {
    /// Transcript token index of each word.
    token_index: Vec<usize>,
    lowered: Vec<String>,
    claims: Vec<Option<Claim>>,
    next_group: usize,
}

impl WordClaims {
    pub fn new(t: &Transcript) -> Self {
        let (token_index, lowered): (Vec<_>, Vec<_>) =
            t.words().map(|w| (w.index, w.text.to_lowercase())).unzip();
        let claims = vec![None; token_index.len()];
        WordClaims { token_index, lowered, claims, next_group: 0 }
    }

    pub fn len(&self) -> usize {
        self.lowered.len()
    }

    pub fn claim(&self, word: usize) -> Option<Claim> {
        self.claims[word]
    }

    fn is_free(&self, word: usize) -> bool {
        self.claims[word].is_none()
    }

    fn new_group(&mut self) -> usize {
        self.next_group += 1;
        self.next_group - 1
    }

    fn mark(&mut self, words: &[usize], kind: DisfluencyType, detector: &'static str) {
        let group = self.new_group();
        for &w in words {
            self.claims[w] = Some(Claim { kind, group, detector });
        }
    }

    /// Word positions not claimed by the filler pass.
    fn without_fillers(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&w| !matches!(self.claims[w], Some(c) if c.kind == DisfluencyType::Filler))
            .collect()
    }

    fn unclaimed(&self) -> Vec<usize> {
        (0..self.len()).filter(|&w| self.is_free(w)).collect()
    }

    /// Spans for every group whose claim satisfies `keep`, split into runs of
    /// consecutive words, sorted by start.
    pub fn spans(&self, keep: impl Fn(&Claim) -> bool) -> Vec<DisfluencySpan> {
        let mut spans: Vec<DisfluencySpan> = Vec::new();
        let mut prev: Option<Claim> = None;
        for (w, claim) in self.claims.iter().enumerate() {
            match claim {
                Some(c) if keep(c) => {
                    let token = self.token_index[w];
                    match spans.last_mut() {
                        Some(last) if prev.is_some_and(|p| p.group == c.group) => {
                            last.end = token + 1;
                            last.word_count += 1;
                        }
                        _ => spans.push(DisfluencySpan {
                            start: token,
                            end: token + 1,
                            kind: c.kind,
                            detector: c.detector.to_string(),
                            word_count: 1,
                        }),
                    }
                    prev = Some(*c);
                }
                _ => prev = None,
            }
        }
        spans
    }

    pub fn token_index(&self, word: usize) -> usize {
        self.token_index[word]
    }
}

/// Fillers: lexicon membership; adjacent fillers share one span.
pub(crate) fn claim_fillers(
    claims: &mut WordClaims,
    t: &Transcript,
    cfg: &DetectorConfig,
) -> Result<(), ConfigError> {
    let lexicon = cfg.lexicon(t.lang)?;
    let mut group: Option<usize> = None;
    for w in 0..claims.len() {
        if claims.is_free(w) && lexicon.is_filler(&claims.lowered[w]) {
            let g = match group {
                Some(g) => g,
                None => {
                    let g = claims.new_group();
                    group = Some(g);
                    g
                }
            };
            claims.claims[w] =
                Some(Claim { kind: DisfluencyType::Filler, group: g, detector: FILLER_DETECTOR });
        } else {
            group = None;
        }
    }
    Ok(())
}

/// Immediate n-gram repeats, longest n first. All copies but the last are
/// claimed as one group. Filler-claimed words are skipped when comparing.
pub(crate) fn claim_repetitions(claims: &mut WordClaims, cfg: &DetectorConfig) {
    let seq = claims.without_fillers();
    let same = |claims: &WordClaims, a: usize, b: usize, n: usize| {
        (0..n).all(|k| claims.lowered[seq[a + k]] == claims.lowered[seq[b + k]])
    };
    let free = |claims: &WordClaims, from: usize, n: usize| {
        seq[from..from + n].iter().all(|&w| claims.is_free(w))
    };

    for n in (1..=cfg.max_repeat_ngram()).rev() {
        let mut i = 0;
        while i + 2 * n <= seq.len() {
            if !free(claims, i, 2 * n) || !same(claims, i, i + n, n) {
                i += 1;
                continue;
            }
            let mut copies = 2;
            while i + (copies + 1) * n <= seq.len()
                && free(claims, i + copies * n, n)
                && same(claims, i, i + copies * n, n)
            {
                copies += 1;
            }
            let removed = &seq[i..i + (copies - 1) * n];
            claims.mark(removed, DisfluencyType::Repetition, REPETITION_DETECTOR);
            i += (copies - 1) * n;
        }
    }
}

/// Reparandum + editing term, with the repair left fluent. The reparandum is
/// one word unless a longer run (bounded by the repair length) starts with
/// the repair's first word, in which case the shortest such run is taken.
pub(crate) fn claim_corrections(claims: &mut WordClaims, t: &Transcript, cfg: &DetectorConfig) {
    let Ok(lexicon) = cfg.lexicon(t.lang) else {
        return;
    };
    let seq = claims.without_fillers();
    let mut p = 0;
    'scan: while p < seq.len() {
        for term in lexicon.editing_terms() {
            let len = term.len();
            if p + len > seq.len() {
                continue;
            }
            let window = &seq[p..p + len];
            if !window.iter().zip(term).all(|(&w, t)| claims.lowered[w] == *t) {
                continue;
            }
            if !term_is_claimable(claims, window) {
                continue;
            }
            let after: Vec<usize> =
                seq[p + len..].iter().copied().filter(|&w| claims.is_free(w)).collect();
            let Some(&repair_first) = after.first() else {
                continue;
            };
            let mut words = match restated_term_prefix(claims, &seq[..p], window) {
                Some(group_words) => group_words,
                None => {
                    // reparandum candidates, nearest first
                    let before: Vec<usize> = seq[..p]
                        .iter()
                        .rev()
                        .copied()
                        .take_while(|&w| claims.is_free(w))
                        .collect();
                    if before.is_empty() {
                        continue;
                    }
                    let max_len = before.len().min(after.len()).min(cfg.max_repeat_ngram());
                    let reparandum_len = (1..=max_len)
                        .find(|&l| claims.lowered[before[l - 1]] == claims.lowered[repair_first])
                        .unwrap_or(1);
                    let mut words = before[..reparandum_len].to_vec();
                    words.reverse();
                    words
                }
            };
            words.extend_from_slice(window);
            claims.mark(&words, DisfluencyType::Correction, CORRECTION_DETECTOR);
            p += len;
            continue 'scan;
        }
        p += 1;
    }
}

/// When the words right before the term are a repetition group that re-says
/// the term's opening words ("I I mean"), that group becomes the reparandum.
fn restated_term_prefix(claims: &WordClaims, before: &[usize], window: &[usize]) -> Option<Vec<usize>> {
    let &last = before.last()?;
    let claim = claims.claims[last]?;
    if claim.kind != DisfluencyType::Repetition {
        return None;
    }
    let group: Vec<usize> = (0..claims.len())
        .filter(|&w| claims.claims[w].is_some_and(|c| c.group == claim.group))
        .collect();
    let k = group.len();
    let contiguous = before.len() >= k && before[before.len() - k..] == group[..];
    let restates = k <= window.len()
        && group.iter().zip(window).all(|(&g, &w)| claims.lowered[g] == claims.lowered[w]);
    (contiguous && restates).then_some(group)
}

/// A term window may be claimed if every word is free, or belongs to a
/// repetition group lying entirely inside the window.
fn term_is_claimable(claims: &WordClaims, window: &[usize]) -> bool {
    window.iter().all(|&w| match claims.claims[w] {
        None => true,
        Some(c) if c.kind == DisfluencyType::Repetition => claims
            .claims
            .iter()
            .enumerate()
            .filter(|(_, other)| other.is_some_and(|o| o.group == c.group))
            .all(|(pos, _)| window.contains(&pos)),
        Some(_) => false,
    })
}

/// Utterance-initial abandoned fragments: either a truncated word ending in
/// `-` within the window, or a restart that re-says the first two words.
pub(crate) fn claim_false_starts(claims: &mut WordClaims, cfg: &DetectorConfig) {
    let seq = claims.unclaimed();
    let n = seq.len();
    let window = cfg.false_start_window().min(n);
    let word = |i: usize| claims.lowered[seq[i]].as_str();

    let truncated = (0..window)
        .rev()
        .find(|&i| i + 1 < n && word(i).ends_with('-') && !word(i).trim_end_matches('-').is_empty());
    if let Some(h) = truncated {
        let words = seq[..=h].to_vec();
        claims.mark(&words, DisfluencyType::FalseStart, TRUNCATION_DETECTOR);
        return;
    }

    if n < 4 {
        return;
    }
    let restart = (2..window).find(|&j| {
        j + 1 < n
            && word(j) == word(0)
            && word(j + 1) == word(1)
            && n - j > j
            && !(0..j).all(|k| j + k < n && word(k) == word(j + k))
    });
    if let Some(j) = restart {
        let words = seq[..j].to_vec();
        claims.mark(&words, DisfluencyType::FalseStart, RESTART_DETECTOR);
    }
}

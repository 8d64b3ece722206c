//! Speech-to-speech disfluency correction.
//!
//! The text side labels every word of an utterance as fluent or disfluent,
//! removes the disfluent words, types the utterance (filler, repetition,
//! correction, false start, or fluent) and counts the removed words. The
//! audio side wraps that in an ASR → correction → TTS pipeline with
//! pluggable backends, served over HTTP.

pub mod classifier;
pub mod cli;
pub mod engine;
pub mod pipeline;
pub mod service;
pub mod synth;
pub mod text;
pub mod topics;

pub use classifier::{classify_spans, classify_utterance, TypeHistogram};
pub use engine::{
    apply_removal, correct, correct_with, disfluency_count, label_tokens, CorrectionResult,
    DetectorConfig, DisfluencySpan, DisfluencyType, RuleLabeler, TokenLabel, TokenLabeler, Verdict,
};
pub use text::{detokenize, tokenize, LanguageTag, Token, Transcript};

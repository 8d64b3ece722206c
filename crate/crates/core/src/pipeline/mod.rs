//! Speech in, fluent speech out: ASR, correction, and TTS over pluggable
//! backends, with both clips kept in an [`AudioStore`].

pub mod audio;
pub mod backend;
pub mod http;
pub mod store;

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use audio::{decode_canonical, decode_wav, encode_wav, AudioClip, AudioError, CANONICAL_SAMPLE_RATE};
pub use backend::{
    clip_digest, AsrBackend, BackendError, MockAsr, MockTts, Synthesis, Transcription, TtsBackend,
};
pub use http::{HttpAsr, HttpTts};
pub use store::AudioStore;

use crate::engine::{correct_with, CorrectionResult, DetectorConfig, EngineError, RuleLabeler};
use crate::text::{tokenize, LanguageTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Asr,
    Dc,
    Tts,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Asr => "asr",
            Stage::Dc => "dc",
            Stage::Tts => "tts",
        })
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("unsupported language {0:?}")]
    UnsupportedLanguage(String),
    #[error("invalid audio: {0}")]
    InvalidAudio(#[from] AudioError),
    #[error("{stage} stage failed: {source}")]
    Backend { stage: Stage, source: BackendError },
    #[error("dc stage failed: {0}")]
    Engine(#[from] EngineError),
}

impl PipelineError {
    pub fn stage(&self) -> Option<Stage> {
        match self {
            PipelineError::Backend { stage, .. } => Some(*stage),
            PipelineError::Engine(_) => Some(Stage::Dc),
            _ => None,
        }
    }
}

/// Wall-clock milliseconds per stage, rounded down.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub asr_ms: u64,
    pub dc_ms: u64,
    pub tts_ms: u64,
    pub total_ms: u64,
    pub asr_attempts: u32,
    /// 0 when synthesis was skipped for an empty fluent transcript.
    pub tts_attempts: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub correction: CorrectionResult,
    pub raw_audio_id: String,
    pub fluent_audio_id: String,
    pub fluent_audio_ms: u64,
    pub timings: Timings,
}

fn elapsed_ms(since: Instant) -> u64 {
    since.elapsed().as_millis() as u64
}

pub struct Pipeline {
    asr: Arc<dyn AsrBackend>,
    tts: Arc<dyn TtsBackend>,
    labeler: RuleLabeler,
    store: Arc<AudioStore>,
}

impl Pipeline {
    pub fn new(
        asr: Arc<dyn AsrBackend>,
        tts: Arc<dyn TtsBackend>,
        config: DetectorConfig,
        store: Arc<AudioStore>,
    ) -> Self {
        Pipeline { asr, tts, labeler: RuleLabeler::new(config), store }
    }

    /// Mock ASR without fixtures (INFO comments only) and beep-code TTS.
    pub fn mock(config: DetectorConfig, store: Arc<AudioStore>) -> Self {
        Pipeline::new(Arc::new(MockAsr::new()), Arc::new(MockTts), config, store)
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.labeler.config
    }

    pub fn store(&self) -> &Arc<AudioStore> {
        &self.store
    }

    /// Runs an uploaded WAV file; the raw audio id replays `wav` verbatim.
    pub async fn process_wav(&self, wav: &[u8], lang: LanguageTag) -> Result<PipelineResult, PipelineError> {
        self.check_language(lang)?;
        let clip = decode_canonical(wav)?;
        self.run(&clip, wav.to_vec(), lang).await
    }

    /// Runs a clip; the raw audio id replays its PCM16 encoding.
    pub async fn process(&self, audio: &AudioClip, lang: LanguageTag) -> Result<PipelineResult, PipelineError> {
        self.check_language(lang)?;
        let canonical = audio.resample(CANONICAL_SAMPLE_RATE);
        self.run(&canonical, encode_wav(audio), lang).await
    }

    fn check_language(&self, lang: LanguageTag) -> Result<(), PipelineError> {
        self.labeler
            .config
            .lexicon(lang)
            .map(|_| ())
            .map_err(|_| PipelineError::UnsupportedLanguage(lang.code().to_string()))
    }

    async fn run(&self, clip: &AudioClip, raw: Vec<u8>, lang: LanguageTag) -> Result<PipelineResult, PipelineError> {
        let start = Instant::now();

        let t = Instant::now();
        let transcription = self
            .asr
            .transcribe(clip, lang)
            .await
            .map_err(|source| PipelineError::Backend { stage: Stage::Asr, source })?;
        let asr_ms = elapsed_ms(t);

        let t = Instant::now();
        let correction = correct_with(&self.labeler, &tokenize(&transcription.text, lang))?;
        let dc_ms = elapsed_ms(t);

        let t = Instant::now();
        let fluent_text = correction.fluent_text();
        let (fluent_clip, tts_attempts) = if correction.fluent.word_count() == 0 {
            (AudioClip::silent(CANONICAL_SAMPLE_RATE), 0)
        } else {
            let s = self
                .tts
                .synthesize(&fluent_text, lang)
                .await
                .map_err(|source| PipelineError::Backend { stage: Stage::Tts, source })?;
            (s.clip, s.attempts)
        };
        let tts_ms = elapsed_ms(t);

        let raw_audio_id = self.store.put(raw);
        let fluent_audio_id = self.store.put(encode_wav(&fluent_clip));
        Ok(PipelineResult {
            correction,
            raw_audio_id,
            fluent_audio_id,
            fluent_audio_ms: fluent_clip.duration_ms(),
            timings: Timings {
                asr_ms,
                dc_ms,
                tts_ms,
                total_ms: elapsed_ms(start),
                asr_attempts: transcription.attempts,
                tts_attempts,
            },
        })
    }
}

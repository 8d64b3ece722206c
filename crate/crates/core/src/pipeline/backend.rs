use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::audio::{AudioClip, CANONICAL_SAMPLE_RATE};
use crate::text::{tokenize, LanguageTag};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BackendError {
    #[error("request timed out after {attempts} attempt(s)")]
    Timeout { attempts: u32 },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("remote returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("no fixture transcript for clip {digest}")]
    NoFixture { digest: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcription {
    pub text: String,
    /// Requests sent, including one retry after a timeout.
    pub attempts: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synthesis {
    pub clip: AudioClip,
    pub attempts: u32,
}

#[async_trait]
pub trait AsrBackend: Send + Sync {
    async fn transcribe(&self, audio: &AudioClip, lang: LanguageTag) -> Result<Transcription, BackendError>;
}

#[async_trait]
pub trait TtsBackend: Send + Sync {
    /// Empty text must give a clip with no samples.
    async fn synthesize(&self, text: &str, lang: LanguageTag) -> Result<Synthesis, BackendError>;
}

/// SHA-256 over the clip's little-endian PCM16 samples, hex encoded.
/// The sample rate and comment do not take part.
pub fn clip_digest(clip: &AudioClip) -> String {
    hex::encode(Sha256::digest(clip.pcm_bytes()))
}

/// Looks transcripts up by [`clip_digest`], falling back to the WAV comment.
#[derive(Debug, Clone, Default)]
pub struct MockAsr {
    table: HashMap<String, String>,
}

impl MockAsr {
    pub fn new() -> Self {
        MockAsr::default()
    }

    pub fn register(&mut self, clip: &AudioClip, transcript: impl Into<String>) -> String {
        let digest = clip_digest(clip);
        self.table.insert(digest.clone(), transcript.into());
        digest
    }

    pub fn insert_digest(&mut self, digest: impl Into<String>, transcript: impl Into<String>) {
        self.table.insert(digest.into().to_lowercase(), transcript.into());
    }

    /// Reads a JSON object mapping hex digests to transcripts.
    pub fn load_table(path: &Path) -> std::io::Result<Self> {
        let body = std::fs::read_to_string(path)?;
        let entries: HashMap<String, String> = serde_json::from_str(&body)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        let mut asr = MockAsr::new();
        for (digest, text) in entries {
            asr.insert_digest(digest, text);
        }
        Ok(asr)
    }

    pub fn lookup(&self, clip: &AudioClip) -> Result<String, BackendError> {
        let digest = clip_digest(clip);
        if let Some(text) = self.table.get(&digest) {
            return Ok(text.clone());
        }
        clip.comment.clone().ok_or(BackendError::NoFixture { digest })
    }
}

#[async_trait]
impl AsrBackend for MockAsr {
    async fn transcribe(&self, audio: &AudioClip, _lang: LanguageTag) -> Result<Transcription, BackendError> {
        Ok(Transcription { text: self.lookup(audio)?, attempts: 1 })
    }
}

pub const BEEP_SAMPLES: usize = 1600;
pub const GAP_SAMPLES: usize = 800;
pub const BEEP_HZ: f64 = 440.0;
pub const BEEP_AMPLITUDE: f64 = 0.5;

/// Beep code: one 100 ms 440 Hz tone per word, 50 ms of silence between
/// words, 16 kHz mono.
#[derive(Debug, Clone, Copy, Default)]
pub struct MockTts;

impl MockTts {
    pub fn render(text: &str, lang: LanguageTag) -> AudioClip {
        let words = tokenize(text, lang).word_count();
        let beep: Vec<i16> = (0..BEEP_SAMPLES)
            .map(|n| {
                let t = n as f64 / CANONICAL_SAMPLE_RATE as f64;
                (BEEP_AMPLITUDE * (2.0 * PI * BEEP_HZ * t).sin() * 32767.0).round() as i16
            })
            .collect();
        let mut samples = Vec::with_capacity(words * (BEEP_SAMPLES + GAP_SAMPLES));
        for i in 0..words {
            if i > 0 {
                samples.extend(std::iter::repeat_n(0, GAP_SAMPLES));
            }
            samples.extend_from_slice(&beep);
        }
        AudioClip::new(samples, CANONICAL_SAMPLE_RATE)
    }
}

#[async_trait]
impl TtsBackend for MockTts {
    async fn synthesize(&self, text: &str, lang: LanguageTag) -> Result<Synthesis, BackendError> {
        Ok(Synthesis { clip: MockTts::render(text, lang), attempts: 1 })
    }
}

use std::net::IpAddr;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::ServiceError;
use crate::text::LanguageTag;

pub const MIB: usize = 1024 * 1024;
pub const MIN_UPLOAD_BYTES: usize = MIB;
pub const DEFAULT_UPLOAD_BYTES: usize = 10 * MIB;
pub const CORRECT_BODY_LIMIT: usize = 64 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendMode {
    Mock,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceConfig {
    pub host: IpAddr,
    pub port: u16,
    pub backend_mode: BackendMode,
    pub asr_url: Option<String>,
    pub tts_url: Option<String>,
    /// Digest table for the mock ASR; WAV comments work without it.
    pub asr_fixtures: Option<PathBuf>,
    pub backend_timeout_ms: u64,
    /// Directory with `<lang>/fillers.txt` and `<lang>/editing_terms.txt`;
    /// the built-in lexicons when unset.
    pub lexicon_dir: Option<PathBuf>,
    /// Prompt bank JSONL; the built-in bank when unset.
    pub prompt_bank_path: Option<PathBuf>,
    pub audio_ttl_seconds: u64,
    pub max_upload_bytes: usize,
    pub languages: Vec<LanguageTag>,
    /// Allowed browser origins; `*` allows any.
    pub cors_origins: Vec<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            host: IpAddr::from([127, 0, 0, 1]),
            port: 8080,
            backend_mode: BackendMode::Mock,
            asr_url: None,
            tts_url: None,
            asr_fixtures: None,
            backend_timeout_ms: 30_000,
            lexicon_dir: None,
            prompt_bank_path: None,
            audio_ttl_seconds: 15 * 60,
            max_upload_bytes: DEFAULT_UPLOAD_BYTES,
            languages: LanguageTag::ALL.to_vec(),
            cors_origins: vec!["*".into()],
        }
    }
}

impl ServiceConfig {
    pub fn validate(&self) -> Result<(), ServiceError> {
        let bad = |m: &str| Err(ServiceError::Config(m.to_string()));
        if self.backend_mode == BackendMode::Remote && (self.asr_url.is_none() || self.tts_url.is_none()) {
            return bad("remote backend mode needs both --asr-url and --tts-url");
        }
        if self.max_upload_bytes < MIN_UPLOAD_BYTES {
            return bad("--max-upload must be at least 1 MiB (1048576 bytes)");
        }
        if self.languages.is_empty() {
            return bad("at least one language must be enabled");
        }
        if self.backend_timeout_ms == 0 {
            return bad("backend timeout must be positive");
        }
        for origin in &self.cors_origins {
            if origin != "*" && axum::http::HeaderValue::from_str(origin).is_err() {
                return Err(ServiceError::Config(format!("invalid CORS origin {origin:?}")));
            }
        }
        Ok(())
    }
}

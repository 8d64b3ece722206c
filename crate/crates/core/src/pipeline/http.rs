//! Adapters for ASR and TTS models running as HTTP services.
//!
//! ASR: `POST <asr_url>` with a multipart body holding `audio` (WAV file)
//! and `lang`; the reply is `{"text": "..."}`.
//! TTS: `POST <tts_url>` with `{"text": "...", "lang": "..."}`; the reply is
//! a WAV file.

use std::future::Future;
use std::time::Duration;

use async_trait::async_trait;
use reqwest::multipart::{Form, Part};
use reqwest::{Client, Response};
use serde::{Deserialize, Serialize};

use super::audio::{decode_canonical, encode_wav, AudioClip};
use super::backend::{AsrBackend, BackendError, Synthesis, Transcription, TtsBackend};
use crate::text::LanguageTag;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

fn client(timeout: Duration) -> Client {
    Client::builder().timeout(timeout).build().expect("HTTP client configuration is static")
}

/// Sends, retrying once if the first attempt times out. Other failures and
/// non-2xx replies are returned at once.
async fn send_with_retry<F, Fut>(send: F) -> Result<(Response, u32), BackendError>
where
    F: Fn() -> Fut,
    Fut: Future<Output = reqwest::Result<Response>>,
{
    let mut attempts = 0;
    loop {
        attempts += 1;
        match send().await {
            Ok(resp) if resp.status().is_success() => return Ok((resp, attempts)),
            Ok(resp) => {
                let status = resp.status().as_u16();
                let body = resp.text().await.unwrap_or_default();
                return Err(BackendError::Status { status, body });
            }
            Err(e) if e.is_timeout() => {
                if attempts >= 2 {
                    return Err(BackendError::Timeout { attempts });
                }
            }
            Err(e) => return Err(BackendError::Transport(e.to_string())),
        }
    }
}

fn body_error(e: reqwest::Error) -> BackendError {
    if e.is_timeout() {
        BackendError::Timeout { attempts: 1 }
    } else {
        BackendError::Malformed(e.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct HttpAsr {
    client: Client,
    url: String,
}

impl HttpAsr {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Self {
        HttpAsr { client: client(timeout), url: url.into() }
    }
}

#[derive(Deserialize)]
struct AsrReply {
    text: String,
}

#[async_trait]
impl AsrBackend for HttpAsr {
    async fn transcribe(&self, audio: &AudioClip, lang: LanguageTag) -> Result<Transcription, BackendError> {
        let wav = encode_wav(&AudioClip { comment: None, ..audio.clone() });
        let (resp, attempts) = send_with_retry(|| {
            let part = Part::bytes(wav.clone()).file_name("audio.wav").mime_str("audio/wav").expect("static mime");
            let form = Form::new().part("audio", part).text("lang", lang.code());
            self.client.post(&self.url).multipart(form).send()
        })
        .await?;
        let reply: AsrReply = resp.json().await.map_err(body_error)?;
        Ok(Transcription { text: reply.text, attempts })
    }
}

#[derive(Debug, Clone)]
pub struct HttpTts {
    client: Client,
    url: String,
}

impl HttpTts {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Self {
        HttpTts { client: client(timeout), url: url.into() }
    }
}

#[derive(Serialize)]
struct TtsRequest<'a> {
    text: &'a str,
    lang: &'a str,
}

#[async_trait]
impl TtsBackend for HttpTts {
    async fn synthesize(&self, text: &str, lang: LanguageTag) -> Result<Synthesis, BackendError> {
        let body = TtsRequest { text, lang: lang.code() };
        let (resp, attempts) = send_with_retry(|| self.client.post(&self.url).json(&body).send()).await?;
        let bytes = resp.bytes().await.map_err(body_error)?;
        let clip = decode_canonical(&bytes).map_err(|e| BackendError::Malformed(format!("TTS audio: {e}")))?;
        Ok(Synthesis { clip, attempts })
    }
}

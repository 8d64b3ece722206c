//! HTTP API over the correction engine, the pipeline, the prompt bank and
//! the audio store.
//!
//! | route | |
//! |---|---|
//! | `GET /health` | `{"status": "ok", "version": ...}` |
//! | `GET /api/languages` | `{"languages": ["en", "hi"]}` |
//! | `GET /api/topic?lang=&seed=` | one prompt |
//! | `POST /api/correct` | `{"text", "lang"}` → correction |
//! | `POST /api/process` | multipart `audio` + `lang` → correction, audio URLs, timings |
//! | `GET /api/audio/{id}` | stored WAV (also `HEAD`) |
//!
//! Errors are `{"code", "message"}`, plus `"stage"` for pipeline failures.

pub mod config;

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Duration;

use axum::body::{to_bytes, Body};
use axum::extract::{DefaultBodyLimit, Multipart, Path, Query, Request, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

pub use config::{BackendMode, ServiceConfig, CORRECT_BODY_LIMIT};

use crate::classifier::TypeHistogram;
use crate::engine::{correct, CorrectionResult, DetectorConfig, DisfluencySpan, DisfluencyType, TokenLabel};
use crate::pipeline::{
    AsrBackend, AudioStore, HttpAsr, HttpTts, MockAsr, MockTts, Pipeline, PipelineError, PipelineResult, Stage,
    Timings, TtsBackend,
};
use crate::text::{tokenize, LanguageTag, Token};
use crate::topics::{load_bank, random_prompt, Prompt, PromptBank, TopicError};

/// Slack on top of `max_upload_bytes` for multipart framing and the `lang`
/// field.
const MULTIPART_OVERHEAD: usize = 16 * 1024;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Lexicon(#[from] crate::engine::ConfigError),
    #[error(transparent)]
    Topics(#[from] TopicError),
    #[error("cannot read ASR fixture table {path}: {source}")]
    Fixtures { path: String, source: std::io::Error },
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
    #[error("server error: {0}")]
    Serve(std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<Stage>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status, body: ErrorBody { code: code.into(), message: message.into(), stage: None } }
    }

    fn bad_request(code: &str, message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, code, message)
    }

    fn too_large(limit: usize) -> Self {
        ApiError::new(StatusCode::PAYLOAD_TOO_LARGE, "payload_too_large", format!("request body exceeds {limit} bytes"))
    }

    fn not_found(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "not_found", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        let message = e.to_string();
        let stage = e.stage();
        let mut err = match e {
            PipelineError::UnsupportedLanguage(_) => ApiError::bad_request("unsupported_language", message),
            PipelineError::InvalidAudio(_) => ApiError::bad_request("invalid_audio", message),
            PipelineError::Backend { .. } => ApiError::new(StatusCode::BAD_GATEWAY, "backend_failure", message),
            PipelineError::Engine(_) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "correction_failed", message),
        };
        err.body.stage = stage;
        err
    }
}

/// The JSON shape of a correction, shared by `/api/correct` and
/// `/api/process`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionView {
    pub lang: LanguageTag,
    pub raw_text: String,
    pub fluent_text: String,
    pub tokens: Vec<Token>,
    pub labels: Vec<TokenLabel>,
    pub spans: Vec<DisfluencySpan>,
    pub histogram: TypeHistogram,
    pub utterance_type: DisfluencyType,
    pub disfluency_count: usize,
}

impl From<&CorrectionResult> for CorrectionView {
    fn from(r: &CorrectionResult) -> Self {
        CorrectionView {
            lang: r.source.lang,
            raw_text: r.source.raw_text.clone(),
            fluent_text: r.fluent_text(),
            tokens: r.source.tokens.clone(),
            labels: r.labels.clone(),
            spans: r.spans.clone(),
            histogram: r.histogram,
            utterance_type: r.utterance_type,
            disfluency_count: r.disfluency_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessView {
    #[serde(flatten)]
    pub correction: CorrectionView,
    pub raw_audio_id: String,
    pub fluent_audio_id: String,
    pub raw_audio_url: String,
    pub fluent_audio_url: String,
    pub fluent_audio_ms: u64,
    pub timings: Timings,
}

impl From<&PipelineResult> for ProcessView {
    fn from(r: &PipelineResult) -> Self {
        ProcessView {
            correction: CorrectionView::from(&r.correction),
            raw_audio_url: format!("/api/audio/{}", r.raw_audio_id),
            fluent_audio_url: format!("/api/audio/{}", r.fluent_audio_id),
            raw_audio_id: r.raw_audio_id.clone(),
            fluent_audio_id: r.fluent_audio_id.clone(),
            fluent_audio_ms: r.fluent_audio_ms,
            timings: r.timings,
        }
    }
}

struct Inner {
    config: ServiceConfig,
    bank: PromptBank,
    pipeline: Pipeline,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    /// Loads lexicons and prompts and wires the backends named by `config`.
    pub fn from_config(config: ServiceConfig) -> Result<Self, ServiceError> {
        config.validate()?;
        let detector = match &config.lexicon_dir {
            Some(dir) => DetectorConfig::load_dir(dir)?,
            None => DetectorConfig::default(),
        }
        .retain_languages(&config.languages);
        for &lang in &config.languages {
            detector.lexicon(lang)?;
        }
        let bank = match &config.prompt_bank_path {
            Some(path) => load_bank(path, &config.languages)?,
            None => PromptBank::builtin(),
        };
        let timeout = Duration::from_millis(config.backend_timeout_ms);
        let (asr, tts): (Arc<dyn AsrBackend>, Arc<dyn TtsBackend>) = match config.backend_mode {
            BackendMode::Mock => {
                let asr = match &config.asr_fixtures {
                    Some(path) => MockAsr::load_table(path)
                        .map_err(|source| ServiceError::Fixtures { path: path.display().to_string(), source })?,
                    None => MockAsr::new(),
                };
                (Arc::new(asr), Arc::new(MockTts))
            }
            BackendMode::Remote => {
                let (Some(asr_url), Some(tts_url)) = (&config.asr_url, &config.tts_url) else {
                    unreachable!("validated above");
                };
                (Arc::new(HttpAsr::new(asr_url, timeout)), Arc::new(HttpTts::new(tts_url, timeout)))
            }
        };
        let store = Arc::new(AudioStore::new(Duration::from_secs(config.audio_ttl_seconds)));
        let pipeline = Pipeline::new(asr, tts, detector, store);
        Ok(AppState(Arc::new(Inner { config, bank, pipeline })))
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.0.config
    }

    pub fn store(&self) -> &Arc<AudioStore> {
        self.0.pipeline.store()
    }

    fn language(&self, code: Option<&str>) -> Result<LanguageTag, ApiError> {
        let code = code.ok_or_else(|| ApiError::bad_request("missing_parameter", "lang is required"))?;
        code.parse::<LanguageTag>()
            .ok()
            .filter(|l| self.0.config.languages.contains(l))
            .ok_or_else(|| ApiError::bad_request("unsupported_language", format!("unsupported language {code:?}")))
    }
}

pub fn router(state: AppState) -> Router {
    let upload_limit = state.config().max_upload_bytes + MULTIPART_OVERHEAD;
    let cors = cors_layer(&state.config().cors_origins);
    Router::new()
        .route("/health", get(health))
        .route("/api/languages", get(languages))
        .route("/api/topic", get(topic))
        .route("/api/correct", post(correct_text).layer(DefaultBodyLimit::disable()))
        .route("/api/process", post(process).layer(DefaultBodyLimit::max(upload_limit)))
        .route("/api/audio/{id}", get(audio))
        .fallback(|| async { ApiError::not_found("no such route") })
        .layer(cors)
        .with_state(state)
}

fn cors_layer(origins: &[String]) -> CorsLayer {
    let layer = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    if origins.iter().any(|o| o == "*") {
        layer.allow_origin(Any)
    } else {
        let values: Vec<HeaderValue> = origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()).collect();
        layer.allow_origin(AllowOrigin::list(values))
    }
}

/// Binds and serves until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    let addr = std::net::SocketAddr::new(config.host, config.port);
    let state = AppState::from_config(config)?;
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| ServiceError::Bind { addr: addr.to_string(), source })?;
    eprintln!("listening on http://{}", listener.local_addr().map_err(ServiceError::Serve)?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(ServiceError::Serve)
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok", "version": env!("CARGO_PKG_VERSION") }))
}

async fn languages(State(state): State<AppState>) -> Json<serde_json::Value> {
    let codes: Vec<&str> = state.config().languages.iter().map(|l| l.code()).collect();
    Json(serde_json::json!({ "languages": codes }))
}

async fn topic(
    State(state): State<AppState>,
    Query(params): Query<HashMap<String, String>>,
) -> Result<Json<Prompt>, ApiError> {
    let lang = state.language(params.get("lang").map(String::as_str))?;
    let seed = params
        .get("seed")
        .map(|s| s.parse::<u64>())
        .transpose()
        .map_err(|_| ApiError::bad_request("invalid_parameter", "seed must be an unsigned integer"))?;
    let prompt = random_prompt(&state.0.bank, lang, seed).map_err(|e| ApiError::not_found(e.to_string()))?;
    Ok(Json(prompt.clone()))
}

#[derive(Deserialize)]
struct CorrectRequest {
    text: String,
    lang: String,
}

fn declared_length(headers: &HeaderMap) -> Option<usize> {
    headers.get(header::CONTENT_LENGTH)?.to_str().ok()?.parse().ok()
}

async fn read_limited(body: Body, limit: usize) -> Result<axum::body::Bytes, ApiError> {
    to_bytes(body, limit).await.map_err(|_| ApiError::too_large(limit))
}

async fn correct_text(State(state): State<AppState>, req: Request) -> Result<Json<CorrectionView>, ApiError> {
    if declared_length(req.headers()).is_some_and(|n| n > CORRECT_BODY_LIMIT) {
        return Err(ApiError::too_large(CORRECT_BODY_LIMIT));
    }
    let bytes = read_limited(req.into_body(), CORRECT_BODY_LIMIT).await?;
    let body: CorrectRequest =
        serde_json::from_slice(&bytes).map_err(|e| ApiError::bad_request("invalid_json", e.to_string()))?;
    let lang = state.language(Some(&body.lang))?;
    let result = correct(&tokenize(&body.text, lang), state.0.pipeline.config()).map_err(|e| {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "correction_failed", e.to_string())
    })?;
    Ok(Json(CorrectionView::from(&result)))
}

async fn process(
    State(state): State<AppState>,
    req: Request,
) -> Result<Json<ProcessView>, ApiError> {
    let limit = state.config().max_upload_bytes;
    if declared_length(req.headers()).is_some_and(|n| n > limit + MULTIPART_OVERHEAD) {
        return Err(ApiError::too_large(limit));
    }
    let mut form = <Multipart as axum::extract::FromRequest<()>>::from_request(req, &())
        .await
        .map_err(|e| ApiError::bad_request("invalid_multipart", e.body_text()))?;

    let mut audio = None;
    let mut lang = None;
    loop {
        let field = match form.next_field().await {
            Ok(Some(f)) => f,
            Ok(None) => break,
            Err(e) if e.status() == StatusCode::PAYLOAD_TOO_LARGE => return Err(ApiError::too_large(limit)),
            Err(e) => return Err(ApiError::bad_request("invalid_multipart", e.body_text())),
        };
        let name = field.name().unwrap_or_default().to_string();
        let bytes = field.bytes().await.map_err(|e| {
            if e.status() == StatusCode::PAYLOAD_TOO_LARGE {
                ApiError::too_large(limit)
            } else {
                ApiError::bad_request("invalid_multipart", e.body_text())
            }
        })?;
        match name.as_str() {
            "audio" => audio = Some(bytes),
            "lang" => lang = Some(String::from_utf8_lossy(&bytes).trim().to_string()),
            _ => {}
        }
    }
    let audio = audio.ok_or_else(|| ApiError::bad_request("missing_field", "multipart field \"audio\" is required"))?;
    if audio.len() > limit {
        return Err(ApiError::too_large(limit));
    }
    let lang = state.language(lang.as_deref())?;
    let result = state.0.pipeline.process_wav(&audio, lang).await?;
    Ok(Json(ProcessView::from(&result)))
}

async fn audio(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let bytes = state.store().get(&id).ok_or_else(|| ApiError::not_found(format!("no audio with id {id:?}")))?;
    Ok(([(header::CONTENT_TYPE, "audio/wav")], bytes.to_vec()).into_response())
}

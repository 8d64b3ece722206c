//! A scripted stand-in for remote ASR and TTS services.

use std::net::SocketAddr;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::{Multipart, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};

#[derive(Debug, Clone)]
pub enum Step {
    Reply,
    Status(u16),
    Sleep(Duration),
    Garbage,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Seen {
    pub fields: Vec<String>,
    pub lang: Option<String>,
    pub text: Option<String>,
    pub audio_len: usize,
}

#[derive(Clone)]
struct Shared {
    script: Arc<Mutex<Vec<Step>>>,
    seen: Arc<Mutex<Vec<Seen>>>,
    asr_text: String,
    tts_wav: Vec<u8>,
}

impl Shared {
    /// Pops the next step; the last one repeats forever.
    fn next(&self) -> Step {
        let mut s = self.script.lock().unwrap();
        if s.len() > 1 {
            s.remove(0)
        } else {
            s.first().cloned().unwrap_or(Step::Reply)
        }
    }
}

pub struct FakeRemote {
    pub addr: SocketAddr,
    seen: Arc<Mutex<Vec<Seen>>>,
}

impl FakeRemote {
    pub fn asr_url(&self) -> String {
        format!("http://{}/asr", self.addr)
    }

    pub fn tts_url(&self) -> String {
        format!("http://{}/tts", self.addr)
    }

    pub fn seen(&self) -> Vec<Seen> {
        self.seen.lock().unwrap().clone()
    }
}

async fn apply(step: Step) -> Option<Response> {
    match step {
        Step::Reply => None,
        Step::Status(code) => Some((StatusCode::from_u16(code).unwrap(), "scripted failure").into_response()),
        Step::Sleep(d) => {
            tokio::time::sleep(d).await;
            None
        }
        Step::Garbage => Some((StatusCode::OK, "\u{1}not the expected body").into_response()),
    }
}

async fn asr(State(s): State<Shared>, mut form: Multipart) -> Response {
    let step = s.next();
    let mut seen = Seen::default();
    while let Ok(Some(field)) = form.next_field().await {
        let name = field.name().unwrap_or("").to_string();
        let bytes = field.bytes().await.unwrap_or_default();
        match name.as_str() {
            "lang" => seen.lang = Some(String::from_utf8_lossy(&bytes).into_owned()),
            "audio" => seen.audio_len = bytes.len(),
            _ => {}
        }
        seen.fields.push(name);
    }
    s.seen.lock().unwrap().push(seen);
    if let Some(resp) = apply(step).await {
        return resp;
    }
    Json(serde_json::json!({ "text": s.asr_text })).into_response()
}

async fn tts(State(s): State<Shared>, Json(body): Json<serde_json::Value>) -> Response {
    let step = s.next();
    s.seen.lock().unwrap().push(Seen {
        fields: body.as_object().map(|o| o.keys().cloned().collect()).unwrap_or_default(),
        lang: body["lang"].as_str().map(String::from),
        text: body["text"].as_str().map(String::from),
        audio_len: 0,
    });
    if let Some(resp) = apply(step).await {
        return resp;
    }
    ([("content-type", "audio/wav")], s.tts_wav.clone()).into_response()
}

pub async fn spawn(script: Vec<Step>, asr_text: &str, tts_wav: Vec<u8>) -> FakeRemote {
    let seen = Arc::new(Mutex::new(Vec::new()));
    let shared = Shared {
        script: Arc::new(Mutex::new(script)),
        seen: seen.clone(),
        asr_text: asr_text.to_string(),
        tts_wav,
    };
    let app = Router::new().route("/asr", post(asr)).route("/tts", post(tts)).with_state(shared);
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    FakeRemote { addr, seen }
}

/// A URL on a port nothing listens on.
pub async fn dead_url(path: &str) -> String {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    drop(listener);
    format!("http://{addr}{path}")
}

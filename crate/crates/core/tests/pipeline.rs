mod common;

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Duration;

use common::fake::{self, Step};
use common::*;
use disfix::engine::{DetectorConfig, DisfluencyType};
use disfix::pipeline::*;
use disfix::LanguageTag;
use proptest::prelude::*;

const FAST: Duration = Duration::from_millis(300);

fn mock_pipeline() -> Pipeline {
    let asr = MockAsr::load_table(&data_dir().join("fixtures/audio/transcripts.json")).unwrap();
    Pipeline::new(Arc::new(asr), Arc::new(MockTts), DetectorConfig::default(), Arc::new(AudioStore::default()))
}

fn stored_clip(p: &Pipeline, id: &str) -> AudioClip {
    decode_wav(&p.store().get(id).expect("id resolves")).unwrap()
}

#[test]
fn fixture_wavs_decode() {
    let clip = decode_wav(&audio_fixture("i_um_um_want_to_go.wav")).unwrap();
    assert_eq!(clip.comment.as_deref(), Some("I um um want to go"));
    assert_eq!((clip.sample_rate, clip.samples.len()), (16_000, 8000));
    let hi = decode_wav(&audio_fixture("hi_comment.wav")).unwrap();
    assert_eq!(hi.comment.as_deref(), Some("मैं जाना चाहता हूँ"));
    assert!(decode_wav(&audio_fixture("hello_world.wav")).unwrap().comment.is_none());

    let stereo = decode_wav(&audio_fixture("stereo_44k.wav")).unwrap();
    assert_eq!(stereo.sample_rate, 44_100);
    assert_eq!(stereo.samples.len(), 22_050);
    let canonical = decode_canonical(&audio_fixture("stereo_44k.wav")).unwrap();
    assert_eq!(canonical.sample_rate, 16_000);
    assert_eq!(canonical.samples.len(), 8000);
    assert_eq!(canonical.duration_ms(), 500);
}

#[test]
fn our_encoder_matches_the_fixture_bytes() {
    let bytes = audio_fixture("i_um_um_want_to_go.wav");
    assert_eq!(encode_wav(&decode_wav(&bytes).unwrap()), bytes);
}

#[tokio::test]
async fn mock_asr_lookup_order() {
    let asr = MockAsr::load_table(&data_dir().join("fixtures/audio/transcripts.json")).unwrap();
    let hello = decode_canonical(&audio_fixture("hello_world.wav")).unwrap();
    assert_eq!(asr.transcribe(&hello, LanguageTag::En).await.unwrap().text, "hello world");

    let hi = decode_canonical(&audio_fixture("hi_comment.wav")).unwrap();
    assert_eq!(asr.transcribe(&hi, LanguageTag::Hi).await.unwrap().text, "मैं जाना चाहता हूँ");

    let unknown = AudioClip::new(vec![1, 2, 3], 16_000);
    let err = asr.transcribe(&unknown, LanguageTag::En).await.unwrap_err();
    assert!(err.to_string().contains("no fixture transcript"), "{err}");

    let mut table = MockAsr::new();
    let digest = table.register(&unknown, "registered");
    assert_eq!(digest.len(), 64);
    // the table wins over an embedded comment
    let commented = unknown.clone().with_comment("embedded");
    assert_eq!(table.transcribe(&commented, LanguageTag::En).await.unwrap().text, "registered");
}

fn beep_oracle(words: usize) -> Vec<i16> {
    let mut out = Vec::new();
    for w in 0..words {
        if w > 0 {
            out.extend(vec![0i16; 800]);
        }
        for n in 0..1600 {
            let v = 0.5 * (2.0 * PI * 440.0 * n as f64 / 16_000.0).sin();
            out.push((v * 32767.0).round() as i16);
        }
    }
    out
}

#[tokio::test]
async fn mock_tts_beep_code() {
    let s = MockTts.synthesize("I want to go", LanguageTag::En).await.unwrap();
    assert_eq!(s.clip.samples, beep_oracle(4));
    assert_eq!(s.clip.duration_ms(), 550);
    assert_eq!(MockTts::render("", LanguageTag::En).samples.len(), 0);
    assert_eq!(MockTts::render("hello", LanguageTag::En).samples.len(), 1600);
    assert_eq!(MockTts::render("hello, world.", LanguageTag::En).samples, beep_oracle(2));
    assert_eq!(MockTts::render("मैं जाना चाहता हूँ।", LanguageTag::Hi).duration_ms(), 550);
}

proptest! {
    #[test]
    fn mock_tts_duration_law(words in 0usize..40) {
        let text = vec!["word"; words].join(" ");
        let ms = MockTts::render(&text, LanguageTag::En).duration_ms();
        let expected = if words == 0 { 0 } else { 150 * words as u64 - 50 };
        prop_assert_eq!(ms, expected);
    }
}

#[tokio::test]
async fn end_to_end_filler_fixture() {
    let p = mock_pipeline();
    let upload = audio_fixture("i_um_um_want_to_go.wav");
    let r = p.process_wav(&upload, LanguageTag::En).await.unwrap();
    assert_eq!(r.correction.source.raw_text, "I um um want to go");
    assert_eq!(r.correction.fluent_text(), "I want to go");
    assert_eq!(r.correction.disfluency_count, 2);
    assert_eq!(r.correction.utterance_type, DisfluencyType::Filler);
    assert_eq!(r.fluent_audio_ms, 550);
    assert_eq!(stored_clip(&p, &r.fluent_audio_id).samples.len(), 8800);
    assert_eq!(&*p.store().get(&r.raw_audio_id).unwrap(), &upload[..]);
    assert_eq!((r.timings.asr_attempts, r.timings.tts_attempts), (1, 1));
    let t = r.timings;
    assert!(t.asr_ms + t.dc_ms + t.tts_ms <= t.total_ms);
}

#[tokio::test]
async fn total_removal_skips_tts() {
    let p = mock_pipeline();
    let r = p.process_wav(&audio_fixture("um_uh.wav"), LanguageTag::En).await.unwrap();
    assert_eq!(r.correction.fluent_text(), "");
    assert_eq!(r.correction.disfluency_count, 2);
    assert_eq!(r.correction.utterance_type, DisfluencyType::Filler);
    assert_eq!(r.timings.tts_attempts, 0);
    assert_eq!(stored_clip(&p, &r.fluent_audio_id).samples.len(), 0);
}

#[tokio::test]
async fn fluent_input_passes_through() {
    let p = mock_pipeline();
    let r = p.process_wav(&audio_fixture("hello_world.wav"), LanguageTag::En).await.unwrap();
    assert_eq!(r.correction.fluent_text(), "hello world");
    assert_eq!(r.correction.disfluency_count, 0);
    assert_eq!(r.correction.utterance_type, DisfluencyType::Fluent);
    assert_eq!(r.fluent_audio_ms, 250);
}

#[tokio::test]
async fn resampled_stereo_upload_and_hindi() {
    let p = mock_pipeline();
    let r = p.process_wav(&audio_fixture("stereo_44k.wav"), LanguageTag::En).await.unwrap();
    assert_eq!(r.correction.fluent_text(), "we should go");
    assert_eq!(r.correction.disfluency_count, 2);

    let r = p.process_wav(&audio_fixture("hi_comment.wav"), LanguageTag::Hi).await.unwrap();
    assert_eq!(r.correction.disfluency_count, 0);
    assert_eq!(r.fluent_audio_ms, 550);
}

#[tokio::test]
async fn mock_runs_are_deterministic_apart_from_ids_and_timings() {
    let p = mock_pipeline();
    let upload = audio_fixture("i_um_um_want_to_go.wav");
    let a = p.process_wav(&upload, LanguageTag::En).await.unwrap();
    let b = p.process_wav(&upload, LanguageTag::En).await.unwrap();
    assert_eq!(a.correction, b.correction);
    assert_eq!(a.fluent_audio_ms, b.fluent_audio_ms);
    assert_ne!(a.raw_audio_id, b.raw_audio_id);
    assert_eq!(p.store().get(&a.fluent_audio_id), p.store().get(&b.fluent_audio_id));
}

#[tokio::test]
async fn process_clip_keeps_the_input() {
    let p = mock_pipeline();
    let clip = AudioClip::new(vec![3; 400], 8_000).with_comment("uh hello");
    let before = clip.clone();
    let r = p.process(&clip, LanguageTag::En).await.unwrap();
    assert_eq!(clip, before);
    assert_eq!(stored_clip(&p, &r.raw_audio_id), before);
    assert_eq!(r.correction.fluent_text(), "hello");
}

#[tokio::test]
async fn validation_errors() {
    let p = mock_pipeline();
    let err = p.process_wav(b"definitely not a wav", LanguageTag::En).await.unwrap_err();
    assert!(matches!(err, PipelineError::InvalidAudio(_)));

    let lex = DetectorConfig::default().lexicon(LanguageTag::En).unwrap().clone();
    let en_only = DetectorConfig::empty().with_lexicon(LanguageTag::En, lex);
    let p = Pipeline::mock(en_only, Arc::new(AudioStore::default()));
    let err = p.process_wav(&audio_fixture("hi_comment.wav"), LanguageTag::Hi).await.unwrap_err();
    assert!(matches!(err, PipelineError::UnsupportedLanguage(_)), "{err}");

    let p = Pipeline::mock(DetectorConfig::default(), Arc::new(AudioStore::default()));
    let err = p.process_wav(&audio_fixture("hello_world.wav"), LanguageTag::En).await.unwrap_err();
    assert_eq!(err.stage(), Some(Stage::Asr));
    assert!(p.store().is_empty(), "failed runs store nothing");
}

fn wav_of(text: &str) -> Vec<u8> {
    encode_wav(&MockTts::render(text, LanguageTag::En))
}

#[tokio::test]
async fn http_asr_passthrough_and_wire_shape() {
    let remote = fake::spawn(vec![Step::Reply], "hello", vec![]).await;
    let asr = HttpAsr::new(remote.asr_url(), FAST);
    let clip = AudioClip::new(vec![7; 160], 16_000);
    let t = asr.transcribe(&clip, LanguageTag::Hi).await.unwrap();
    assert_eq!(t, Transcription { text: "hello".into(), attempts: 1 });
    let seen = remote.seen();
    assert_eq!(seen.len(), 1);
    assert_eq!(seen[0].fields, ["audio", "lang"]);
    assert_eq!(seen[0].lang.as_deref(), Some("hi"));
    assert_eq!(seen[0].audio_len, encode_wav(&clip).len());
}

#[tokio::test]
async fn http_errors_are_not_retried() {
    for code in [500, 400, 422] {
        let remote = fake::spawn(vec![Step::Status(code)], "x", vec![]).await;
        let err = HttpAsr::new(remote.asr_url(), FAST)
            .transcribe(&AudioClip::new(vec![0; 10], 16_000), LanguageTag::En)
            .await
            .unwrap_err();
        assert!(matches!(err, BackendError::Status { status, .. } if status == code), "{err}");
        assert_eq!(remote.seen().len(), 1, "HTTP {code}");
    }
    let remote = fake::spawn(vec![Step::Garbage], "x", vec![]).await;
    let err = HttpAsr::new(remote.asr_url(), FAST)
        .transcribe(&AudioClip::new(vec![0; 10], 16_000), LanguageTag::En)
        .await
        .unwrap_err();
    assert!(matches!(err, BackendError::Malformed(_)), "{err}");
}

#[tokio::test]
async fn http_timeout_is_retried_once() {
    let slow = Step::Sleep(FAST * 3);
    let remote = fake::spawn(vec![slow.clone(), Step::Reply], "after retry", vec![]).await;
    let t = HttpAsr::new(remote.asr_url(), FAST)
        .transcribe(&AudioClip::new(vec![0; 10], 16_000), LanguageTag::En)
        .await
        .unwrap();
    assert_eq!(t, Transcription { text: "after retry".into(), attempts: 2 });

    let remote = fake::spawn(vec![slow], "never", vec![]).await;
    let err = HttpAsr::new(remote.asr_url(), FAST)
        .transcribe(&AudioClip::new(vec![0; 10], 16_000), LanguageTag::En)
        .await
        .unwrap_err();
    assert_eq!(err, BackendError::Timeout { attempts: 2 });
}

#[tokio::test]
async fn http_tts_round_trip() {
    let remote = fake::spawn(vec![Step::Reply], "", wav_of("one two")).await;
    let tts = HttpTts::new(remote.tts_url(), FAST);
    let s = tts.synthesize("one two", LanguageTag::En).await.unwrap();
    assert_eq!(s.clip, MockTts::render("one two", LanguageTag::En));
    let seen = remote.seen();
    assert_eq!(seen[0].text.as_deref(), Some("one two"));
    assert_eq!(seen[0].lang.as_deref(), Some("en"));

    let remote = fake::spawn(vec![Step::Garbage], "", vec![]).await;
    let err = HttpTts::new(remote.tts_url(), FAST).synthesize("a", LanguageTag::En).await.unwrap_err();
    assert!(matches!(err, BackendError::Malformed(_)), "{err}");
}

#[tokio::test]
async fn remote_pipeline_stage_tags() {
    let remote = fake::spawn(vec![Step::Reply], "I um um want to go", wav_of("I want to go")).await;
    let p = Pipeline::new(
        Arc::new(HttpAsr::new(remote.asr_url(), FAST)),
        Arc::new(HttpTts::new(remote.tts_url(), FAST)),
        DetectorConfig::default(),
        Arc::new(AudioStore::default()),
    );
    let r = p.process_wav(&audio_fixture("hello_world.wav"), LanguageTag::En).await.unwrap();
    assert_eq!(r.correction.fluent_text(), "I want to go");
    assert_eq!(r.fluent_audio_ms, 550);
    assert_eq!(remote.seen()[1].text.as_deref(), Some("I want to go"));

    let dead_asr = Pipeline::new(
        Arc::new(HttpAsr::new(fake::dead_url("/asr").await, FAST)),
        Arc::new(MockTts),
        DetectorConfig::default(),
        Arc::new(AudioStore::default()),
    );
    let err = dead_asr.process_wav(&audio_fixture("hello_world.wav"), LanguageTag::En).await.unwrap_err();
    assert_eq!(err.stage(), Some(Stage::Asr));
    assert!(matches!(err, PipelineError::Backend { source: BackendError::Transport(_), .. }), "{err}");

    let failing_tts = fake::spawn(vec![Step::Status(503)], "", vec![]).await;
    let p = Pipeline::new(
        Arc::new(MockAsr::load_table(&data_dir().join("fixtures/audio/transcripts.json")).unwrap()),
        Arc::new(HttpTts::new(failing_tts.tts_url(), FAST)),
        DetectorConfig::default(),
        Arc::new(AudioStore::default()),
    );
    let err = p.process_wav(&audio_fixture("hello_world.wav"), LanguageTag::En).await.unwrap_err();
    assert_eq!(err.stage(), Some(Stage::Tts));
}

//! C ABI over the disfix correction engine.
//!
//! Handles are opaque and owned by the caller; release them with the
//! matching `*_free` function. Every entry point returns a [`DisfixStatus`]
//! or a sentinel, and on failure stores a message retrievable with
//! [`disfix_last_error`] on the same thread.
//!
//! Strings returned from a result are borrowed from it and stay valid until
//! the result is freed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use disfix::engine::EngineError;
use disfix::service::CorrectionView;
use disfix::{correct, tokenize, CorrectionResult, DetectorConfig, DisfluencyType, LanguageTag};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisfixStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    UnsupportedLanguage = 3,
    InvalidConfig = 4,
    EngineFailure = 5,
    Panic = 6,
}

/// Disfluency kinds, including `Fluent` for utterances with none.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisfixType {
    Filler = 0,
    Repetition = 1,
    Correction = 2,
    FalseStart = 3,
    Fluent = 4,
    /// Returned by accessors given a null result.
    Invalid = -1,
}

impl From<DisfluencyType> for DisfixType {
    fn from(t: DisfluencyType) -> Self {
        match t {
            DisfluencyType::Filler => DisfixType::Filler,
            DisfluencyType::Repetition => DisfixType::Repetition,
            DisfluencyType::Correction => DisfixType::Correction,
            DisfluencyType::FalseStart => DisfixType::FalseStart,
            DisfluencyType::Fluent => DisfixType::Fluent,
        }
    }
}

fn core_type(t: DisfixType) -> Option<DisfluencyType> {
    match t {
        DisfixType::Filler => Some(DisfluencyType::Filler),
        DisfixType::Repetition => Some(DisfluencyType::Repetition),
        DisfixType::Correction => Some(DisfluencyType::Correction),
        DisfixType::FalseStart => Some(DisfluencyType::FalseStart),
        DisfixType::Fluent | DisfixType::Invalid => None,
    }
}

/// A configured engine. Immutable, so one handle may be shared across threads.
pub struct DisfixEngine {
    config: DetectorConfig,
}

/// The outcome of one correction.
pub struct DisfixResult {
    result: CorrectionResult,
    fluent: CString,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let mut bytes = message.into().into_bytes();
    bytes.retain(|b| *b != 0);
    let c = CString::new(bytes).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: DisfixStatus, message: impl Into<String>) -> DisfixStatus {
    set_error(message);
    status
}

/// Runs `f`, turning a panic into [`DisfixStatus::Panic`].
fn guard(f: impl FnOnce() -> DisfixStatus) -> DisfixStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == DisfixStatus::Ok {
                clear_error();
            }
            status
        }
        Err(_) => fail(DisfixStatus::Panic, "internal panic"),
    }
}

/// Reads a NUL-terminated UTF-8 argument.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, DisfixStatus> {
    if p.is_null() {
        return Err(fail(DisfixStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(DisfixStatus::InvalidUtf8, format!("{what} is not valid UTF-8: {e}")))
}

fn to_cstring(s: String) -> CString {
    CString::new(s).unwrap_or_else(|e| {
        let mut bytes = e.into_vec();
        bytes.retain(|b| *b != 0);
        CString::new(bytes).unwrap_or_default()
    })
}

fn install_engine(config: DetectorConfig, out: *mut *mut DisfixEngine) -> DisfixStatus {
    let handle = Box::new(DisfixEngine { config });
    // SAFETY: callers check `out` for null before reaching here.
    unsafe { *out = Box::into_raw(handle) };
    DisfixStatus::Ok
}

/// Creates an engine with the built-in English and Hindi lexicons.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn disfix_engine_new(out: *mut *mut DisfixEngine) -> DisfixStatus {
    guard(|| {
        if out.is_null() {
            return fail(DisfixStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        install_engine(DetectorConfig::default(), out)
    })
}

/// Creates an engine from a lexicon directory laid out as
/// `<dir>/<lang>/fillers.txt` and `<dir>/<lang>/editing_terms.txt`.
/// A null `dir` selects the built-in lexicons. A nonzero
/// `ambiguous_fillers` also treats words like "like" and "well" as fillers.
///
/// # Safety
/// `dir` must be null or a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn disfix_engine_new_with_options(
    dir: *const c_char,
    ambiguous_fillers: i32,
    out: *mut *mut DisfixEngine,
) -> DisfixStatus {
    guard(|| {
        if out.is_null() {
            return fail(DisfixStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let config = if dir.is_null() {
            DetectorConfig::default()
        } else {
            let dir = match read_str(dir, "dir") {
                Ok(d) => d,
                Err(status) => return status,
            };
            match DetectorConfig::load_dir(Path::new(dir)) {
                Ok(c) => c,
                Err(e) => return fail(DisfixStatus::InvalidConfig, e.to_string()),
            }
        };
        let config = if ambiguous_fillers != 0 { config.with_ambiguous_fillers() } else { config };
        install_engine(config, out)
    })
}

/// Releases an engine. Null is ignored.
///
/// # Safety
/// `engine` must be null or a handle from `disfix_engine_new*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn disfix_engine_free(engine: *mut DisfixEngine) {
    if !engine.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(engine))));
    }
}

/// Corrects one utterance. `lang` is a language code such as `"en"` or `"hi"`.
///
/// # Safety
/// `engine` must be a live handle, `text` and `lang` NUL-terminated strings,
/// and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn disfix_correct(
    engine: *const DisfixEngine,
    text: *const c_char,
    lang: *const c_char,
    out: *mut *mut DisfixResult,
) -> DisfixStatus {
    guard(|| {
        if out.is_null() {
            return fail(DisfixStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let Some(engine) = engine.as_ref() else {
            return fail(DisfixStatus::NullPointer, "engine is null");
        };
        let text = match read_str(text, "text") {
            Ok(t) => t,
            Err(status) => return status,
        };
        let lang: LanguageTag = match read_str(lang, "lang") {
            Ok(l) => match l.parse() {
                Ok(tag) => tag,
                Err(e) => return fail(DisfixStatus::UnsupportedLanguage, e.to_string()),
            },
            Err(status) => return status,
        };
        let result = match correct(&tokenize(text, lang), &engine.config) {
            Ok(r) => r,
            Err(EngineError::Config(e)) => return fail(DisfixStatus::UnsupportedLanguage, e.to_string()),
            Err(e) => return fail(DisfixStatus::EngineFailure, e.to_string()),
        };
        let json = match serde_json::to_string(&CorrectionView::from(&result)) {
            Ok(j) => j,
            Err(e) => return fail(DisfixStatus::EngineFailure, e.to_string()),
        };
        let fluent = to_cstring(result.fluent_text());
        *out = Box::into_raw(Box::new(DisfixResult { result, fluent, json: to_cstring(json) }));
        DisfixStatus::Ok
    })
}

/// Releases a result. Null is ignored.
///
/// # Safety
/// `result` must be null or a handle from [`disfix_correct`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn disfix_result_free(result: *mut DisfixResult) {
    if !result.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(result))));
    }
}

/// The corrected text, borrowed from `result`. Null when `result` is null.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn disfix_result_fluent_text(result: *const DisfixResult) -> *const c_char {
    result.as_ref().map_or(ptr::null(), |r| r.fluent.as_ptr())
}

/// The full correction as a JSON object, borrowed from `result`.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn disfix_result_json(result: *const DisfixResult) -> *const c_char {
    result.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// Number of disfluent words removed. Zero when `result` is null.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn disfix_result_disfluency_count(result: *const DisfixResult) -> usize {
    result.as_ref().map_or(0, |r| r.result.disfluency_count)
}

/// The utterance's dominant disfluency kind.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn disfix_result_utterance_type(result: *const DisfixResult) -> DisfixType {
    result.as_ref().map_or(DisfixType::Invalid, |r| r.result.utterance_type.into())
}

/// Disfluent words of one kind. Zero for `Fluent`, `Invalid` or a null result.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn disfix_result_type_count(result: *const DisfixResult, kind: DisfixType) -> usize {
    match (result.as_ref(), core_type(kind)) {
        (Some(r), Some(k)) => r.result.histogram.get(k),
        _ => 0,
    }
}

/// Number of disfluent spans found.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn disfix_result_span_count(result: *const DisfixResult) -> usize {
    result.as_ref().map_or(0, |r| r.result.spans.len())
}

/// The message for the last failure on this thread, or null after a
/// success. Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn disfix_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// The library version as a static string.
#[no_mangle]
pub extern "C" fn disfix_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

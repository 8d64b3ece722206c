use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use disfix_ffi::*;

fn engine() -> *mut DisfixEngine {
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { disfix_engine_new(&mut e) }, DisfixStatus::Ok);
    assert!(!e.is_null());
    e
}

fn correct(e: *const DisfixEngine, text: &str, lang: &str) -> Result<*mut DisfixResult, DisfixStatus> {
    let text = CString::new(text).unwrap();
    let lang = CString::new(lang).unwrap();
    let mut out = ptr::null_mut();
    match unsafe { disfix_correct(e, text.as_ptr(), lang.as_ptr(), &mut out) } {
        DisfixStatus::Ok => Ok(out),
        s => {
            assert!(out.is_null());
            Err(s)
        }
    }
}

fn borrowed(p: *const std::ffi::c_char) -> String {
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn last_error() -> Option<String> {
    let p = disfix_last_error();
    (!p.is_null()).then(|| borrowed(p))
}

#[test]
fn corrects_through_the_c_abi() {
    let e = engine();
    let r = correct(e, "I want a, uh, a coffee", "en").unwrap();
    unsafe {
        assert_eq!(borrowed(disfix_result_fluent_text(r)), "I want a coffee");
        assert_eq!(disfix_result_disfluency_count(r), 2);
        assert_eq!(disfix_result_span_count(r), 2);
        assert_eq!(disfix_result_type_count(r, DisfixType::Filler), 1);
        assert_eq!(disfix_result_type_count(r, DisfixType::Repetition), 1);
        assert_eq!(disfix_result_type_count(r, DisfixType::Fluent), 0);
        let json: serde_json::Value = serde_json::from_str(&borrowed(disfix_result_json(r))).unwrap();
        assert_eq!(json["fluent_text"], "I want a coffee");
        assert_eq!(json["disfluency_count"], 2);
        disfix_result_free(r);
    }
    assert_eq!(last_error(), None);

    let r = correct(e, "मैं उम्म बाज़ार जाऊँगा", "hi").unwrap();
    unsafe {
        assert_eq!(borrowed(disfix_result_fluent_text(r)), "मैं बाज़ार जाऊँगा");
        assert_eq!(disfix_result_utterance_type(r), DisfixType::Filler);
        disfix_result_free(r);
    }

    let r = correct(e, "the weather is nice", "en").unwrap();
    unsafe {
        assert_eq!(disfix_result_utterance_type(r), DisfixType::Fluent);
        assert_eq!(disfix_result_disfluency_count(r), 0);
        disfix_result_free(r);
        disfix_engine_free(e);
    }
}

#[test]
fn errors_set_status_and_message() {
    let e = engine();
    assert_eq!(correct(e, "hello", "fr").unwrap_err(), DisfixStatus::UnsupportedLanguage);
    assert!(last_error().unwrap().contains("fr"));
    assert_eq!(correct(ptr::null(), "hello", "en").unwrap_err(), DisfixStatus::NullPointer);

    let bad = [0xffu8, 0xfe, 0];
    let lang = CString::new("en").unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { disfix_correct(e, bad.as_ptr().cast(), lang.as_ptr(), &mut out) };
    assert_eq!(status, DisfixStatus::InvalidUtf8);
    assert!(last_error().unwrap().contains("UTF-8"));

    let status = unsafe { disfix_correct(e, ptr::null(), lang.as_ptr(), &mut out) };
    assert_eq!(status, DisfixStatus::NullPointer);
    assert_eq!(unsafe { disfix_correct(e, lang.as_ptr(), lang.as_ptr(), ptr::null_mut()) }, DisfixStatus::NullPointer);
    assert_eq!(unsafe { disfix_engine_new(ptr::null_mut()) }, DisfixStatus::NullPointer);

    correct(e, "fine", "en").map(|r| unsafe { disfix_result_free(r) }).unwrap();
    assert_eq!(last_error(), None);
    unsafe { disfix_engine_free(e) };
}

#[test]
fn null_handles_are_tolerated() {
    unsafe {
        disfix_engine_free(ptr::null_mut());
        disfix_result_free(ptr::null_mut());
        assert!(disfix_result_fluent_text(ptr::null()).is_null());
        assert!(disfix_result_json(ptr::null()).is_null());
        assert_eq!(disfix_result_disfluency_count(ptr::null()), 0);
        assert_eq!(disfix_result_utterance_type(ptr::null()), DisfixType::Invalid);
    }
    assert_eq!(borrowed(disfix_version()), env!("CARGO_PKG_VERSION"));
}

#[test]
fn engine_options_load_lexicons() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/lexicons");
    let dir_c = CString::new(dir.to_str().unwrap()).unwrap();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { disfix_engine_new_with_options(dir_c.as_ptr(), 1, &mut e) }, DisfixStatus::Ok);
    let r = correct(e, "it was like really big", "en").unwrap();
    unsafe {
        assert_eq!(borrowed(disfix_result_fluent_text(r)), "it was really big");
        disfix_result_free(r);
        disfix_engine_free(e);
    }

    let missing = CString::new("/nonexistent/lexicons").unwrap();
    let mut e = ptr::null_mut();
    let status = unsafe { disfix_engine_new_with_options(missing.as_ptr(), 0, &mut e) };
    assert_eq!(status, DisfixStatus::InvalidConfig);
    assert!(e.is_null());
    assert!(last_error().is_some());
}

#[test]
fn engine_is_shareable_across_threads() {
    struct Shared(*mut DisfixEngine);
    unsafe impl Send for Shared {}
    unsafe impl Sync for Shared {}
    let shared = std::sync::Arc::new(Shared(engine()));
    let handles: Vec<_> = (0..4)
        .map(|i| {
            let shared = shared.clone();
            std::thread::spawn(move || {
                let r = correct(shared.0, &format!("we we go {i}"), "en").unwrap();
                let text = unsafe { borrowed(disfix_result_fluent_text(r)) };
                unsafe { disfix_result_free(r) };
                text
            })
        })
        .collect();
    for (i, h) in handles.into_iter().enumerate() {
        assert_eq!(h.join().unwrap(), format!("we go {i}"));
    }
    unsafe { disfix_engine_free(shared.0) };
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn find_cc() -> Option<&'static str> {
    ["cc", "gcc", "clang"].into_iter().find(|c| Command::new(c).arg("--version").output().is_ok())
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/disfix.h")).unwrap();
    let source = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 10);
    for name in exports {
        let declared = header.contains(&format!(" {name}(")) || header.contains(&format!("*{name}("));
        assert!(declared, "{name} missing from header");
    }
    for ty in ["typedef struct DisfixEngine DisfixEngine;", "typedef struct DisfixResult DisfixResult;"] {
        assert!(header.contains(ty), "{ty}");
    }
    assert!(header.contains("DISFIX_STATUS_OK = 0"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let Some(cc) = find_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let include = crate_dir().join("include");
    for lang in ["c", "c++"] {
        let out = Command::new(cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg("-I")
            .arg(&include)
            .arg(crate_dir().join("tests/c/smoke.c"))
            .output()
            .unwrap();
        assert!(out.status.success(), "{lang}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(cc) = find_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libdisfix_ffi.a");
    if !lib.is_file() {
        eprintln!("{} not built; skipping link test", lib.display());
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let bin = tmp.path().join("smoke");
    let out = Command::new(cc)
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), format!("{} 0", env!("CARGO_PKG_VERSION")));
}

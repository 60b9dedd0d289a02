use std::ffi::{CStr, CString};
use std::ptr;

use dees_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = dees_last_error_message();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { dees_string_free(p) };
    s
}

fn fixture(name: &str) -> *mut DeesAutomaton {
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { dees_automaton_fixture(c(name).as_ptr(), &mut a) }, DeesStatus::Ok);
    a
}

#[test]
fn fixture_eval_and_json_round_trip() {
    let a = fixture("half_loop");
    let mut v = 0.0;
    assert_eq!(unsafe { dees_automaton_eval(a, c("a a").as_ptr(), &mut v) }, DeesStatus::Ok);
    assert_eq!(v, 0.125);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { dees_automaton_to_json(a, &mut json) }, DeesStatus::Ok);
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { dees_automaton_from_json(json, &mut b) }, DeesStatus::Ok);
    let mut json2 = ptr::null_mut();
    assert_eq!(unsafe { dees_automaton_to_json(b, &mut json2) }, DeesStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(json) }, unsafe { CStr::from_ptr(json2) });
    unsafe {
        dees_string_free(json);
        dees_string_free(json2);
        dees_automaton_free(a);
        dees_automaton_free(b);
    }
}

#[test]
fn learn_and_exactify_pipeline() {
    let a = fixture("half_loop");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { dees_sample_draw(a, 100_000, 3, &mut s) }, DeesStatus::Ok);
    let mut len = 0;
    assert_eq!(unsafe { dees_sample_len(s, &mut len) }, DeesStatus::Ok);
    assert_eq!(len, 100_000);

    let mut learned = ptr::null_mut();
    assert_eq!(unsafe { dees_learn(s, -1.0 / 3.0, &mut learned) }, DeesStatus::Ok);
    let mut n = 0;
    assert_eq!(unsafe { dees_automaton_state_count(learned, &mut n) }, DeesStatus::Ok);
    assert_eq!(n, 1);

    let mut exact = ptr::null_mut();
    let mut complete = false;
    assert_eq!(unsafe { dees_exactify(learned, 100_000, &mut exact, &mut complete) }, DeesStatus::Ok);
    assert!(complete);
    let mut v = 0.0;
    assert_eq!(unsafe { dees_automaton_eval(exact, c("").as_ptr(), &mut v) }, DeesStatus::Ok);
    assert_eq!(v, 0.5);
    unsafe {
        dees_automaton_free(a);
        dees_automaton_free(learned);
        dees_automaton_free(exact);
        dees_sample_free(s);
    }
}

#[test]
fn sample_text_round_trip() {
    let mut s = ptr::null_mut();
    let text = c("#alphabet: a b\na b\n\nb\n");
    assert_eq!(unsafe { dees_sample_from_text(text.as_ptr(), &mut s) }, DeesStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { dees_sample_to_text(s, &mut out) }, DeesStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(out) }, text.as_c_str());
    unsafe {
        dees_string_free(out);
        dees_sample_free(s);
    }
}

#[test]
fn normalization_and_refusal() {
    let p = fixture("two_state_pda");
    let mut ns = ptr::null_mut();
    assert_eq!(unsafe { dees_normalized_new(p, &mut ns) }, DeesStatus::Ok);
    let mut v = 0.0;
    assert_eq!(unsafe { dees_normalized_eval(ns, c("a").as_ptr(), &mut v) }, DeesStatus::Ok);
    assert!((v - 0.72).abs() < 1e-15);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { dees_normalized_sample(ns, 10, 1, &mut s) }, DeesStatus::Ok);

    let signed = fixture("a_alpha(pi/6;1,0,1)");
    let mut refused = ptr::null_mut();
    assert_eq!(unsafe { dees_normalized_new(signed, &mut refused) }, DeesStatus::Uncertified);
    assert!(refused.is_null());
    assert!(last_error().contains("total mass"));
    unsafe {
        dees_sample_free(s);
        dees_normalized_free(ns);
        dees_automaton_free(p);
        dees_automaton_free(signed);
    }
}

#[test]
fn errors_are_reported() {
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { dees_automaton_fixture(ptr::null(), &mut a) }, DeesStatus::NullPointer);
    assert!(last_error().contains("name"));
    assert_eq!(unsafe { dees_automaton_fixture(c("nope").as_ptr(), &mut a) }, DeesStatus::InvalidInput);
    assert!(last_error().contains("nope"));
    assert!(a.is_null());
    assert_eq!(unsafe { dees_automaton_from_json(c("{").as_ptr(), &mut a) }, DeesStatus::InvalidInput);

    let h = fixture("half_loop");
    let mut v = 0.0;
    assert_eq!(unsafe { dees_automaton_eval(h, c("b").as_ptr(), &mut v) }, DeesStatus::InvalidInput);
    assert_eq!(unsafe { dees_automaton_eval(h, c("a").as_ptr(), ptr::null_mut()) }, DeesStatus::NullPointer);
    let bad = [0xffu8, 0];
    assert_eq!(unsafe { dees_automaton_eval(h, bad.as_ptr().cast(), &mut v) }, DeesStatus::InvalidInput);

    let signed = fixture("a_alpha(pi/6;1,0,1)");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { dees_sample_draw(signed, 5, 0, &mut s) }, DeesStatus::InvalidInput);
    let empty = c("#alphabet: a\n");
    assert_eq!(unsafe { dees_sample_from_text(empty.as_ptr(), &mut s) }, DeesStatus::Ok);
    let mut learned = ptr::null_mut();
    assert_eq!(unsafe { dees_learn(s, -1.0 / 3.0, &mut learned) }, DeesStatus::InvalidInput);
    unsafe {
        dees_automaton_free(h);
        dees_automaton_free(signed);
        dees_sample_free(s);
        dees_automaton_free(ptr::null_mut());
        dees_string_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_thread_local() {
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { dees_automaton_fixture(c("first").as_ptr(), &mut a) }, DeesStatus::InvalidInput);
    std::thread::spawn(|| {
        let mut b = ptr::null_mut();
        assert_eq!(unsafe { dees_automaton_fixture(c("second").as_ptr(), &mut b) }, DeesStatus::InvalidInput);
        assert!(last_error().contains("second"));
    })
    .join()
    .unwrap();
    assert!(last_error().contains("first"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let header = std::fs::read_to_string(dir.join("dees.h")).unwrap();
    for f in ["dees_learn", "dees_exactify", "dees_normalized_new", "dees_last_error_message", "DEES_STATUS_UNCERTIFIED = 3"] {
        assert!(header.contains(f), "header lacks {f}");
    }
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = std::process::Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, "-I"])
            .arg(&dir)
            .arg("-")
            .stdin(std::process::Stdio::piped())
            .spawn()
            .and_then(|mut child| {
                use std::io::Write;
                child.stdin.take().unwrap().write_all(b"#include \"dees.h\"\nint main(void) { return DEES_STATUS_OK; }\n")?;
                child.wait()
            })
            .unwrap_or_else(|e| panic!("running {compiler}: {e}"));
        assert!(status.success(), "{compiler} rejected dees.h");
    }
}

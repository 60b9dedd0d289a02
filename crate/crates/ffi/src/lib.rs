//! C ABI over `dees`.
//!
//! Every fallible function returns a [`DeesStatus`] and writes its result
//! through an out-pointer, which is left untouched on failure. The message
//! of the last failure on the calling thread is available from
//! [`dees_last_error_message`]. Handles are opaque and owned by the caller
//! until passed to their `_free` function. Strings returned by the library
//! must be released with [`dees_string_free`].
//!
//! Words are passed as space-separated symbols; the empty string is ε.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dees::automaton::AnyAutomaton;
use dees::dees::{dees, DeesConfig};
use dees::error::Error;
use dees::exact::exactify_ma;
use dees::normalize::NormalizedSeries;
use dees::sampling::{draw_sample, Sample};
use dees::weight::{Rational, Weight};
use dees::word::Word;
use dees::{fixtures, io};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeesStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    /// Normalization refused: no absolute-convergence certificate or the
    /// total mass is not 1.
    Uncertified = 3,
    Numerical = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

pub struct DeesAutomaton {
    inner: AnyAutomaton,
}

pub struct DeesSample {
    inner: Sample,
}

enum AnyNormalized {
    Rational(NormalizedSeries<Rational>),
    Float(NormalizedSeries<f64>),
}

pub struct DeesNormalized {
    inner: AnyNormalized,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Null(&'static str),
    Dees(Error),
    Utf8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Dees(e)
    }
}

type FfiResult<T> = Result<T, Failure>;

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> FfiResult<()>) -> DeesStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => DeesStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("`{name}` is NULL"));
            DeesStatus::NullPointer
        }
        Ok(Err(Failure::Utf8)) => {
            set_error("string argument is not valid UTF-8".into());
            DeesStatus::InvalidInput
        }
        Ok(Err(Failure::Dees(e))) => {
            set_error(e.to_string());
            match e {
                Error::Uncertified(_) => DeesStatus::Uncertified,
                Error::Numerical(_) | Error::Divergent { .. } => DeesStatus::Numerical,
                _ => DeesStatus::InvalidInput,
            }
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            DeesStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, name: &'static str) -> FfiResult<&'a T> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn as_str<'a>(p: *const c_char, name: &'static str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Utf8)
}

unsafe fn check_out<T>(p: *mut T, name: &'static str) -> FfiResult<()> {
    if p.is_null() {
        Err(Failure::Null(name))
    } else {
        Ok(())
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("NULs were replaced").into_raw()
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failure on this thread, or NULL if none. The caller
/// frees the string with [`dees_string_free`].
#[no_mangle]
pub extern "C" fn dees_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dees_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an automaton JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dees_automaton_from_json(json: *const c_char, out: *mut *mut DeesAutomaton) -> DeesStatus {
    guard(|| {
        let text = as_str(json, "json")?;
        check_out(out, "out")?;
        let inner = io::automaton_from_json(text)?;
        *out = boxed(DeesAutomaton { inner });
        Ok(())
    })
}

/// Builds a named fixture (`dirac`, `half_loop`, `two_state_pda`,
/// `a_alpha(α;λ0,λ1,λ2)`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dees_automaton_fixture(name: *const c_char, out: *mut *mut DeesAutomaton) -> DeesStatus {
    guard(|| {
        let name = as_str(name, "name")?;
        check_out(out, "out")?;
        *out = boxed(DeesAutomaton { inner: fixtures::fixture(name)? });
        Ok(())
    })
}

/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dees_automaton_to_json(a: *const DeesAutomaton, out: *mut *mut c_char) -> DeesStatus {
    guard(|| {
        let a = as_ref(a, "automaton")?;
        check_out(out, "out")?;
        *out = into_c_string(io::any_to_json(&a.inner)?);
        Ok(())
    })
}

/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dees_automaton_state_count(a: *const DeesAutomaton, out: *mut usize) -> DeesStatus {
    guard(|| {
        let a = as_ref(a, "automaton")?;
        check_out(out, "out")?;
        *out = a.inner.n();
        Ok(())
    })
}

/// `r(w)` as a double (rational automata are evaluated exactly, then
/// rounded).
///
/// # Safety
/// `a` must be a live handle, `word` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dees_automaton_eval(a: *const DeesAutomaton, word: *const c_char, out: *mut f64) -> DeesStatus {
    guard(|| {
        let a = as_ref(a, "automaton")?;
        let word = as_str(word, "word")?;
        check_out(out, "out")?;
        let w = a.inner.alphabet().parse_word(word)?;
        *out = match &a.inner {
            AnyAutomaton::Rational(m) => m.word_weight(&w)?.to_f64(),
            AnyAutomaton::Float(m) => m.word_weight(&w)?,
        };
        Ok(())
    })
}

/// # Safety
/// `a` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dees_automaton_free(a: *mut DeesAutomaton) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Draws `n` words from a probabilistic automaton.
///
/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dees_sample_draw(a: *const DeesAutomaton, n: usize, seed: u64, out: *mut *mut DeesSample) -> DeesStatus {
    guard(|| {
        let a = as_ref(a, "automaton")?;
        check_out(out, "out")?;
        let inner = match &a.inner {
            AnyAutomaton::Rational(m) => draw_sample(m, n, seed)?,
            AnyAutomaton::Float(m) => draw_sample(m, n, seed)?,
        };
        *out = boxed(DeesSample { inner });
        Ok(())
    })
}

/// Parses a sample in text format (`#alphabet:` header, one word per line).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dees_sample_from_text(text: *const c_char, out: *mut *mut DeesSample) -> DeesStatus {
    guard(|| {
        let text = as_str(text, "text")?;
        check_out(out, "out")?;
        *out = boxed(DeesSample { inner: io::sample_from_text(text)? });
        Ok(())
    })
}

/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dees_sample_to_text(s: *const DeesSample, out: *mut *mut c_char) -> DeesStatus {
    guard(|| {
        let s = as_ref(s, "sample")?;
        check_out(out, "out")?;
        *out = into_c_string(io::sample_to_text(&s.inner));
        Ok(())
    })
}

/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dees_sample_len(s: *const DeesSample, out: *mut usize) -> DeesStatus {
    guard(|| {
        let s = as_ref(s, "sample")?;
        check_out(out, "out")?;
        *out = s.inner.len();
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dees_sample_free(s: *mut DeesSample) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Learns a floating automaton with DEES at tolerance `|S|^eps_exponent`
/// (the usual choice is `-1/3`).
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dees_learn(s: *const DeesSample, eps_exponent: f64, out: *mut *mut DeesAutomaton) -> DeesStatus {
    guard(|| {
        let s = as_ref(s, "sample")?;
        check_out(out, "out")?;
        let config = DeesConfig { eps_exponent, ..DeesConfig::default() };
        let (a, _) = dees(&s.inner, &config)?;
        *out = boxed(DeesAutomaton { inner: AnyAutomaton::Float(a) });
        Ok(())
    })
}

/// Rounds the parameters of an automaton learned from `n` words. `complete`
/// (optional) receives whether every parameter was recovered, in which case
/// the result is rational.
///
/// # Safety
/// `a` must be a live handle; `out` must be writable; `complete` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn dees_exactify(
    a: *const DeesAutomaton,
    n: usize,
    out: *mut *mut DeesAutomaton,
    complete: *mut bool,
) -> DeesStatus {
    guard(|| {
        let a = as_ref(a, "automaton")?;
        check_out(out, "out")?;
        let e = exactify_ma(&a.inner.to_float(), n)?;
        if !complete.is_null() {
            *complete = e.report.complete;
        }
        *out = boxed(DeesAutomaton { inner: e.automaton });
        Ok(())
    })
}

/// Normalizes a copy of `a`; fails with `Uncertified` when the series is not
/// certified absolutely convergent with total mass 1.
///
/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dees_normalized_new(a: *const DeesAutomaton, out: *mut *mut DeesNormalized) -> DeesStatus {
    guard(|| {
        let a = as_ref(a, "automaton")?;
        check_out(out, "out")?;
        let inner = match &a.inner {
            AnyAutomaton::Rational(m) => AnyNormalized::Rational(NormalizedSeries::new(m.clone())?),
            AnyAutomaton::Float(m) => AnyNormalized::Float(NormalizedSeries::new(m.clone())?),
        };
        *out = boxed(DeesNormalized { inner });
        Ok(())
    })
}

/// `p_r(w)`.
///
/// # Safety
/// `ns` must be a live handle, `word` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dees_normalized_eval(ns: *const DeesNormalized, word: *const c_char, out: *mut f64) -> DeesStatus {
    guard(|| {
        let ns = as_ref(ns, "normalized")?;
        let word = as_str(word, "word")?;
        check_out(out, "out")?;
        *out = match &ns.inner {
            AnyNormalized::Rational(s) => s.pr_eval(&parse(s.base().alphabet(), word)?)?.to_f64(),
            AnyNormalized::Float(s) => s.pr_eval(&parse(s.base().alphabet(), word)?)?,
        };
        Ok(())
    })
}

fn parse(alphabet: &dees::word::Alphabet, word: &str) -> FfiResult<Word> {
    Ok(alphabet.parse_word(word)?)
}

/// Draws `n` words from `p_r`.
///
/// # Safety
/// `ns` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dees_normalized_sample(ns: *const DeesNormalized, n: usize, seed: u64, out: *mut *mut DeesSample) -> DeesStatus {
    guard(|| {
        let ns = as_ref(ns, "normalized")?;
        check_out(out, "out")?;
        let inner = match &ns.inner {
            AnyNormalized::Rational(s) => s.pr_draw_sample(n, seed)?,
            AnyNormalized::Float(s) => s.pr_draw_sample(n, seed)?,
        };
        *out = boxed(DeesSample { inner });
        Ok(())
    })
}

/// # Safety
/// `ns` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dees_normalized_free(ns: *mut DeesNormalized) {
    if !ns.is_null() {
        drop(Box::from_raw(ns));
    }
}

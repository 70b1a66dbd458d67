//! C ABI over the `regen` crate.
//!
//! Codes and verification reports are opaque handles owned by the caller
//! and released with their `_free` function. Every fallible call returns a
//! [`RegenStatus`]; on failure a message is available from
//! [`regen_last_error`] on the same thread. Strings returned to the caller
//! are released with [`regen_string_free`]. Rationals cross the boundary as
//! `"p/q"` strings.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use libc::size_t;
use regen::constructions::{Builder, Recipe, DEFAULT_BUDGET};
use regen::dss::LinearDss;
use regen::tradeoff::{functional_capacity, perf_p1, timeshare_bound, SystemParams};
use regen::verifier::{verify, Mode, VerificationReport, VerifyOptions};
use regen::{Error, Rational};

/// Result of every fallible call. Values 1 to 4 match the command-line
/// exit statuses.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegenStatus {
    Ok = 0,
    Io = 1,
    /// A code failed its own checks.
    Verification = 2,
    Input = 3,
    Budget = 4,
    NullPointer = 5,
    /// Output buffer has the wrong length.
    BufferSize = 6,
    Panic = 7,
}

/// A built code.
pub struct RegenCode {
    code: Arc<LinearDss>,
}

/// A verification report.
pub struct RegenReport {
    report: VerificationReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> RegenStatus {
    match regen::cli::exit_code(err) {
        1 => RegenStatus::Io,
        2 => RegenStatus::Verification,
        4 => RegenStatus::Budget,
        _ => RegenStatus::Input,
    }
}

struct Failure(RegenStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guarded(f: impl FnOnce() -> FfiResult<()>) -> RegenStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RegenStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside regen".into());
            RegenStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, name: &str) -> FfiResult<&'a T> {
    p.as_ref()
        .ok_or_else(|| Failure(RegenStatus::NullPointer, format!("{name} is null")))
}

unsafe fn as_mut<'a, T>(p: *mut T, name: &str) -> FfiResult<&'a mut T> {
    p.as_mut()
        .ok_or_else(|| Failure(RegenStatus::NullPointer, format!("{name} is null")))
}

unsafe fn as_str<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure(RegenStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(RegenStatus::Input, format!("{name} is not UTF-8")))
}

unsafe fn as_rational(p: *const c_char, name: &str) -> FfiResult<Rational> {
    Ok(as_str(p, name)?.parse::<Rational>()?)
}

fn to_c_string(s: String) -> FfiResult<*mut c_char> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(RegenStatus::Input, "string holds a nul byte".into()))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on this thread; do not free.
#[no_mangle]
pub extern "C" fn regen_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn regen_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the code described by `recipe`, e.g. `"blowup_full(base(3,2))"`.
/// `budget` caps the stored symbol count; 0 selects the default.
#[no_mangle]
pub unsafe extern "C" fn regen_code_from_recipe(
    recipe: *const c_char,
    budget: size_t,
    out: *mut *mut RegenCode,
) -> RegenStatus {
    guarded(|| {
        let out = as_mut(out, "out")?;
        *out = ptr::null_mut();
        let recipe: Recipe = as_str(recipe, "recipe")?.parse()?;
        let budget = if budget == 0 { DEFAULT_BUDGET } else { budget };
        let code = Builder::new(budget).build(&recipe)?;
        *out = Box::into_raw(Box::new(RegenCode { code }));
        Ok(())
    })
}

/// Loads a code from its JSON description.
#[no_mangle]
pub unsafe extern "C" fn regen_code_from_json(json: *const c_char, out: *mut *mut RegenCode) -> RegenStatus {
    guarded(|| {
        let out = as_mut(out, "out")?;
        *out = ptr::null_mut();
        let code = LinearDss::from_json(as_str(json, "json")?)?;
        *out = Box::into_raw(Box::new(RegenCode { code: Arc::new(code) }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn regen_code_free(code: *mut RegenCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// `(n, k, d)` of the code.
#[no_mangle]
pub unsafe extern "C" fn regen_code_params(
    code: *const RegenCode,
    n: *mut size_t,
    k: *mut size_t,
    d: *mut size_t,
) -> RegenStatus {
    guarded(|| {
        let p = as_ref(code, "code")?.code.params();
        *as_mut(n, "n")? = p.n();
        *as_mut(k, "k")? = p.k();
        *as_mut(d, "d")? = p.d();
        Ok(())
    })
}

/// Declared node size, repair bandwidth and file size, in symbols.
#[no_mangle]
pub unsafe extern "C" fn regen_code_sizes(
    code: *const RegenCode,
    alpha: *mut size_t,
    gamma: *mut size_t,
    file_len: *mut size_t,
) -> RegenStatus {
    guarded(|| {
        let declared = as_ref(code, "code")?.code.declared();
        *as_mut(alpha, "alpha")? = declared.alpha;
        *as_mut(gamma, "gamma")? = declared.gamma;
        *as_mut(file_len, "file_len")? = declared.file;
        Ok(())
    })
}

/// Total number of symbols over all nodes; the length `regen_code_encode`
/// expects for its output.
#[no_mangle]
pub unsafe extern "C" fn regen_code_total_symbols(code: *const RegenCode, out: *mut size_t) -> RegenStatus {
    guarded(|| {
        *as_mut(out, "out")? = as_ref(code, "code")?.code.total_symbols();
        Ok(())
    })
}

/// Encodes `msg` (file length symbols) and writes every node's content,
/// node 0 first, into `out`.
#[no_mangle]
pub unsafe extern "C" fn regen_code_encode(
    code: *const RegenCode,
    msg: *const u16,
    msg_len: size_t,
    out: *mut u16,
    out_len: size_t,
) -> RegenStatus {
    guarded(|| {
        let code = &as_ref(code, "code")?.code;
        if msg.is_null() || out.is_null() {
            return Err(Failure(RegenStatus::NullPointer, "msg or out is null".into()));
        }
        if out_len != code.total_symbols() {
            return Err(Failure(
                RegenStatus::BufferSize,
                format!("out holds {out_len} symbols, code stores {}", code.total_symbols()),
            ));
        }
        let msg = std::slice::from_raw_parts(msg, msg_len);
        let nodes = code.encode(msg)?;
        let out = std::slice::from_raw_parts_mut(out, out_len);
        for (dst, src) in out.iter_mut().zip(nodes.iter().flatten()) {
            *dst = *src;
        }
        Ok(())
    })
}

/// JSON description of the code.
#[no_mangle]
pub unsafe extern "C" fn regen_code_json(code: *const RegenCode, out: *mut *mut c_char) -> RegenStatus {
    guarded(|| {
        let out = as_mut(out, "out")?;
        *out = to_c_string(as_ref(code, "code")?.code.to_json()?)?;
        Ok(())
    })
}

/// Runs reconstruction and repair sweeps (exhaustive when small enough,
/// sampled with `seed` otherwise). A failing code still yields a report;
/// check it with `regen_report_passed`.
#[no_mangle]
pub unsafe extern "C" fn regen_code_verify(
    code: *const RegenCode,
    seed: u64,
    strict_basis: bool,
    out: *mut *mut RegenReport,
) -> RegenStatus {
    guarded(|| {
        let out = as_mut(out, "out")?;
        *out = ptr::null_mut();
        let code = &as_ref(code, "code")?.code;
        let opts = VerifyOptions {
            mode: Mode::auto(&code.params(), seed),
            seed,
            strict_basis,
        };
        let report = verify(code, &opts)?;
        *out = Box::into_raw(Box::new(RegenReport { report }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn regen_report_free(report: *mut RegenReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// False for a null report.
#[no_mangle]
pub unsafe extern "C" fn regen_report_passed(report: *const RegenReport) -> bool {
    report.as_ref().is_some_and(|r| r.report.passed())
}

#[no_mangle]
pub unsafe extern "C" fn regen_report_json(report: *const RegenReport, out: *mut *mut c_char) -> RegenStatus {
    guarded(|| {
        let out = as_mut(out, "out")?;
        *out = to_c_string(as_ref(report, "report")?.report.to_json()?)?;
        Ok(())
    })
}

/// Functional-repair capacity at `(alpha, gamma)`, as `"p/q"`.
#[no_mangle]
pub unsafe extern "C" fn regen_capacity(
    n: size_t,
    k: size_t,
    d: size_t,
    alpha: *const c_char,
    gamma: *const c_char,
    out: *mut *mut c_char,
) -> RegenStatus {
    guarded(|| {
        let out = as_mut(out, "out")?;
        let p = SystemParams::new(n, k, d)?;
        let c = functional_capacity(&p, &as_rational(alpha, "alpha")?, &as_rational(gamma, "gamma")?)?;
        *out = to_c_string(c.to_string())?;
        Ok(())
    })
}

/// Timesharing file size at `(alpha, gamma)`, as `"p/q"`.
#[no_mangle]
pub unsafe extern "C" fn regen_timeshare(
    n: size_t,
    k: size_t,
    d: size_t,
    alpha: *const c_char,
    gamma: *const c_char,
    out: *mut *mut c_char,
) -> RegenStatus {
    guarded(|| {
        let out = as_mut(out, "out")?;
        let p = SystemParams::new(n, k, d)?;
        let t = timeshare_bound(&p, &as_rational(alpha, "alpha")?, &as_rational(gamma, "gamma")?)?;
        *out = to_c_string(t.to_string())?;
        Ok(())
    })
}

/// Bandwidth and file size of the main construction at index `i`.
#[no_mangle]
pub unsafe extern "C" fn regen_perf_p1(
    n: size_t,
    k: size_t,
    d: size_t,
    alpha: *const c_char,
    i: size_t,
    gamma_out: *mut *mut c_char,
    file_out: *mut *mut c_char,
) -> RegenStatus {
    guarded(|| {
        let gamma_out = as_mut(gamma_out, "gamma_out")?;
        let file_out = as_mut(file_out, "file_out")?;
        let p = SystemParams::new(n, k, d)?;
        let pt = perf_p1(&p, &as_rational(alpha, "alpha")?, i)?;
        let gamma = to_c_string(pt.gamma.to_string())?;
        match to_c_string(pt.file_size.to_string()) {
            Ok(file) => {
                *gamma_out = gamma;
                *file_out = file;
                Ok(())
            }
            Err(e) => {
                regen_string_free(gamma);
                Err(e)
            }
        }
    })
}

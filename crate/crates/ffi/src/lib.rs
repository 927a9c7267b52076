//! C ABI over the verification engine.
//!
//! Every entry point returns an `FktStatus`; results travel through out
//! parameters. Handles are opaque, functions are panic-safe, and any
//! string the library allocates is released with [`fkt_string_free`].
//! A human-readable description of the most recent failure on the
//! calling thread is available via [`fkt_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fkt_core::cli::{self, AlgebraArgs, Cli, Command, Format};
use fkt_core::error::Error;
use fkt_core::lax::{check_casimirs, check_independence, check_involution};
use fkt_core::rankcheck::{poisson_rank_at_l0, verify_block_ranks, GenericParams};
use fkt_core::rootsys::{AlgebraType, Family, RootSystem};
use fkt_core::tk::tk_check;

/// Status codes returned by every API function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FktStatus {
    /// The call succeeded.
    Ok = 0,
    /// An argument was out of range or malformed.
    InvalidArgument = 1,
    /// The request names a type or feature outside the supported set.
    Unsupported = 2,
    /// An internal consistency check failed.
    Internal = 3,
    /// A required pointer argument was null.
    NullPointer = 4,
}

/// Opaque handle owning a root system and everything derived from it.
pub struct FktEngine {
    rs: RootSystem,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_last_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn status_of(e: &Error) -> FktStatus {
    match e {
        Error::Internal(_) => FktStatus::Internal,
        Error::UnsupportedType { .. } => FktStatus::Unsupported,
        _ => FktStatus::InvalidArgument,
    }
}

fn fail(e: &Error) -> FktStatus {
    set_last_error(&e.to_string());
    status_of(e)
}

/// Runs a closure with panic isolation; a panic becomes `Internal`.
fn guarded<F: FnOnce() -> FktStatus>(f: F) -> FktStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_last_error("internal panic");
            FktStatus::Internal
        }
    }
}

macro_rules! require {
    ($ptr:expr) => {
        if $ptr.is_null() {
            set_last_error(concat!("null pointer: ", stringify!($ptr)));
            return FktStatus::NullPointer;
        }
    };
}

/// Creates an engine for the simple type `<family><rank>`, e.g. ('B', 3).
/// On success writes the handle to `out_engine`; free it with
/// [`fkt_engine_free`].
///
/// # Safety
/// `out_engine` must be a valid pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn fkt_engine_new(
    family: c_char,
    rank: u32,
    out_engine: *mut *mut FktEngine,
) -> FktStatus {
    require!(out_engine);
    guarded(|| {
        unsafe { *out_engine = ptr::null_mut() };
        let letter = (family as u8 as char).to_ascii_uppercase();
        let fam = match Family::from_letter(letter) {
            Some(f) => f,
            None => {
                set_last_error(&format!("unknown family letter '{letter}'"));
                return FktStatus::InvalidArgument;
            }
        };
        let at = match AlgebraType::new(fam, rank as usize) {
            Ok(at) => at,
            Err(e) => return fail(&e),
        };
        match RootSystem::build(at) {
            Ok(rs) => {
                let handle = Box::new(FktEngine { rs });
                unsafe { *out_engine = Box::into_raw(handle) };
                FktStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases an engine handle. Passing null is a no-op.
///
/// # Safety
/// `engine` must be null or a pointer obtained from [`fkt_engine_new`]
/// that has not already been freed.
#[no_mangle]
pub unsafe extern "C" fn fkt_engine_free(engine: *mut FktEngine) {
    if !engine.is_null() {
        drop(unsafe { Box::from_raw(engine) });
    }
}

unsafe fn engine_ref<'a>(engine: *const FktEngine) -> Option<&'a FktEngine> {
    unsafe { engine.as_ref() }
}

/// Shared body of the scalar getters; callers have already null-checked.
unsafe fn write_getter(
    engine: *const FktEngine,
    out: *mut u32,
    f: fn(&RootSystem) -> usize,
) -> FktStatus {
    guarded(|| {
        let e = unsafe { engine_ref(engine) }.unwrap();
        unsafe { *out = f(&e.rs) as u32 };
        FktStatus::Ok
    })
}

/// Writes the dimension of the algebra to `out`.
///
/// # Safety
/// `engine` must be a live handle and `out` a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fkt_engine_dim(engine: *const FktEngine, out: *mut u32) -> FktStatus {
    require!(engine);
    require!(out);
    unsafe { write_getter(engine, out, |rs| rs.dim()) }
}

/// Writes the rank of the algebra to `out`.
///
/// # Safety
/// `engine` must be a live handle and `out` a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fkt_engine_rank(engine: *const FktEngine, out: *mut u32) -> FktStatus {
    require!(engine);
    require!(out);
    unsafe { write_getter(engine, out, |rs| rs.rank()) }
}

/// Writes the number of members in the spectral invariant family,
/// (dim + rank)/2, to `out`.
///
/// # Safety
/// `engine` must be a live handle and `out` a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fkt_engine_family_size(
    engine: *const FktEngine,
    out: *mut u32,
) -> FktStatus {
    require!(engine);
    require!(out);
    unsafe { write_getter(engine, out, |rs| (rs.dim() + rs.rank()) / 2) }
}

/// Writes the largest exponent m_top to `out`; levels 1..=m_top are
/// valid truncations.
///
/// # Safety
/// `engine` must be a live handle and `out` a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fkt_engine_top_exponent(
    engine: *const FktEngine,
    out: *mut u32,
) -> FktStatus {
    require!(engine);
    require!(out);
    unsafe { write_getter(engine, out, |rs| rs.m_top()) }
}

/// Verifies the height-graded block ranks and the bracket rank at the
/// marker point, writing 1 to `out_pass` if both certificates hold.
///
/// # Safety
/// `engine` must be a live handle and `out_pass` a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fkt_check_ranks(engine: *const FktEngine, out_pass: *mut u8) -> FktStatus {
    require!(engine);
    require!(out_pass);
    guarded(|| {
        let e = unsafe { engine_ref(engine) }.unwrap();
        let b = GenericParams::primes(e.rs.rank());
        let blocks = match verify_block_ranks(&e.rs, &b) {
            Ok(r) => r,
            Err(err) => return fail(&err),
        };
        let pr = match poisson_rank_at_l0(&e.rs, &b) {
            Ok(r) => r,
            Err(err) => return fail(&err),
        };
        unsafe { *out_pass = u8::from(blocks.pass && pr.pass) };
        FktStatus::Ok
    })
}

/// Checks that all family members pairwise Poisson-commute exactly at
/// `trials` random rational points drawn from `seed`.
///
/// # Safety
/// `engine` must be a live handle and `out_pass` a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fkt_check_involution(
    engine: *const FktEngine,
    trials: u32,
    seed: u64,
    out_pass: *mut u8,
) -> FktStatus {
    require!(engine);
    require!(out_pass);
    guarded(|| {
        let e = unsafe { engine_ref(engine) }.unwrap();
        match check_involution(&e.rs, trials as usize, seed) {
            Ok(rep) => {
                unsafe { *out_pass = u8::from(rep.pass) };
                FktStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Checks that the deepest extractions annihilate the bracket and stay
/// independent.
///
/// # Safety
/// `engine` must be a live handle and `out_pass` a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fkt_check_casimirs(
    engine: *const FktEngine,
    trials: u32,
    seed: u64,
    out_pass: *mut u8,
) -> FktStatus {
    require!(engine);
    require!(out_pass);
    guarded(|| {
        let e = unsafe { engine_ref(engine) }.unwrap();
        match check_casimirs(&e.rs, trials as usize, seed) {
            Ok(rep) => {
                unsafe { *out_pass = u8::from(rep.pass) };
                FktStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Checks that the family Jacobian attains rank (dim + rank)/2 at the
/// marker point and at random points.
///
/// # Safety
/// `engine` must be a live handle and `out_pass` a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fkt_check_independence(
    engine: *const FktEngine,
    seed: u64,
    out_pass: *mut u8,
) -> FktStatus {
    require!(engine);
    require!(out_pass);
    guarded(|| {
        let e = unsafe { engine_ref(engine) }.unwrap();
        match check_independence(&e.rs, seed) {
            Ok(rep) => {
                unsafe { *out_pass = u8::from(rep.pass) };
                FktStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Tests the level-`k` truncated family and writes 1 to `out_consistent`
/// when independence, Casimir count, and the Liouville count all hold on
/// that chart.
///
/// # Safety
/// `engine` must be a live handle and `out_consistent` a valid writable
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn fkt_tk_consistent(
    engine: *const FktEngine,
    k: u32,
    trials: u32,
    seed: u64,
    out_consistent: *mut u8,
) -> FktStatus {
    require!(engine);
    require!(out_consistent);
    guarded(|| {
        let e = unsafe { engine_ref(engine) }.unwrap();
        match tk_check(&e.rs, k as usize, trials as usize, seed) {
            Ok(rep) => {
                unsafe { *out_consistent = u8::from(rep.consistent) };
                FktStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

fn command_for(name: &str, alg: AlgebraArgs, k: u32, trials: u32, seed: u64) -> Option<Command> {
    let trials = trials as usize;
    Some(match name {
        "roots" => Command::Roots(alg),
        "rank-check" => Command::RankCheck {
            family: Some(alg.family),
            rank: Some(alg.rank),
            all: false,
        },
        "invariants" => Command::Invariants {
            algebra: alg,
            trials,
            seed,
        },
        "involution" => Command::Involution {
            algebra: alg,
            trials,
            seed,
        },
        "casimirs" => Command::Casimirs {
            algebra: alg,
            trials,
            seed,
        },
        "independence" => Command::Independence { algebra: alg, seed },
        "flow" => Command::Flow {
            algebra: alg,
            t_end: 10.0,
            dt: 1e-3,
            seed,
            amplitude: 0.1,
            record_every: 0,
        },
        "tk-check" => Command::TkCheck {
            algebra: alg,
            k: (k > 0).then_some(k as usize),
            all_k: k == 0,
            trials,
            seed,
        },
        _ => return None,
    })
}

/// Runs one named check suite ("roots", "rank-check", "invariants",
/// "involution", "casimirs", "independence", "flow", "tk-check") and
/// returns the full JSON report. For "tk-check", `k` selects the level
/// and 0 means all levels; other commands ignore `k`. Free the returned
/// string with [`fkt_string_free`].
///
/// # Safety
/// `engine` must be a live handle, `command` a NUL-terminated string,
/// and `out_json` a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fkt_report_json(
    engine: *const FktEngine,
    command: *const c_char,
    k: u32,
    trials: u32,
    seed: u64,
    out_json: *mut *mut c_char,
) -> FktStatus {
    require!(engine);
    require!(command);
    require!(out_json);
    guarded(|| {
        unsafe { *out_json = ptr::null_mut() };
        let e = unsafe { engine_ref(engine) }.unwrap();
        let name = match unsafe { CStr::from_ptr(command) }.to_str() {
            Ok(s) => s,
            Err(_) => {
                set_last_error("command is not valid UTF-8");
                return FktStatus::InvalidArgument;
            }
        };
        let alg = AlgebraArgs {
            family: e.rs.algebra().family(),
            rank: e.rs.rank(),
        };
        let cmd = match command_for(name, alg, k, trials, seed) {
            Some(c) => c,
            None => {
                set_last_error(&format!("unknown command '{name}'"));
                return FktStatus::InvalidArgument;
            }
        };
        let cli = Cli {
            command: cmd,
            format: Format::Json,
            out: None,
            float_tol: 1e-8,
            grad_tol: 1e-5,
        };
        match cli::run(&cli) {
            Ok(outcome) => {
                let body =
                    serde_json::to_string_pretty(&outcome.report).expect("report serializes");
                let cs = CString::new(body.replace('\0', " ")).unwrap();
                unsafe { *out_json = cs.into_raw() };
                FktStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Releases a string returned by this library. Passing null is a no-op.
///
/// # Safety
/// `s` must be null or a pointer returned by an `fkt_*` function that
/// has not already been freed.
#[no_mangle]
pub unsafe extern "C" fn fkt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Returns a static description of a status code.
#[no_mangle]
pub extern "C" fn fkt_status_message(status: FktStatus) -> *const c_char {
    let msg: &'static str = match status {
        FktStatus::Ok => "ok\0",
        FktStatus::InvalidArgument => "invalid argument\0",
        FktStatus::Unsupported => "unsupported type or feature\0",
        FktStatus::Internal => "internal consistency failure\0",
        FktStatus::NullPointer => "null pointer argument\0",
    };
    msg.as_ptr() as *const c_char
}

/// Returns the message attached to the most recent failure on this
/// thread. The pointer stays valid until the next library call on the
/// same thread; do not free it.
#[no_mangle]
pub extern "C" fn fkt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Returns the library version as a static string.
#[no_mangle]
pub extern "C" fn fkt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

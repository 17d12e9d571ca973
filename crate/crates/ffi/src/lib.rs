//! C ABI over the budget-flow solver.
//!
//! Instances and solutions are opaque heap handles created by `bf_*_parse` /
//! `bf_solve` and released with the matching `bf_*_free`. Every fallible call
//! returns a `BfStatus`; the message for the last failure on the calling
//! thread is available through `bf_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::ptr;

use budget_flow::bts::{solve, Solution};
use budget_flow::instance::{parse, NumericMode, ProblemInstance, SolverConfig};
use budget_flow::numeric::{fmt_fraction, Rational};
use budget_flow::oracle::{exact_opt, OracleError};
use budget_flow::solution::serialize;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Solve = 5,
    OutOfRange = 6,
    BufferTooSmall = 7,
    TooLarge = 8,
    Panic = 9,
}

/// Opaque parsed instance.
pub struct BfInstance {
    inner: ProblemInstance,
}

/// Opaque solver result; owns a copy of its instance.
pub struct BfSolution {
    inst: ProblemInstance,
    sol: Solution,
}

/// Solver options. `epsilon_num / epsilon_den` must lie strictly between 0 and 1.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BfOptions {
    pub epsilon_num: i64,
    pub epsilon_den: i64,
    /// Non-zero selects floating-point mode with tolerance `eta`.
    pub float_mode: u8,
    pub eta: f64,
    /// Zero means no limit.
    pub max_phases: u64,
}

/// Scalar summary of a solution.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BfSummary {
    pub certificate_passed: u8,
    pub rigorous: u8,
    pub terminated: u8,
    pub primal: f64,
    pub dual: f64,
    pub iterations: u64,
    pub beta_rises: u64,
    pub beta_activations: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: BfStatus, msg: impl Into<String>) -> BfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
    status
}

fn guard(f: impl FnOnce() -> BfStatus) -> BfStatus {
    std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).unwrap_or_else(|_| fail(BfStatus::Panic, "internal panic"))
}

/// Copies `text` plus a NUL into `buf`; `needed` always receives the full size.
/// A short buffer leaves the last error message untouched.
unsafe fn write_str(text: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> BfStatus {
    let size = text.len() + 1;
    if !needed.is_null() {
        *needed = size;
    }
    if buf.is_null() || cap < size {
        return BfStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
    *buf.add(text.len()) = 0;
    BfStatus::Ok
}

/// Options with ε = 1/4, exact arithmetic and no phase limit.
#[no_mangle]
pub extern "C" fn bf_options_default() -> BfOptions {
    BfOptions { epsilon_num: 1, epsilon_den: 4, float_mode: 0, eta: 1e-9, max_phases: 0 }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn bf_status_str(status: BfStatus) -> *const c_char {
    let s: &'static CStr = match status {
        BfStatus::Ok => c"ok",
        BfStatus::NullPointer => c"null pointer argument",
        BfStatus::InvalidUtf8 => c"input is not valid UTF-8",
        BfStatus::Parse => c"parse or validation error",
        BfStatus::InvalidArgument => c"invalid argument",
        BfStatus::Solve => c"solver rejected the input",
        BfStatus::OutOfRange => c"index out of range",
        BfStatus::BufferTooSmall => c"buffer too small",
        BfStatus::TooLarge => c"instance too large for the oracle",
        BfStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Copies the last error message of this thread into `buf`.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes; `needed` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn bf_last_error(buf: *mut c_char, cap: usize, needed: *mut usize) -> BfStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    write_str(&msg, buf, cap, needed)
}

/// Parses a NUL-terminated instance text.
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_instance_parse(text: *const c_char, out: *mut *mut BfInstance) -> BfStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(BfStatus::NullPointer, "text and out must be non-null");
        }
        *out = ptr::null_mut();
        let Ok(s) = CStr::from_ptr(text).to_str() else {
            return fail(BfStatus::InvalidUtf8, "instance text is not UTF-8");
        };
        match parse(s) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(BfInstance { inner }));
                BfStatus::Ok
            }
            Err(e) => fail(BfStatus::Parse, e.to_string()),
        }
    })
}

/// # Safety
/// `inst` must be null or a handle from `bf_instance_parse` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bf_instance_free(inst: *mut BfInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Source, sink and edge counts.
///
/// # Safety
/// `inst` must be a live handle; the out pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn bf_instance_dims(inst: *const BfInstance, n: *mut usize, m: *mut usize, edges: *mut usize) -> BfStatus {
    let Some(inst) = inst.as_ref() else {
        return fail(BfStatus::NullPointer, "instance is null");
    };
    for (p, v) in [(n, inst.inner.n()), (m, inst.inner.m()), (edges, inst.inner.edges.len())] {
        if !p.is_null() {
            *p = v;
        }
    }
    BfStatus::Ok
}

/// Runs the solver; on success `*out` owns a new solution handle.
///
/// # Safety
/// `inst` must be a live handle, `opts` null (defaults) or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bf_solve(inst: *const BfInstance, opts: *const BfOptions, out: *mut *mut BfSolution) -> BfStatus {
    guard(|| {
        let Some(inst) = inst.as_ref() else {
            return fail(BfStatus::NullPointer, "instance is null");
        };
        if out.is_null() {
            return fail(BfStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let opts = opts.as_ref().copied().unwrap_or_else(|| bf_options_default());
        if opts.epsilon_den == 0 {
            return fail(BfStatus::InvalidArgument, "epsilon denominator is zero");
        }
        let mut cfg = SolverConfig::new(Rational::new(BigInt::from(opts.epsilon_num), BigInt::from(opts.epsilon_den)));
        if opts.float_mode != 0 {
            cfg.numeric_mode = NumericMode::Float64 { eta: opts.eta };
        }
        cfg.max_phases = (opts.max_phases > 0).then_some(opts.max_phases);
        match solve(&inst.inner, &cfg) {
            Ok(sol) => {
                *out = Box::into_raw(Box::new(BfSolution { inst: inst.inner.clone(), sol }));
                BfStatus::Ok
            }
            Err(e) => fail(BfStatus::Solve, e.to_string()),
        }
    })
}

/// # Safety
/// `sol` must be null or a handle from `bf_solve` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bf_solution_free(sol: *mut BfSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// # Safety
/// `sol` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bf_solution_summary(sol: *const BfSolution, out: *mut BfSummary) -> BfStatus {
    let (Some(s), false) = (sol.as_ref(), out.is_null()) else {
        return fail(BfStatus::NullPointer, "solution and out must be non-null");
    };
    let c = &s.sol.certificate;
    *out = BfSummary {
        certificate_passed: c.passed.into(),
        rigorous: c.rigorous.into(),
        terminated: s.sol.terminated.into(),
        primal: c.primal_value.to_f64().unwrap_or(f64::NAN),
        dual: c.dual_value.to_f64().unwrap_or(f64::NAN),
        iterations: s.sol.stats.iterations,
        beta_rises: s.sol.stats.total_beta_rises(),
        beta_activations: s.sol.stats.beta_activations,
    };
    BfStatus::Ok
}

/// Flow on edge `edge` (0-based) as a double.
///
/// # Safety
/// `sol` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bf_solution_flow(sol: *const BfSolution, edge: usize, out: *mut f64) -> BfStatus {
    let (Some(s), false) = (sol.as_ref(), out.is_null()) else {
        return fail(BfStatus::NullPointer, "solution and out must be non-null");
    };
    match s.sol.flows.get(edge) {
        Some(f) => {
            *out = f.to_f64().unwrap_or(f64::NAN);
            BfStatus::Ok
        }
        None => fail(BfStatus::OutOfRange, format!("edge {edge} out of range")),
    }
}

/// Exact primal value as `num/den`.
///
/// # Safety
/// `sol` must be a live handle; `buf` null or valid for `cap` bytes; `needed` null or valid.
#[no_mangle]
pub unsafe extern "C" fn bf_solution_primal_exact(sol: *const BfSolution, buf: *mut c_char, cap: usize, needed: *mut usize) -> BfStatus {
    let Some(s) = sol.as_ref() else {
        return fail(BfStatus::NullPointer, "solution is null");
    };
    write_str(&fmt_fraction(s.sol.primal_value()), buf, cap, needed)
}

/// The full solution file text, as written by `budget-flow solve`.
///
/// Call with a null `buf` to learn the size.
///
/// # Safety
/// `sol` must be a live handle; `buf` null or valid for `cap` bytes; `needed` null or valid.
#[no_mangle]
pub unsafe extern "C" fn bf_solution_text(sol: *const BfSolution, buf: *mut c_char, cap: usize, needed: *mut usize) -> BfStatus {
    let Some(s) = sol.as_ref() else {
        return fail(BfStatus::NullPointer, "solution is null");
    };
    write_str(&serialize(&s.inst, &s.sol), buf, cap, needed)
}

/// Exact LP optimum of a small instance, as `num/den`.
///
/// # Safety
/// `inst` must be a live handle; `buf` null or valid for `cap` bytes; `needed` null or valid.
#[no_mangle]
pub unsafe extern "C" fn bf_oracle_value(inst: *const BfInstance, buf: *mut c_char, cap: usize, needed: *mut usize) -> BfStatus {
    guard(|| {
        let Some(inst) = inst.as_ref() else {
            return fail(BfStatus::NullPointer, "instance is null");
        };
        match exact_opt(&inst.inner) {
            Ok(opt) => write_str(&fmt_fraction(&opt.value), buf, cap, needed),
            Err(e @ OracleError::TooLarge(_)) => fail(BfStatus::TooLarge, e.to_string()),
            Err(e) => fail(BfStatus::Solve, e.to_string()),
        }
    })
}

//! C interface to the prologtheta interpreter.
//!
//! Sessions and solvers are opaque handles. Every function that can fail
//! returns a [`PtStatus`]; the message of the most recent failure on the
//! calling thread is available from [`pt_last_error_message`]. Strings handed
//! out by this library are owned by the caller and must be released with
//! [`pt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use prologtheta::ast::{FreeVarDefault, QueryPolicy};
use prologtheta::cli::solution_json;
use prologtheta::engine::{answer_labels, format_proof, GroundnessMode, Outcome, Solution, SolveConfig, Solver};
use prologtheta::Session;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtStatus {
    /// Success; for `pt_solver_next`, a solution is available.
    Ok = 0,
    /// `pt_solver_next` found no further solution.
    NoMore = 1,
    /// Load, parse or well-formedness error; see `pt_last_error_message`.
    Error = 2,
    /// No further solution within the depth bound, but the search was cut off.
    Incomplete = 3,
    NullArgument = 4,
    InvalidUtf8 = 5,
    /// Answer index out of range, or no current solution.
    OutOfRange = 6,
    /// An internal error was caught at the boundary.
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtGroundness {
    Strict = 0,
    Lenient = 1,
}

/// Opaque session handle.
pub struct PtSession {
    session: Session,
    config: SolveConfig,
}

/// Opaque handle for the solutions of one query.
pub struct PtSolver {
    solver: Solver,
    current: Option<Solution>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> PtStatus) -> PtStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal error");
            PtStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, PtStatus> {
    if p.is_null() {
        set_error("null argument");
        return Err(PtStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        PtStatus::InvalidUtf8
    })
}

fn owned(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

macro_rules! deref {
    ($p:expr) => {
        match unsafe { $p.as_mut() } {
            Some(x) => x,
            None => {
                set_error("null handle");
                return PtStatus::NullArgument;
            }
        }
    };
}

/// Creates an empty session. Release with `pt_session_free`.
#[no_mangle]
pub extern "C" fn pt_session_new() -> *mut PtSession {
    Box::into_raw(Box::new(PtSession {
        session: Session::new(),
        config: SolveConfig { max_solutions: None, ..SolveConfig::default() },
    }))
}

/// # Safety
/// `session` must come from `pt_session_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pt_session_free(session: *mut PtSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Loads a module from source text. `name` is used when the text has no
/// `module` header.
///
/// # Safety
/// Pointers must be valid NUL-terminated strings and a live session.
#[no_mangle]
pub unsafe extern "C" fn pt_session_load(
    session: *mut PtSession,
    name: *const c_char,
    source: *const c_char,
) -> PtStatus {
    guard(|| {
        let s = deref!(session);
        let (name, source) = match (text(name), text(source)) {
            (Ok(n), Ok(t)) => (n, t),
            (Err(e), _) | (_, Err(e)) => return e,
        };
        match s.session.load_str(source, name) {
            Ok(_) => PtStatus::Ok,
            Err(e) => {
                set_error(e.to_string());
                PtStatus::Error
            }
        }
    })
}

/// Loads a module file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `session` live.
#[no_mangle]
pub unsafe extern "C" fn pt_session_load_path(session: *mut PtSession, path: *const c_char) -> PtStatus {
    guard(|| {
        let s = deref!(session);
        let path = match text(path) {
            Ok(p) => p,
            Err(e) => return e,
        };
        match s.session.load_path(Path::new(path)) {
            Ok(_) => PtStatus::Ok,
            Err(e) => {
                set_error(e.to_string());
                PtStatus::Error
            }
        }
    })
}

/// # Safety
/// `session` must be live.
#[no_mangle]
pub unsafe extern "C" fn pt_session_set_groundness(session: *mut PtSession, mode: PtGroundness) -> PtStatus {
    guard(|| {
        let s = deref!(session);
        s.config.groundness = match mode {
            PtGroundness::Strict => GroundnessMode::Strict,
            PtGroundness::Lenient => GroundnessMode::Lenient,
        };
        PtStatus::Ok
    })
}

/// Bounds the proof-tree height; 0 removes the bound.
///
/// # Safety
/// `session` must be live.
#[no_mangle]
pub unsafe extern "C" fn pt_session_set_max_depth(session: *mut PtSession, depth: u32) -> PtStatus {
    guard(|| {
        let s = deref!(session);
        s.config.max_depth = (depth > 0).then_some(depth);
        PtStatus::Ok
    })
}

/// # Safety
/// `session` must be live.
#[no_mangle]
pub unsafe extern "C" fn pt_session_set_occurs_check(session: *mut PtSession, on: bool) -> PtStatus {
    guard(|| {
        let s = deref!(session);
        s.config.occurs_check = on;
        PtStatus::Ok
    })
}

/// Whether free query variables are reported (the default) or silent.
///
/// # Safety
/// `session` must be live.
#[no_mangle]
pub unsafe extern "C" fn pt_session_set_free_vars_noisy(session: *mut PtSession, noisy: bool) -> PtStatus {
    guard(|| {
        let s = deref!(session);
        s.session.policy = QueryPolicy {
            default_free_var: if noisy { FreeVarDefault::NoisyExistential } else { FreeVarDefault::SilentExistential },
        };
        PtStatus::Ok
    })
}

/// Starts a query. On success `*out` receives a solver, to be released with
/// `pt_solver_free`. The solver stays valid after the session is freed.
///
/// # Safety
/// `session` must be live, `query` a valid string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pt_session_query(
    session: *mut PtSession,
    query: *const c_char,
    out: *mut *mut PtSolver,
) -> PtStatus {
    guard(|| {
        let s = deref!(session);
        if out.is_null() {
            set_error("null output pointer");
            return PtStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let query = match text(query) {
            Ok(q) => q,
            Err(e) => return e,
        };
        match s.session.solver(query, &s.config) {
            Ok(solver) => {
                *out = Box::into_raw(Box::new(PtSolver { solver, current: None }));
                PtStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                PtStatus::Error
            }
        }
    })
}

/// Advances to the next solution: `Ok` when one is available, `NoMore` or
/// `Incomplete` when the search is over.
///
/// # Safety
/// `solver` must be live.
#[no_mangle]
pub unsafe extern "C" fn pt_solver_next(solver: *mut PtSolver) -> PtStatus {
    guard(|| {
        let s = deref!(solver);
        match s.solver.next_solution() {
            Outcome::Solution(sol) => {
                s.current = Some(sol);
                PtStatus::Ok
            }
            Outcome::Exhausted => {
                s.current = None;
                PtStatus::NoMore
            }
            Outcome::Incomplete => {
                s.current = None;
                PtStatus::Incomplete
            }
        }
    })
}

/// Number of bindings in the current answer, or 0 without a current solution.
///
/// # Safety
/// `solver` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn pt_solver_answer_count(solver: *const PtSolver) -> usize {
    solver.as_ref().and_then(|s| s.current.as_ref()).map_or(0, |sol| sol.answer.len())
}

unsafe fn answer_field(
    solver: *const PtSolver,
    index: usize,
    out: *mut *mut c_char,
    pick: impl FnOnce(&Solution, usize) -> String,
) -> PtStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return PtStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let Some(s) = solver.as_ref() else {
            set_error("null handle");
            return PtStatus::NullArgument;
        };
        match &s.current {
            Some(sol) if index < sol.answer.len() => {
                *out = owned(&pick(sol, index));
                PtStatus::Ok
            }
            _ => {
                set_error(format!("no answer binding at index {index}"));
                PtStatus::OutOfRange
            }
        }
    })
}

/// Label of the `index`th answer variable (`Y`, or `Y#2` for a repeated name).
///
/// # Safety
/// `solver` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pt_solver_answer_var(
    solver: *const PtSolver,
    index: usize,
    out: *mut *mut c_char,
) -> PtStatus {
    answer_field(solver, index, out, |sol, i| answer_labels(&sol.answer)[i].clone())
}

/// The term bound to the `index`th answer variable.
///
/// # Safety
/// `solver` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pt_solver_answer_term(
    solver: *const PtSolver,
    index: usize,
    out: *mut *mut c_char,
) -> PtStatus {
    answer_field(solver, index, out, |sol, i| sol.answer[i].term.to_string())
}

/// 1 if the current solution's answer is ground, 0 if not (lenient mode
/// only), -1 without a current solution.
///
/// # Safety
/// `solver` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn pt_solver_is_ground(solver: *const PtSolver) -> i32 {
    match solver.as_ref().and_then(|s| s.current.as_ref()) {
        Some(sol) => i32::from(sol.ground),
        None => -1,
    }
}

/// The current solution's proof, one step per line, deepest first.
///
/// # Safety
/// `solver` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn pt_solver_trace_text(solver: *const PtSolver) -> *mut c_char {
    match solver.as_ref().and_then(|s| s.current.as_ref()) {
        Some(sol) => owned(&format_proof(&sol.trace, &sol.answer)),
        None => ptr::null_mut(),
    }
}

/// The current solution as a JSON document (see docs/trace.schema.json).
///
/// # Safety
/// `solver` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn pt_solver_json(solver: *const PtSolver) -> *mut c_char {
    match solver.as_ref().and_then(|s| s.current.as_ref()) {
        Some(sol) => owned(&solution_json(sol)),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `solver` must come from `pt_session_query` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pt_solver_free(solver: *mut PtSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Copy of the last error message on this thread, or null if the last call
/// succeeded.
#[no_mangle]
pub extern "C" fn pt_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |m| m.clone().into_raw()))
}

/// # Safety
/// `s` must be a string returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn pt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, a static string that must not be freed.
#[no_mangle]
pub extern "C" fn pt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

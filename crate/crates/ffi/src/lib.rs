//! C ABI over `fundet`.
//!
//! Every function returns an [`FdStatus`]; results go through out-pointers.
//! On failure the message is kept per thread and can be read with
//! [`fd_last_error_message`]. Handles are opaque and must be released with
//! the matching `_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fundet::determinants::{det_dirichlet_regularized, det_dirichlet_regularized_spec, determinant};
use fundet::green::{kernel, GreenKernel};
use fundet::odesolve::{make_basis, BasisConvention};
use fundet::oracle::{gflow_ratio, lattice_ratio};
use fundet::profiles::{FrequencyProfile, Interval, ProfileConfig, SyntheticZeroModeSpec};
use fundet::{BoundaryCondition, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdStatus {
    Ok = 0,
    InvalidArgument = 1,
    /// The operator has a zero mode (or the Green kernel does not exist).
    Degenerate = 2,
    NumericalFailure = 3,
    NullPointer = 4,
    Panic = 5,
}

/// Boundary condition selector: one of the `FD_BC_*` constants.
pub type FdBoundary = u32;
pub const FD_BC_DIRICHLET: FdBoundary = 0;
pub const FD_BC_PERIODIC: FdBoundary = 1;
pub const FD_BC_ANTIPERIODIC: FdBoundary = 2;

/// A frequency profile `Ω²(t)` on `[t_a, t_b]`.
pub struct FdProfile {
    profile: FrequencyProfile,
    zero_mode: Option<SyntheticZeroModeSpec>,
}

/// Green function of one profile and boundary condition.
pub struct FdGreen {
    kernel: GreenKernel,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FdDetResult {
    pub value: f64,
    pub ratio: f64,
    pub wronskian: f64,
    pub endpoint_det: f64,
    pub monodromy_trace: f64,
    /// Nonzero when the operator has a zero mode to working accuracy.
    pub degenerate: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> FdStatus {
    match e {
        Error::InvalidInterval { .. }
        | Error::InvalidArgument(_)
        | Error::NonFinite { .. }
        | Error::Discontinuous { .. }
        | Error::InvalidZeroMode(_)
        | Error::DegenerateReference(_) => FdStatus::InvalidArgument,
        e if e.is_degenerate_operator() => FdStatus::Degenerate,
        _ => FdStatus::NumericalFailure,
    }
}

enum Failure {
    Status(FdStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(FdStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records the error message and turns panics into `FdStatus::Panic`.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            FdStatus::Ok
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            FdStatus::Panic
        }
    }
}

fn boundary(bc: FdBoundary) -> Result<BoundaryCondition, Failure> {
    match bc {
        FD_BC_DIRICHLET => Ok(BoundaryCondition::Dirichlet),
        FD_BC_PERIODIC => Ok(BoundaryCondition::Periodic),
        FD_BC_ANTIPERIODIC => Ok(BoundaryCondition::Antiperiodic),
        other => Err(Failure::Status(
            FdStatus::InvalidArgument,
            format!("unknown boundary condition {other}"),
        )),
    }
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure::Status(FdStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn profile_ref<'a>(p: *const FdProfile) -> Result<&'a FdProfile, Failure> {
    p.as_ref().ok_or_else(|| null("profile"))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn new_profile(out: *mut *mut FdProfile, build: impl FnOnce() -> Result<FdProfile, Failure>) -> FdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let p = build()?;
        out.write(Box::into_raw(Box::new(p)));
        Ok(())
    })
}

/// `Ω² ≡ omega²` on `[t_a, t_b]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fd_profile_constant(
    omega: f64,
    t_a: f64,
    t_b: f64,
    out: *mut *mut FdProfile,
) -> FdStatus {
    new_profile(out, || {
        let profile = FrequencyProfile::constant(omega, Interval::new(t_a, t_b)?)?;
        Ok(FdProfile { profile, zero_mode: None })
    })
}

/// `Ω² = omega²(1 + eps·sin(nu·t))` on `[t_a, t_b]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fd_profile_modulated(
    omega: f64,
    eps: f64,
    nu: f64,
    t_a: f64,
    t_b: f64,
    out: *mut *mut FdProfile,
) -> FdStatus {
    new_profile(out, || {
        let profile = FrequencyProfile::modulated(omega, eps, nu, Interval::new(t_a, t_b)?)?;
        Ok(FdProfile { profile, zero_mode: None })
    })
}

/// Profile from a JSON description such as `{"kind":"constant","omega":1.0}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fd_profile_from_json(
    json: *const c_char,
    t_a: f64,
    t_b: f64,
    out: *mut *mut FdProfile,
) -> FdStatus {
    new_profile(out, || {
        let cfg = ProfileConfig::from_json(text(json, "json")?)
            .map_err(|e| Failure::Status(FdStatus::InvalidArgument, format!("invalid profile: {e}")))?;
        let iv = Interval::new(t_a, t_b)?;
        let zero_mode = cfg.zero_mode_spec(iv).transpose()?;
        Ok(FdProfile { profile: cfg.build(iv)?, zero_mode })
    })
}

/// Profile `Ω² = −ξ̈/ξ` built from a named zero-mode shape (e.g. `"sinpi"`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fd_profile_synthetic(
    name: *const c_char,
    t_a: f64,
    t_b: f64,
    out: *mut *mut FdProfile,
) -> FdStatus {
    new_profile(out, || {
        let spec = SyntheticZeroModeSpec::builtin(text(name, "name")?, Interval::new(t_a, t_b)?)?;
        let profile = FrequencyProfile::zero_mode(&spec)?;
        Ok(FdProfile { profile, zero_mode: Some(spec) })
    })
}

/// # Safety
/// `p` must come from an `fd_profile_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fd_profile_free(p: *mut FdProfile) {
    if !p.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(p))));
    }
}

/// Determinant and ratio. For a degenerate operator the call succeeds with
/// `degenerate` set.
///
/// # Safety
/// `p` must be a live profile handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fd_det(
    p: *const FdProfile,
    bc: FdBoundary,
    omega0: f64,
    out: *mut FdDetResult,
) -> FdStatus {
    guard(|| {
        let p = profile_ref(p)?;
        let d = determinant(&p.profile, boundary(bc)?, omega0)?;
        let r = FdDetResult {
            value: d.value,
            ratio: d.ratio,
            wronskian: d.diagnostics.wronskian,
            endpoint_det: d.diagnostics.endpoint_det,
            monodromy_trace: d.diagnostics.monodromy_trace,
            degenerate: d.degenerate as i32,
        };
        put(out, r, "out")
    })
}

/// Regularized Dirichlet determinant `⟨ξ|ξ⟩/(ξ̇_a ξ̇_b)` of an operator with a
/// zero mode.
///
/// # Safety
/// `p` must be a live profile handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fd_det_regularized(p: *const FdProfile, out: *mut f64) -> FdStatus {
    guard(|| {
        let p = profile_ref(p)?;
        let r = match &p.zero_mode {
            Some(spec) => det_dirichlet_regularized_spec(spec)?,
            None => det_dirichlet_regularized(&p.profile)?,
        };
        put(out, r.det_regularized, "out")
    })
}

/// # Safety
/// `p` must be a live profile handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fd_green_new(
    p: *const FdProfile,
    bc: FdBoundary,
    out: *mut *mut FdGreen,
) -> FdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let p = profile_ref(p)?;
        let basis = make_basis(&p.profile, 1.0, BasisConvention::Canonical)?;
        let k = kernel(&basis, boundary(bc)?)?;
        out.write(Box::into_raw(Box::new(FdGreen { kernel: k })));
        Ok(())
    })
}

/// `G(t, t′)`; the diagonal uses the average of the one-sided limits.
///
/// # Safety
/// `g` must be a live Green handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fd_green_eval(g: *const FdGreen, t: f64, t_prime: f64, out: *mut f64) -> FdStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("green"))?;
        let iv = g.kernel.basis().interval;
        if !(iv.contains(t) && iv.contains(t_prime)) {
            return Err(Failure::Status(
                FdStatus::InvalidArgument,
                format!("({t}, {t_prime}) lies outside [{}, {}]", iv.t_a, iv.t_b),
            ));
        }
        put(out, g.kernel.evaluate(t, t_prime), "out")
    })
}

/// # Safety
/// `g` must come from `fd_green_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fd_green_free(g: *mut FdGreen) {
    if !g.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(g))));
    }
}

/// Finite-difference ratio on `n` lattice points.
///
/// # Safety
/// `p` must be a live profile handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fd_lattice_ratio(
    p: *const FdProfile,
    bc: FdBoundary,
    omega0: f64,
    n: usize,
    out: *mut f64,
) -> FdStatus {
    guard(|| {
        let p = profile_ref(p)?;
        put(out, lattice_ratio(&p.profile, boundary(bc)?, omega0, n)?, "out")
    })
}

/// Ratio from the coupling-constant flow with `g_steps` Gauss nodes.
///
/// # Safety
/// `p` must be a live profile handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fd_gflow_ratio(
    p: *const FdProfile,
    bc: FdBoundary,
    omega0: f64,
    g_steps: usize,
    out: *mut f64,
) -> FdStatus {
    guard(|| {
        let p = profile_ref(p)?;
        put(out, gflow_ratio(&p.profile, boundary(bc)?, omega0, g_steps)?, "out")
    })
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`). Returns the full length including
/// the terminator, so a call with `len = 0` sizes the buffer.
///
/// # Safety
/// `buf` must be valid for `len` bytes of writes, or null when `len` is 0.
#[no_mangle]
pub unsafe extern "C" fn fd_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

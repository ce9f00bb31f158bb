//! C ABI over `vein_core`.
//!
//! Bodies live behind an opaque `VeinBody` handle created from a JSON body
//! description and released with `vein_body_free`. Every fallible function
//! returns a `VeinStatus`; on failure `vein_last_error` describes the cause
//! for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vein_core::certify::sandwich;
use vein_core::mvee::VolumeOptions;
use vein_core::search::{known_witness, vein_upper, SearchConfig, SearchResult};
use vein_core::transfer::hadamard_witness;
use vein_core::{Body, BodySpec, VeinError};

/// Opaque body handle.
pub struct VeinBody {
    body: Body,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VeinStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidBody = 4,
    DimensionMismatch = 5,
    NonFinite = 6,
    Domain = 7,
    Numerical = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &VeinError) -> VeinStatus {
    match e {
        VeinError::InvalidBody(_) | VeinError::RankDeficient { .. } | VeinError::OriginNotInterior { .. } => {
            VeinStatus::InvalidBody
        }
        VeinError::DimensionMismatch { .. } => VeinStatus::DimensionMismatch,
        VeinError::NonFinite => VeinStatus::NonFinite,
        VeinError::Domain(_) | VeinError::InfeasibleVertexCount { .. } | VeinError::Unsupported(_) => {
            VeinStatus::Domain
        }
        _ => VeinStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (VeinStatus, String)>) -> VeinStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VeinStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            VeinStatus::Panic
        }
    }
}

fn core(e: VeinError) -> (VeinStatus, String) {
    (status_of(&e), e.to_string())
}

fn null() -> (VeinStatus, String) {
    (VeinStatus::NullPointer, "null pointer argument".into())
}

unsafe fn body_ref<'a>(h: *const VeinBody) -> Result<&'a VeinBody, (VeinStatus, String)> {
    h.as_ref().ok_or_else(null)
}

unsafe fn slice<'a>(p: *const f64, len: usize) -> Result<&'a [f64], (VeinStatus, String)> {
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), (VeinStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

/// Parses a JSON body description into a new handle stored in `*out`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vein_body_from_json(json: *const c_char, out: *mut *mut VeinBody) -> VeinStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(null());
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (VeinStatus::InvalidUtf8, e.to_string()))?;
        let spec: BodySpec = serde_json::from_str(text).map_err(|e| (VeinStatus::ParseError, e.to_string()))?;
        let body = Body::new(spec).map_err(core)?;
        out.write(Box::into_raw(Box::new(VeinBody { body })));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `body` must come from `vein_body_from_json` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn vein_body_free(body: *mut VeinBody) {
    if !body.is_null() {
        drop(Box::from_raw(body));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vein_body_dim(body: *const VeinBody, out: *mut usize) -> VeinStatus {
    guard(|| write(out, body_ref(body)?.body.dim()))
}

/// Gauge `‖x‖_K` of a point of length `len`.
///
/// # Safety
/// `x` must point to `len` doubles; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vein_gauge(body: *const VeinBody, x: *const f64, len: usize, out: *mut f64) -> VeinStatus {
    guard(|| {
        let v = body_ref(body)?.body.gauge(slice(x, len)?).map_err(core)?;
        write(out, v)
    })
}

/// Support function `h_K(u)`.
///
/// # Safety
/// `u` must point to `len` doubles; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vein_support(body: *const VeinBody, u: *const f64, len: usize, out: *mut f64) -> VeinStatus {
    guard(|| {
        let v = body_ref(body)?.body.support(slice(u, len)?).map_err(core)?;
        write(out, v)
    })
}

unsafe fn write_points(
    r: &SearchResult,
    points: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> Result<(), (VeinStatus, String)> {
    let flat: Vec<f64> = r.best_points.iter().flatten().copied().collect();
    write(out_len, flat.len())?;
    if points.is_null() {
        return Ok(());
    }
    if capacity < flat.len() {
        return Err((
            VeinStatus::BufferTooSmall,
            format!("need {} doubles, have {capacity}", flat.len()),
        ));
    }
    ptr::copy_nonoverlapping(flat.as_ptr(), points, flat.len());
    Ok(())
}

/// Best closed-form enclosing point set. Points are written row-major into
/// `points` (may be null to query the length through `out_len`).
///
/// # Safety
/// `points` must hold `capacity` doubles when non-null; other pointers must
/// be valid.
#[no_mangle]
pub unsafe extern "C" fn vein_known_witness(
    body: *const VeinBody,
    out_objective: *mut f64,
    points: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> VeinStatus {
    guard(|| {
        let r = known_witness(body_ref(body)?.body.spec()).map_err(core)?;
        write_points(&r, points, capacity, out_len)?;
        write(out_objective, r.objective)
    })
}

/// Upper bound from the witness and searches over `n_min..=n_max` vertices.
///
/// # Safety
/// As for `vein_known_witness`.
#[no_mangle]
pub unsafe extern "C" fn vein_search(
    body: *const VeinBody,
    n_min: usize,
    n_max: usize,
    restarts: usize,
    seed: u64,
    out_objective: *mut f64,
    points: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> VeinStatus {
    guard(|| {
        let cfg = SearchConfig {
            restarts,
            seed,
            ..SearchConfig::new(n_min)
        };
        let r = vein_upper(body_ref(body)?.body.spec(), (n_min, n_max), &cfg).map_err(core)?;
        write_points(&r, points, capacity, out_len)?;
        write(out_objective, r.objective)
    })
}

/// Best lower certificate and best constructive upper bound.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vein_bounds(
    body: *const VeinBody,
    seed: u64,
    out_lower: *mut f64,
    out_upper: *mut f64,
) -> VeinStatus {
    guard(|| {
        let opts = VolumeOptions {
            seed,
            ..VolumeOptions::default()
        };
        let s = sandwich(body_ref(body)?.body.spec(), &opts).map_err(core)?;
        write(out_lower, s.lower_max)?;
        write(out_upper, s.upper_min)
    })
}

/// Certified ratio `√d` of the Sylvester–Hadamard witness for `d = 2^m`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn vein_hadamard_ratio(m: u32, out: *mut f64) -> VeinStatus {
    guard(|| {
        let w = hadamard_witness(m).map_err(core)?;
        write(out, w.ratio)
    })
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn vein_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version, NUL-terminated and static.
#[no_mangle]
pub extern "C" fn vein_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

//! C interface to `funk-core`.
//!
//! Bodies are opaque handles built from the JSON body document. Every
//! fallible call returns a [`FunkStatus`]; on failure the message is kept per
//! thread and can be read with [`funk_last_error`]. Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use funk_core::body::BodyDocument;
use funk_core::funk::{backward_sphere, forward_sphere};
use funk_core::gauge::minkowski_gauge;
use funk_core::{ConvexBody, Error, Point, RadialResult};

/// Opaque body handle.
pub struct FunkBody {
    body: ConvexBody,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidBody = 3,
    DimensionMismatch = 4,
    PointOutside = 5,
    InvalidArgument = 6,
    BufferTooSmall = 7,
    Numerical = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunkSide {
    Forward = 0,
    Backward = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).expect("interior nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

fn fail(status: FunkStatus, message: impl Into<String>) -> FunkStatus {
    set_error(message.into());
    status
}

fn from_error(e: Error) -> FunkStatus {
    let status = match e {
        Error::DimensionMismatch { .. } => FunkStatus::DimensionMismatch,
        Error::PointOutside | Error::PathExitsBody => FunkStatus::PointOutside,
        Error::InvalidBody(_) | Error::DependentFrame => FunkStatus::InvalidBody,
        Error::Numerical(_) => FunkStatus::Numerical,
        _ => FunkStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> FunkStatus) -> FunkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == FunkStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            status
        }
        Err(_) => fail(FunkStatus::Panic, "internal panic"),
    }
}

/// # Safety
/// `data` must be null or point to `len` readable doubles.
unsafe fn read_point(data: *const f64, len: usize, name: &str) -> Result<Point, FunkStatus> {
    if data.is_null() {
        return Err(fail(FunkStatus::NullPointer, format!("{name} is null")));
    }
    Ok(Point::from_column_slice(slice::from_raw_parts(data, len)))
}

/// # Safety
/// `body` must be null or a handle from [`funk_body_from_json`] not yet freed.
unsafe fn body_ref<'a>(body: *const FunkBody) -> Result<&'a FunkBody, FunkStatus> {
    body.as_ref().ok_or_else(|| fail(FunkStatus::NullPointer, "body handle is null"))
}

fn status_of(r: Result<(), FunkStatus>) -> FunkStatus {
    r.err().unwrap_or(FunkStatus::Ok)
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn funk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a body from a nul-terminated JSON document.
///
/// # Safety
/// `json` must be a valid C string and `out` a writable pointer. The handle
/// written to `out` must be released with [`funk_body_free`].
#[no_mangle]
pub unsafe extern "C" fn funk_body_from_json(json: *const c_char, out: *mut *mut FunkBody) -> FunkStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(FunkStatus::NullPointer, "json or out is null");
        }
        *out = ptr::null_mut();
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(FunkStatus::InvalidUtf8, "body document is not UTF-8");
        };
        match BodyDocument::from_json(text).and_then(|d| d.build()) {
            Ok(body) => {
                *out = Box::into_raw(Box::new(FunkBody { body }));
                FunkStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `body` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn funk_body_free(body: *mut FunkBody) {
    if !body.is_null() {
        drop(Box::from_raw(body));
    }
}

/// Ambient dimension, or 0 for a null handle.
///
/// # Safety
/// `body` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn funk_body_dimension(body: *const FunkBody) -> usize {
    body.as_ref().map_or(0, |b| b.body.dimension())
}

/// # Safety
/// `p` must point to `n` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn funk_body_contains(body: *const FunkBody, p: *const f64, n: usize, out: *mut bool) -> FunkStatus {
    guard(|| {
        status_of((|| {
            let b = body_ref(body)?;
            let p = read_point(p, n, "p")?;
            if out.is_null() {
                return Err(fail(FunkStatus::NullPointer, "out is null"));
            }
            *out = b.body.contains(&p).map_err(from_error)?;
            Ok(())
        })())
    })
}

/// Exit parameter of `x + tξ`; `INFINITY` when the ray stays inside.
///
/// # Safety
/// `x` and `xi` must point to `n` doubles and `t_out` be writable.
#[no_mangle]
pub unsafe extern "C" fn funk_ray_boundary(
    body: *const FunkBody,
    x: *const f64,
    xi: *const f64,
    n: usize,
    t_out: *mut f64,
) -> FunkStatus {
    guard(|| {
        status_of((|| {
            let b = body_ref(body)?;
            let (x, xi) = (read_point(x, n, "x")?, read_point(xi, n, "xi")?);
            if t_out.is_null() {
                return Err(fail(FunkStatus::NullPointer, "t_out is null"));
            }
            *t_out = match b.body.ray_boundary(&x, &xi).map_err(from_error)? {
                RadialResult::Hit(t) => t,
                RadialResult::Contained => f64::INFINITY,
            };
            Ok(())
        })())
    })
}

/// Minkowski gauge of `ξ` at `x`.
///
/// # Safety
/// `x` and `xi` must point to `n` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn funk_gauge(
    body: *const FunkBody,
    x: *const f64,
    xi: *const f64,
    n: usize,
    out: *mut f64,
) -> FunkStatus {
    guard(|| {
        status_of((|| {
            let b = body_ref(body)?;
            let (x, xi) = (read_point(x, n, "x")?, read_point(xi, n, "xi")?);
            if out.is_null() {
                return Err(fail(FunkStatus::NullPointer, "out is null"));
            }
            *out = minkowski_gauge(&b.body, &x, &xi).map_err(from_error)?;
            Ok(())
        })())
    })
}

/// Funk distance `F(x, y)`.
///
/// # Safety
/// `x` and `y` must point to `n` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn funk_distance(
    body: *const FunkBody,
    x: *const f64,
    y: *const f64,
    n: usize,
    out: *mut f64,
) -> FunkStatus {
    guard(|| {
        status_of((|| {
            let b = body_ref(body)?;
            let (x, y) = (read_point(x, n, "x")?, read_point(y, n, "y")?);
            if out.is_null() {
                return Err(fail(FunkStatus::NullPointer, "out is null"));
            }
            *out = funk_core::funk::funk(&b.body, &x, &y).map_err(from_error)?;
            Ok(())
        })())
    })
}

/// Samples a sphere of radius `delta` about `x` into `buffer`, row-major with
/// `n` doubles per point.
///
/// `points_out` receives the number of points produced. If `buffer_len` is
/// too small nothing is copied, `points_out` still holds the required count
/// and the call returns `BufferTooSmall`.
///
/// # Safety
/// `x` must point to `n` doubles, `buffer` to `buffer_len` writable doubles
/// (it may be null when `buffer_len` is 0), `points_out` and `truncated_out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn funk_sphere(
    body: *const FunkBody,
    x: *const f64,
    n: usize,
    delta: f64,
    side: FunkSide,
    dirs: usize,
    buffer: *mut f64,
    buffer_len: usize,
    points_out: *mut usize,
    truncated_out: *mut bool,
) -> FunkStatus {
    guard(|| {
        status_of((|| {
            let b = body_ref(body)?;
            let x = read_point(x, n, "x")?;
            if points_out.is_null() || truncated_out.is_null() {
                return Err(fail(FunkStatus::NullPointer, "points_out or truncated_out is null"));
            }
            let sample = match side {
                FunkSide::Forward => forward_sphere(&b.body, &x, delta, dirs),
                FunkSide::Backward => backward_sphere(&b.body, &x, delta, dirs),
            }
            .map_err(from_error)?;
            *points_out = sample.points.len();
            *truncated_out = sample.truncated;
            let needed = sample.points.len() * n;
            if needed > buffer_len {
                return Err(fail(FunkStatus::BufferTooSmall, format!("buffer holds {buffer_len} doubles, {needed} needed")));
            }
            if needed > 0 {
                if buffer.is_null() {
                    return Err(fail(FunkStatus::NullPointer, "buffer is null"));
                }
                let dest = slice::from_raw_parts_mut(buffer, needed);
                for (chunk, p) in dest.chunks_exact_mut(n).zip(&sample.points) {
                    chunk.copy_from_slice(p);
                }
            }
            Ok(())
        })())
    })
}

/// Version string of the library, static.
#[no_mangle]
pub extern "C" fn funk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

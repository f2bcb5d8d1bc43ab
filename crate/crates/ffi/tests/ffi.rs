use std::ffi::{CStr, CString};
use std::ptr;

use funk_ffi::*;

const DISK: &str = r#"{"dimension": 2, "body": {"type": "ball", "center": [0, 0], "radius": 1}}"#;
const SQUARE: &str = r#"{"dimension": 2, "body": {"type": "hpolytope", "witness": [0.5, 0.5], "facets": [
  {"normal": [1, 0], "offset": 1}, {"normal": [-1, 0], "offset": 0},
  {"normal": [0, 1], "offset": 1}, {"normal": [0, -1], "offset": 0}]}}"#;

struct Handle(*mut FunkBody);

impl Handle {
    fn new(json: &str) -> Self {
        let text = CString::new(json).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { funk_body_from_json(text.as_ptr(), &mut out) }, FunkStatus::Ok);
        assert!(!out.is_null());
        Handle(out)
    }
}

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { funk_body_free(self.0) };
    }
}

fn last_error() -> String {
    let p = funk_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn distance_and_gauge_on_the_disk() {
    let disk = Handle::new(DISK);
    assert_eq!(unsafe { funk_body_dimension(disk.0) }, 2);
    let (x, y) = ([0.0, 0.0], [0.5, 0.0]);
    let mut f = 0.0;
    assert_eq!(unsafe { funk_distance(disk.0, x.as_ptr(), y.as_ptr(), 2, &mut f) }, FunkStatus::Ok);
    assert!((f - std::f64::consts::LN_2).abs() < 1e-15);
    assert_eq!(unsafe { funk_distance(disk.0, y.as_ptr(), x.as_ptr(), 2, &mut f) }, FunkStatus::Ok);
    assert!((f - 1.5f64.ln()).abs() < 1e-15);

    let (at, dir) = ([0.5, 0.0], [1.0, 0.0]);
    let mut g = 0.0;
    assert_eq!(unsafe { funk_gauge(disk.0, at.as_ptr(), dir.as_ptr(), 2, &mut g) }, FunkStatus::Ok);
    assert!((g - 2.0).abs() < 1e-15);
    assert!(funk_last_error().is_null());
}

#[test]
fn membership_and_rays() {
    let square = Handle::new(SQUARE);
    let mut inside = false;
    let p = [0.5, 0.5];
    assert_eq!(unsafe { funk_body_contains(square.0, p.as_ptr(), 2, &mut inside) }, FunkStatus::Ok);
    assert!(inside);
    let q = [1.0, 0.5];
    assert_eq!(unsafe { funk_body_contains(square.0, q.as_ptr(), 2, &mut inside) }, FunkStatus::Ok);
    assert!(!inside);

    let mut t = 0.0;
    let dir = [1.0, 0.0];
    assert_eq!(unsafe { funk_ray_boundary(square.0, p.as_ptr(), dir.as_ptr(), 2, &mut t) }, FunkStatus::Ok);
    assert_eq!(t, 0.5);

    let half = Handle::new(r#"{"dimension": 2, "body": {"type": "halfspace", "normal": [0, -1], "offset": 0}}"#);
    let (x, up) = ([0.0, 1.0], [0.0, 1.0]);
    assert_eq!(unsafe { funk_ray_boundary(half.0, x.as_ptr(), up.as_ptr(), 2, &mut t) }, FunkStatus::Ok);
    assert_eq!(t, f64::INFINITY);
}

#[test]
fn sphere_fills_the_caller_buffer() {
    let disk = Handle::new(DISK);
    let x = [0.0, 0.0];
    let (mut count, mut truncated) = (0usize, true);
    let status = unsafe {
        funk_sphere(disk.0, x.as_ptr(), 2, std::f64::consts::LN_2, FunkSide::Forward, 36, ptr::null_mut(), 0, &mut count, &mut truncated)
    };
    assert_eq!(status, FunkStatus::BufferTooSmall);
    assert_eq!(count, 36);
    assert!(last_error().contains("72 needed"));

    let mut buf = vec![0.0; 2 * count];
    let status = unsafe {
        funk_sphere(disk.0, x.as_ptr(), 2, std::f64::consts::LN_2, FunkSide::Forward, 36, buf.as_mut_ptr(), buf.len(), &mut count, &mut truncated)
    };
    assert_eq!(status, FunkStatus::Ok);
    assert!(!truncated);
    for p in buf.chunks_exact(2) {
        assert!((p[0].hypot(p[1]) - 0.5).abs() < 1e-12);
    }

    let off = [0.5, 0.0];
    let mut buf = vec![0.0; 8];
    let status = unsafe {
        funk_sphere(disk.0, off.as_ptr(), 2, std::f64::consts::LN_2, FunkSide::Backward, 4, buf.as_mut_ptr(), buf.len(), &mut count, &mut truncated)
    };
    assert_eq!(status, FunkStatus::Ok);
    assert!(truncated && count < 4);
}

#[test]
fn errors_are_reported_with_codes_and_messages() {
    let bad = CString::new(r#"{"dimension": 2, "body": {"type": "ball", "center": [0, 0], "radius": 0}}"#).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { funk_body_from_json(bad.as_ptr(), &mut out) }, FunkStatus::InvalidBody);
    assert!(out.is_null());
    assert!(!last_error().is_empty());

    let garbage = CString::new("{not json").unwrap();
    assert_eq!(unsafe { funk_body_from_json(garbage.as_ptr(), &mut out) }, FunkStatus::InvalidBody);
    assert_eq!(unsafe { funk_body_from_json(ptr::null(), &mut out) }, FunkStatus::NullPointer);

    let disk = Handle::new(DISK);
    let (x, y) = ([0.0, 0.0], [2.0, 0.0]);
    let mut f = 0.0;
    assert_eq!(unsafe { funk_distance(disk.0, x.as_ptr(), y.as_ptr(), 2, &mut f) }, FunkStatus::PointOutside);
    assert_eq!(unsafe { funk_distance(disk.0, x.as_ptr(), y.as_ptr(), 1, &mut f) }, FunkStatus::DimensionMismatch);
    assert_eq!(unsafe { funk_distance(ptr::null(), x.as_ptr(), y.as_ptr(), 2, &mut f) }, FunkStatus::NullPointer);
    assert_eq!(unsafe { funk_distance(disk.0, ptr::null(), y.as_ptr(), 2, &mut f) }, FunkStatus::NullPointer);
    let zero = [0.0, 0.0];
    let mut t = 0.0;
    assert_eq!(unsafe { funk_ray_boundary(disk.0, x.as_ptr(), zero.as_ptr(), 2, &mut t) }, FunkStatus::InvalidArgument);
    let mut n = 0;
    let mut tr = false;
    assert_eq!(
        unsafe { funk_sphere(disk.0, x.as_ptr(), 2, -1.0, FunkSide::Forward, 8, ptr::null_mut(), 0, &mut n, &mut tr) },
        FunkStatus::InvalidArgument
    );
    unsafe { funk_body_free(ptr::null_mut()) };
    assert_eq!(unsafe { funk_body_dimension(ptr::null()) }, 0);
}

#[test]
fn errors_are_per_thread() {
    let disk = Handle::new(DISK);
    let (x, y) = ([0.0, 0.0], [2.0, 0.0]);
    let mut f = 0.0;
    assert_eq!(unsafe { funk_distance(disk.0, x.as_ptr(), y.as_ptr(), 2, &mut f) }, FunkStatus::PointOutside);
    std::thread::spawn(|| assert!(funk_last_error().is_null())).join().unwrap();
    assert!(!funk_last_error().is_null());
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(funk_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

//! C ABI over `sobolev_lab`.
//!
//! Every fallible call returns an [`SlStatus`] and writes results through out
//! pointers. On failure the message is kept per thread and read back with
//! [`sl_last_error_message`]. Handles are opaque and released with their
//! `_free` function; passing NULL to a `_free` function is a no-op.
//!
//! Points and vectors are flat `double` arrays of the manifold's ambient
//! dimension. Map values are stored node-major.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::slice;

use sobolev_lab::bundle_metrics::{lambda_metric, Lambda};
use sobolev_lab::manifolds::ManifoldModel;
use sobolev_lab::sobolev::io::{load_csv, save_csv};
use sobolev_lab::sobolev::{measure_distance, sobolev_distance, sobolev_energy, DistanceKind, Grid, SampledMap};
use sobolev_lab::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotTangent = 3,
    NotOnManifold = 4,
    OutOfDomain = 5,
    Singularity = 6,
    Resolution = 7,
    DimensionMismatch = 8,
    Contract = 9,
    DegenerateMetric = 10,
    GridMismatch = 11,
    Parse = 12,
    Io = 13,
    Panic = 14,
}

/// Distance selector for [`sl_map_distance`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlDistanceKind {
    Sasaki = 0,
    CheegerGromoll = 1,
    Iota = 2,
    Chiron = 3,
    Dot = 4,
}

/// Opaque Riemannian model.
pub struct SlManifold(ManifoldModel);

/// Opaque sampled map between manifolds.
pub struct SlMap(SampledMap);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(SlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::NotTangent { .. } => SlStatus::NotTangent,
            Error::NotOnManifold(_) => SlStatus::NotOnManifold,
            Error::OutOfDomain(_) => SlStatus::OutOfDomain,
            Error::Singularity => SlStatus::Singularity,
            Error::Resolution { .. } => SlStatus::Resolution,
            Error::DimensionMismatch { .. } => SlStatus::DimensionMismatch,
            Error::Contract(_) => SlStatus::Contract,
            Error::DegenerateMetric => SlStatus::DegenerateMetric,
            Error::GridMismatch(_) => SlStatus::GridMismatch,
            Error::Parse { .. } => SlStatus::Parse,
            Error::Io(_) => SlStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SlStatus::NullPointer, format!("{what} is NULL"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(SlStatus::InvalidArgument, msg.into())
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SlStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            SlStatus::Panic
        }
    }
}

unsafe fn manifold<'a>(m: *const SlManifold) -> Result<&'a ManifoldModel, Failure> {
    m.as_ref().map(|m| &m.0).ok_or_else(|| null("manifold"))
}

unsafe fn map<'a>(u: *const SlMap, what: &str) -> Result<&'a SampledMap, Failure> {
    u.as_ref().map(|u| &u.0).ok_or_else(|| null(what))
}

unsafe fn vector(ptr: *const f64, len: usize, what: &str) -> Result<nalgebra::DVector<f64>, Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(nalgebra::DVector::from_column_slice(slice::from_raw_parts(ptr, len)))
}

unsafe fn write_vector(out: *mut f64, v: &nalgebra::DVector<f64>) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output buffer"));
    }
    slice::from_raw_parts_mut(out, v.len()).copy_from_slice(v.as_slice());
    Ok(())
}

unsafe fn out_ref<'a, T>(out: *mut T) -> Result<&'a mut T, Failure> {
    out.as_mut().ok_or_else(|| null("output pointer"))
}

unsafe fn string(s: *const c_char, what: &str) -> Result<String, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map(str::to_owned).map_err(|_| invalid(format!("{what} is not UTF-8")))
}

/// Message of the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call into this library.
#[no_mangle]
pub extern "C" fn sl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a manifold from a description such as `sphere(2)`, `circle`,
/// `euclidean(3)`, `interval(0,1)`, `rectangle(0,1,0,2)` or `disk(1.5)`.
///
/// # Safety
/// `description` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_manifold_parse(description: *const c_char, out: *mut *mut SlManifold) -> SlStatus {
    guard(|| {
        let out = out_ref(out)?;
        let m: ManifoldModel = string(description, "description")?.parse()?;
        *out = Box::into_raw(Box::new(SlManifold(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must come from [`sl_manifold_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sl_manifold_free(m: *mut SlManifold) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Length of the coordinate arrays for points of `m`; 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sl_manifold_ambient_dim(m: *const SlManifold) -> usize {
    m.as_ref().map_or(0, |m| m.0.ambient_dim())
}

/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sl_manifold_intrinsic_dim(m: *const SlManifold) -> usize {
    m.as_ref().map_or(0, |m| m.0.intrinsic_dim())
}

/// exp_x(v), written to `out`. All arrays have the ambient dimension.
///
/// # Safety
/// Pointers must be valid for `sl_manifold_ambient_dim(m)` doubles.
#[no_mangle]
pub unsafe extern "C" fn sl_manifold_exp(m: *const SlManifold, x: *const f64, v: *const f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let m = manifold(m)?;
        let n = m.ambient_dim();
        let y = m.exp_map(&vector(x, n, "x")?, &vector(v, n, "v")?)?;
        write_vector(out, &y)
    })
}

/// log_x(y), written to `out`.
///
/// # Safety
/// Pointers must be valid for `sl_manifold_ambient_dim(m)` doubles.
#[no_mangle]
pub unsafe extern "C" fn sl_manifold_log(m: *const SlManifold, x: *const f64, y: *const f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let m = manifold(m)?;
        let n = m.ambient_dim();
        let v = m.log_map(&vector(x, n, "x")?, &vector(y, n, "y")?)?;
        write_vector(out, &v)
    })
}

/// Geodesic distance between two points of `m`.
///
/// # Safety
/// `x`, `y` must be valid for `sl_manifold_ambient_dim(m)` doubles.
#[no_mangle]
pub unsafe extern "C" fn sl_manifold_distance(m: *const SlManifold, x: *const f64, y: *const f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let m = manifold(m)?;
        let n = m.ambient_dim();
        let (x, y) = (vector(x, n, "x")?, vector(y, n, "y")?);
        m.check_point(&x)?;
        m.check_point(&y)?;
        *out_ref(out)? = m.geodesic_distance(&x, &y);
        Ok(())
    })
}

/// Parallel transport of v ∈ T_xN to T_yN along the minimizing geodesic.
///
/// # Safety
/// Pointers must be valid for `sl_manifold_ambient_dim(m)` doubles.
#[no_mangle]
pub unsafe extern "C" fn sl_manifold_transport(
    m: *const SlManifold,
    x: *const f64,
    y: *const f64,
    v: *const f64,
    out: *mut f64,
) -> SlStatus {
    guard(|| {
        let m = manifold(m)?;
        let n = m.ambient_dim();
        let w = m.parallel_transport(&vector(x, n, "x")?, &vector(y, n, "y")?, &vector(v, n, "v")?)?;
        write_vector(out, &w)
    })
}

/// G^λ of a tangent vector given through its invariants: the horizontal
/// square norm and the fiber products ⟨k,k⟩, ⟨k,e⟩, ⟨e,e⟩.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_lambda_metric(
    lambda: f64,
    horizontal: f64,
    kk: f64,
    ke: f64,
    ee: f64,
    out: *mut f64,
) -> SlStatus {
    guard(|| {
        let value = lambda_metric(Lambda::new(lambda)?, horizontal, kk, ke, ee)?;
        *out_ref(out)? = value;
        Ok(())
    })
}

/// Map on the interval [a, b] with `nodes` equispaced nodes into `target`.
/// `values` holds `nodes * sl_manifold_ambient_dim(target)` doubles.
///
/// # Safety
/// `values` must be valid for that many doubles; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_map_new_interval(
    a: f64,
    b: f64,
    nodes: usize,
    target: *const SlManifold,
    values: *const f64,
    out: *mut *mut SlMap,
) -> SlStatus {
    guard(|| {
        let out = out_ref(out)?;
        let target = *manifold(target)?;
        let grid = Grid::interval(a, b, nodes)?;
        let n = target.ambient_dim();
        let flat = vector(values, nodes * n, "values")?;
        let points = flat.as_slice().chunks(n).map(nalgebra::DVector::from_column_slice).collect();
        *out = Box::into_raw(Box::new(SlMap(SampledMap::new(grid, target, points)?)));
        Ok(())
    })
}

/// Reads a map written by [`sl_map_save_csv`] or the command-line tool.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_map_load_csv(path: *const c_char, out: *mut *mut SlMap) -> SlStatus {
    guard(|| {
        let out = out_ref(out)?;
        let u = load_csv(PathBuf::from(string(path, "path")?))?;
        *out = Box::into_raw(Box::new(SlMap(u)));
        Ok(())
    })
}

/// # Safety
/// `u` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sl_map_save_csv(u: *const SlMap, path: *const c_char) -> SlStatus {
    guard(|| {
        save_csv(map(u, "map")?, PathBuf::from(string(path, "path")?))?;
        Ok(())
    })
}

/// # Safety
/// `u` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sl_map_free(u: *mut SlMap) {
    if !u.is_null() {
        drop(Box::from_raw(u));
    }
}

/// Number of grid nodes; 0 for NULL.
///
/// # Safety
/// `u` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sl_map_len(u: *const SlMap) -> usize {
    u.as_ref().map_or(0, |u| u.0.len())
}

/// E_p(u) = ∫|du|^p.
///
/// # Safety
/// `u` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_map_energy(u: *const SlMap, p: f64, out: *mut f64) -> SlStatus {
    guard(|| {
        *out_ref(out)? = sobolev_energy(map(u, "map")?, p)?;
        Ok(())
    })
}

/// Sobolev distance of the chosen kind. `is_upper_bound` (optional) is set
/// to 1 when the value is a competitor length rather than the distance.
///
/// # Safety
/// `u`, `v` must be live handles; `out` valid; `is_upper_bound` NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn sl_map_distance(
    u: *const SlMap,
    v: *const SlMap,
    kind: SlDistanceKind,
    p: f64,
    out: *mut f64,
    is_upper_bound: *mut i32,
) -> SlStatus {
    guard(|| {
        let kind = match kind {
            SlDistanceKind::Sasaki => DistanceKind::Sasaki,
            SlDistanceKind::CheegerGromoll => DistanceKind::CheegerGromoll,
            SlDistanceKind::Iota => DistanceKind::Iota,
            SlDistanceKind::Chiron => DistanceKind::Chiron,
            SlDistanceKind::Dot => DistanceKind::Dot,
        };
        let d = sobolev_distance(map(u, "u")?, map(v, "v")?, kind, p)?;
        *out_ref(out)? = d.value;
        if let Some(flag) = is_upper_bound.as_mut() {
            *flag = i32::from(d.is_upper_bound);
        }
        Ok(())
    })
}

/// ∫ d(u, v) / (1 + d(u, v)).
///
/// # Safety
/// `u`, `v` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_map_measure_distance(u: *const SlMap, v: *const SlMap, out: *mut f64) -> SlStatus {
    guard(|| {
        *out_ref(out)? = measure_distance(map(u, "u")?, map(v, "v")?)?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_error_variant_has_a_status() {
        let cases = [
            (Error::Singularity, SlStatus::Singularity),
            (Error::Resolution { node: 3 }, SlStatus::Resolution),
            (Error::Io("x".into()), SlStatus::Io),
            (Error::Parse { line: 2, message: "m".into() }, SlStatus::Parse),
        ];
        for (e, s) in cases {
            assert_eq!(Failure::from(e).0, s);
        }
    }

    #[test]
    fn panics_become_a_status() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, SlStatus::Panic);
        let msg = unsafe { CStr::from_ptr(sl_last_error_message()) }.to_str().unwrap();
        assert_eq!(msg, "panic: boom");
        assert_eq!(guard(|| Ok(())), SlStatus::Ok);
        assert!(sl_last_error_message().is_null());
    }
}

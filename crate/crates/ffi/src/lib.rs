//! C ABI over the tiretrack engine.
//!
//! Every entry point returns a [`TtStatus`]; on failure the message is kept
//! per thread and read back with [`tt_last_error`]. Curves and rear-track sets
//! are opaque handles released with their `_free` function. Panics are caught
//! at the boundary and reported as `TT_PANIC`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use tiretrack::bikeflow::{closed_rear_tracks, monodromy_2d, BikeConfig, ClosedRear, Stability};
use tiretrack::cli::{run, CliError, RunConfig};
use tiretrack::geom::{build_curve, CurveSpec, SampledCurve};
use tiretrack::mobius::MobiusKind;
use tiretrack::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    Io = 4,
    OutOfRange = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TtKind {
    Elliptic = 0,
    Parabolic = 1,
    Hyperbolic = 2,
    Identity = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TtStability {
    Stable = 0,
    Unstable = 1,
    Neutral = 2,
}

/// Row-major `[[m11, m12], [m21, m22]]` with unit determinant.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TtMonodromy {
    pub m: [f64; 4],
    pub trace: f64,
    pub abs_trace: f64,
    pub margin: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TtRearInfo {
    pub stability: TtStability,
    pub alpha0: f64,
    pub multiplier: f64,
    pub signed_length: f64,
    pub closure: f64,
    pub cusps: usize,
    pub maslov: i32,
    pub samples: usize,
}

/// A sampled front track.
pub struct TtCurve {
    curve: SampledCurve,
}

/// Closed rear tracks of one front.
pub struct TtRears {
    rears: Vec<ClosedRear>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TtStatus {
    match e {
        Error::InvalidSpec(_) | Error::InvalidArgument(_) | Error::OpenCurve | Error::NotPlanar(_) => {
            TtStatus::InvalidArgument
        }
        _ => TtStatus::Numerical,
    }
}

/// Run `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), (TtStatus, String)>) -> TtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TtStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            TtStatus::Panic
        }
    }
}

fn engine(e: Error) -> (TtStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (TtStatus, String) {
    (TtStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (TtStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (TtStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn bike(ell: f64, step: f64) -> BikeConfig {
    BikeConfig {
        ell,
        step: if step > 0.0 { Some(step) } else { None },
    }
}

/// Last error message on this thread, or null. Valid until the next failing
/// call on the same thread.
#[no_mangle]
pub extern "C" fn tt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Build a curve from a JSON curve spec, e.g.
/// `{"variant":"circle","radius":2}`, at `density` samples per unit length.
#[no_mangle]
pub unsafe extern "C" fn tt_curve_from_json(spec_json: *const c_char, density: usize, out: *mut *mut TtCurve) -> TtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let text = read_str(spec_json, "spec_json")?;
        let spec: CurveSpec =
            serde_json::from_str(text).map_err(|e| (TtStatus::InvalidArgument, format!("curve spec: {e}")))?;
        let curve = build_curve(&spec, density).map_err(engine)?;
        *out = Box::into_raw(Box::new(TtCurve { curve }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tt_curve_free(curve: *mut TtCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

#[no_mangle]
pub unsafe extern "C" fn tt_curve_length(curve: *const TtCurve, out: *mut f64) -> TtStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = c.curve.total_length();
        Ok(())
    })
}

/// Monodromy of a closed front. `step <= 0` selects the default step.
#[no_mangle]
pub unsafe extern "C" fn tt_monodromy(
    curve: *const TtCurve,
    ell: f64,
    step: f64,
    out: *mut TtMonodromy,
    kind: *mut TtKind,
) -> TtStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        if out.is_null() || kind.is_null() {
            return Err(null("out"));
        }
        let m = monodromy_2d(&c.curve, &bike(ell, step)).map_err(engine)?;
        let ty = m.classify();
        *out = TtMonodromy {
            m: [m.m[0][0], m.m[0][1], m.m[1][0], m.m[1][1]],
            trace: m.trace(),
            abs_trace: ty.abs_trace,
            margin: ty.margin,
        };
        *kind = match ty.kind {
            MobiusKind::Elliptic => TtKind::Elliptic,
            MobiusKind::Parabolic => TtKind::Parabolic,
            MobiusKind::Hyperbolic => TtKind::Hyperbolic,
            MobiusKind::Identity => TtKind::Identity,
        };
        Ok(())
    })
}

/// Closed rear tracks: two when hyperbolic, one when parabolic, none when
/// elliptic.
#[no_mangle]
pub unsafe extern "C" fn tt_closed_rears(curve: *const TtCurve, ell: f64, step: f64, out: *mut *mut TtRears) -> TtStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let rears = closed_rear_tracks(&c.curve, &bike(ell, step)).map_err(engine)?;
        *out = Box::into_raw(Box::new(TtRears { rears }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tt_rears_free(rears: *mut TtRears) {
    if !rears.is_null() {
        drop(Box::from_raw(rears));
    }
}

#[no_mangle]
pub unsafe extern "C" fn tt_rears_count(rears: *const TtRears) -> usize {
    rears.as_ref().map_or(0, |r| r.rears.len())
}

#[no_mangle]
pub unsafe extern "C" fn tt_rears_info(rears: *const TtRears, index: usize, out: *mut TtRearInfo) -> TtStatus {
    guard(|| {
        let r = rears.as_ref().ok_or_else(|| null("rears"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let rear = r
            .rears
            .get(index)
            .ok_or_else(|| (TtStatus::OutOfRange, format!("rear index {index} of {}", r.rears.len())))?;
        *out = TtRearInfo {
            stability: match rear.stability {
                Stability::Stable => TtStability::Stable,
                Stability::Unstable => TtStability::Unstable,
                Stability::Neutral => TtStability::Neutral,
            },
            alpha0: rear.alpha0,
            multiplier: rear.multiplier,
            signed_length: rear.wave.signed_length,
            closure: rear.closure,
            cusps: rear.wave.cusp_count(),
            maslov: rear.wave.maslov,
            samples: rear.wave.points.len(),
        };
        Ok(())
    })
}

/// Copy up to `capacity` points of rear `index` into `xy` as interleaved
/// `x, y` pairs; `written` receives the number of points copied.
#[no_mangle]
pub unsafe extern "C" fn tt_rears_points(
    rears: *const TtRears,
    index: usize,
    xy: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> TtStatus {
    guard(|| {
        let r = rears.as_ref().ok_or_else(|| null("rears"))?;
        if xy.is_null() || written.is_null() {
            return Err(null("out"));
        }
        let rear = r.rears.get(index).ok_or_else(|| (TtStatus::OutOfRange, format!("rear index {index}")))?;
        let n = rear.wave.points.len().min(capacity);
        let dst = std::slice::from_raw_parts_mut(xy, 2 * n);
        for (i, p) in rear.wave.points.iter().take(n).enumerate() {
            dst[2 * i] = p[0];
            dst[2 * i + 1] = p[1];
        }
        *written = n;
        Ok(())
    })
}

/// Run a full CLI config (JSON text) writing artifacts into `out_dir`.
#[no_mangle]
pub unsafe extern "C" fn tt_run_config(config_json: *const c_char, out_dir: *const c_char) -> TtStatus {
    guard(|| {
        let text = read_str(config_json, "config_json")?;
        let dir = read_str(out_dir, "out_dir")?;
        let cli = |e: CliError| {
            let status = match e {
                CliError::Config(_) => TtStatus::InvalidArgument,
                CliError::Io(_) => TtStatus::Io,
                CliError::Numerical(_) => TtStatus::Numerical,
            };
            (status, e.to_string())
        };
        let cfg = RunConfig::from_json(text).map_err(cli)?;
        run(&cfg, Path::new(dir)).map_err(cli)?;
        Ok(())
    })
}

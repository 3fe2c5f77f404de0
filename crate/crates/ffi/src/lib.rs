//! C interface to the contact-analogy engine.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `*_free` function. Every fallible call returns a
//! [`CaStatus`]; on failure [`ca_last_error`] describes what went wrong on
//! the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use contact_analogy::cli::{cmd_gen_suite, exit_code, match_scene, LoadedScene, MatchReport, Overrides};
use contact_analogy::curvature::{multiscale_estimate, CurvatureSign};
use contact_analogy::geometry::{extract_edges, BinaryMask, Point2};
use contact_analogy::matching::MatchConfig;
use contact_analogy::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaStatus {
    Ok = 0,
    /// No geometric match exists.
    NoCandidates = 1,
    /// Matches exist but none passed verification.
    NotVerified = 2,
    /// Unreadable or malformed input.
    Input = 3,
    /// Null pointer or out-of-range argument.
    InvalidArgument = 4,
    /// The engine panicked; the handle involved should be dropped.
    Internal = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaSign {
    Convex = 0,
    Concave = 1,
    Flat = 2,
}

/// Curvature at one contour point, from the multiscale estimator.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaCurvature {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
    pub kappa: f64,
    pub sign: CaSign,
    pub normal_x: f64,
    pub normal_y: f64,
    pub scale: f64,
}

/// Selected contact pair of a report.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaContact {
    pub tool_x: f64,
    pub tool_y: f64,
    pub object_x: f64,
    pub object_y: f64,
    pub combined: f64,
    pub rank: u32,
    pub verified: bool,
}

/// A scene file with every referenced mask and trajectory loaded.
pub struct CaScene {
    scene: LoadedScene,
    fallback_features: bool,
}

/// Result of matching a scene.
pub struct CaReport {
    report: MatchReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> CaStatus {
    match exit_code(e) {
        1 => CaStatus::NoCandidates,
        2 => CaStatus::NotVerified,
        _ => CaStatus::Input,
    }
}

/// Runs `f`, recording its error or panic for [`ca_last_error`].
fn guard(f: impl FnOnce() -> Result<(), (CaStatus, String)>) -> CaStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CaStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {message}"));
            CaStatus::Internal
        }
    }
}

fn engine(e: Error) -> (CaStatus, String) {
    (status_of(&e), e.to_string())
}

fn invalid(what: &str) -> (CaStatus, String) {
    (CaStatus::InvalidArgument, what.to_string())
}

unsafe fn path_arg(p: *const c_char, what: &str) -> Result<PathBuf, (CaStatus, String)> {
    if p.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|_| invalid(&format!("{what} is not UTF-8")))?;
    Ok(PathBuf::from(s))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn ca_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ca_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a scene file. With `fallback_features` every feature stem is
/// replaced by built-in shape descriptors.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ca_scene_load(path: *const c_char, fallback_features: bool, out: *mut *mut CaScene) -> CaStatus {
    guard(|| {
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        let path = path_arg(path, "path")?;
        let scene = LoadedScene::load(path, fallback_features).map_err(engine)?;
        *out = Box::into_raw(Box::new(CaScene { scene, fallback_features }));
        Ok(())
    })
}

/// # Safety
/// `scene` must come from [`ca_scene_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ca_scene_free(scene: *mut CaScene) {
    if !scene.is_null() {
        drop(Box::from_raw(scene));
    }
}

/// Number of targets in the scene, 0 for a null handle.
///
/// # Safety
/// `scene` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ca_scene_target_count(scene: *const CaScene) -> usize {
    scene.as_ref().map_or(0, |s| s.scene.targets.len())
}

/// Matches the scene's first target and verifies its candidates.
///
/// # Safety
/// `scene` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ca_match(scene: *const CaScene, out: *mut *mut CaReport) -> CaStatus {
    guard(|| {
        let scene = scene.as_ref().ok_or_else(|| invalid("scene is null"))?;
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        let overrides = Overrides { fallback_features: scene.fallback_features, ..Overrides::default() };
        let report = match_scene(&scene.scene, &overrides).map_err(engine)?;
        *out = Box::into_raw(Box::new(CaReport { report }));
        Ok(())
    })
}

/// # Safety
/// `report` must come from [`ca_match`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ca_report_free(report: *mut CaReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ca_report_contact(report: *const CaReport, out: *mut CaContact) -> CaStatus {
    guard(|| {
        let r = &report.as_ref().ok_or_else(|| invalid("report is null"))?.report;
        let out = out.as_mut().ok_or_else(|| invalid("out is null"))?;
        let s = &r.selection;
        *out = CaContact {
            tool_x: s.candidate.p_t_prime.x,
            tool_y: s.candidate.p_t_prime.y,
            object_x: s.candidate.p_o_prime.x,
            object_y: s.candidate.p_o_prime.y,
            combined: s.candidate.combined,
            rank: s.rank as u32,
            verified: s.verified,
        };
        Ok(())
    })
}

/// The full report as JSON. Release the string with [`ca_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ca_report_json(report: *const CaReport, out: *mut *mut c_char) -> CaStatus {
    guard(|| {
        let r = &report.as_ref().ok_or_else(|| invalid("report is null"))?.report;
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        let text = CString::new(r.to_json().to_string()).map_err(|_| invalid("report contains NUL"))?;
        *out = text.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ca_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Estimates curvature near `(x, y)` on a row-major `width × height` mask
/// where nonzero bytes are foreground. Uses the default pyramid, α and Δ.
///
/// # Safety
/// `pixels` must point to `width * height` bytes and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn ca_estimate_curvature(
    pixels: *const u8,
    width: usize,
    height: usize,
    x: f64,
    y: f64,
    out: *mut CaCurvature,
) -> CaStatus {
    guard(|| {
        if pixels.is_null() {
            return Err(invalid("pixels is null"));
        }
        let out = out.as_mut().ok_or_else(|| invalid("out is null"))?;
        let n = width.checked_mul(height).ok_or_else(|| invalid("mask size overflows"))?;
        let bits = std::slice::from_raw_parts(pixels, n).iter().map(|&b| b != 0).collect();
        let mask = BinaryMask::new(width, height, bits).map_err(engine)?;
        let edges = extract_edges(&mask).map_err(engine)?;
        let config = MatchConfig::default();
        let e =
            multiscale_estimate(&mask, &edges, Point2::new(x, y), &config.pyramid_for(&mask), config.alpha, config.delta, None)
                .map_err(engine)?;
        *out = CaCurvature {
            x: e.point.x,
            y: e.point.y,
            radius: e.radius_of_curvature,
            kappa: e.kappa,
            sign: match e.sign {
                CurvatureSign::Convex => CaSign::Convex,
                CurvatureSign::Concave => CaSign::Concave,
                CurvatureSign::Flat => CaSign::Flat,
            },
            normal_x: e.normal.x,
            normal_y: e.normal.y,
            scale: e.scale.radius(),
        };
        Ok(())
    })
}

/// Writes a seeded synthetic suite of `count` scenes to `out_dir`.
///
/// # Safety
/// `out_dir` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ca_gen_suite(seed: u64, count: usize, out_dir: *const c_char) -> CaStatus {
    guard(|| {
        let dir = path_arg(out_dir, "out_dir")?;
        cmd_gen_suite(seed, count, dir).map_err(engine)?;
        Ok(())
    })
}

//! C ABI for the ptbench optical bench.
//!
//! Media are opaque heap handles created by `ptb_medium_new` or
//! `ptb_medium_fig2` and released with `ptb_medium_free`. Everything else is
//! passed as plain `#[repr(C)]` structs. Every fallible call returns a
//! [`PtbStatus`]; the message of the last failure on the calling thread is
//! available through `ptb_last_error_message`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ptbench::bench::{self, ExperimentSettings, MediumPosition};
use ptbench::medium::{self, PTMediumParams};
use ptbench::state::BeamSplitterPhases;
use ptbench::{BenchError, Mat2};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtbStatus {
    Ok = 0,
    InvalidArgument = 1,
    BrokenPhase = 2,
    NullPointer = 3,
    ZeroIntensity = 4,
    Internal = 5,
}

/// Opaque medium handle.
pub struct PtbMedium {
    params: PTMediumParams,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtbMediumPosition {
    AfterBs = 0,
    BeforeBs = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtbMediumParams {
    pub eta1: f64,
    pub phi1: f64,
    pub eta2: f64,
    pub phi2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtbDerived {
    pub alpha: f64,
    pub length: f64,
    pub global_phase: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PtbComplex {
    pub re: f64,
    pub im: f64,
}

/// Row-major 2x2 complex matrix.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PtbMatrix2 {
    pub m: [PtbComplex; 4],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtbSettings {
    /// `r = sin(bs_angle)`, `t = cos(bs_angle)`.
    pub bs_angle: f64,
    pub hwp_angle: f64,
    pub bs_phases: [f64; 4],
    pub medium_position: PtbMediumPosition,
    pub mirror_swap: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PtbDetection {
    pub w_uh: f64,
    pub w_uv: f64,
    pub w_lh: f64,
    pub w_lv: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PtbProbabilities {
    pub p_uh: f64,
    pub p_uv: f64,
    pub p_lh: f64,
    pub p_lv: f64,
    pub pa_h: f64,
    pub pa_v: f64,
    pub pb_u: f64,
    pub pb_l: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PtbChshResult {
    pub s_max: f64,
    /// `[bs_angle_1, beta_1, bs_angle_2, beta_2]`.
    pub settings: [f64; 4],
    pub grid_s_max: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PtbViolationResult {
    pub delta: f64,
    pub beta: f64,
    pub phi_a: f64,
    pub phi_b: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &BenchError) -> PtbStatus {
    match err {
        BenchError::BrokenPhase { .. } => PtbStatus::BrokenPhase,
        BenchError::ZeroIntensity => PtbStatus::ZeroIntensity,
        _ => PtbStatus::InvalidArgument,
    }
}

/// Runs `f`, recording errors and converting panics into `Internal`.
fn guard<F: FnOnce() -> Result<(), PtbStatus>>(f: F) -> PtbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PtbStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic".into());
            PtbStatus::Internal
        }
    }
}

fn fail(err: BenchError) -> PtbStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn null(what: &str) -> PtbStatus {
    set_error(format!("null pointer: {what}"));
    PtbStatus::NullPointer
}

unsafe fn medium_ref<'a>(m: *const PtbMedium) -> Result<&'a PtbMedium, PtbStatus> {
    m.as_ref().ok_or_else(|| null("medium"))
}

unsafe fn out_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, PtbStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn settings_of(m: *const PtbMedium, s: *const PtbSettings) -> Result<ExperimentSettings, PtbStatus> {
    let medium = medium_ref(m)?.params;
    let s = s.as_ref().ok_or_else(|| null("settings"))?;
    Ok(ExperimentSettings {
        bs_angle: s.bs_angle,
        bs_phases: BeamSplitterPhases(s.bs_phases),
        hwp_angle: s.hwp_angle,
        medium,
        medium_position: match s.medium_position {
            PtbMediumPosition::AfterBs => MediumPosition::AfterBs,
            PtbMediumPosition::BeforeBs => MediumPosition::BeforeBs,
        },
        mirror_swap: s.mirror_swap,
    })
}

fn to_matrix(m: &Mat2) -> PtbMatrix2 {
    let mut out = PtbMatrix2::default();
    for r in 0..2 {
        for c in 0..2 {
            out.m[2 * r + c] = PtbComplex {
                re: m[(r, c)].re,
                im: m[(r, c)].im,
            };
        }
    }
    out
}

fn boxed(params: PTMediumParams, out: &mut *mut PtbMedium) {
    *out = Box::into_raw(Box::new(PtbMedium { params }));
}

/// Creates a medium handle. Phases are wrapped into `[0, 2pi)`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn ptb_medium_new(
    eta1: f64,
    phi1: f64,
    eta2: f64,
    phi2: f64,
    out: *mut *mut PtbMedium,
) -> PtbStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        let params = PTMediumParams::new(eta1, phi1, eta2, phi2).map_err(fail)?;
        boxed(params, out);
        Ok(())
    })
}

/// Creates a handle for the rubidium vapour preset
/// (`eta1 = 1.91, phi1 = 0.84 pi, eta2 = 36.5, phi2 = 0`).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn ptb_medium_fig2(out: *mut *mut PtbMedium) -> PtbStatus {
    guard(|| {
        boxed(PTMediumParams::fig2(), out_mut(out, "out")?);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `m` must be null or a handle returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ptb_medium_free(m: *mut PtbMedium) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ptb_medium_params(
    m: *const PtbMedium,
    out: *mut PtbMediumParams,
) -> PtbStatus {
    guard(|| {
        let p = medium_ref(m)?.params;
        *out_mut(out, "out")? = PtbMediumParams {
            eta1: p.eta1,
            phi1: p.phi1,
            eta2: p.eta2,
            phi2: p.phi2,
        };
        Ok(())
    })
}

/// # Safety
/// `m` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ptb_medium_is_unbroken(m: *const PtbMedium) -> bool {
    m.as_ref().is_some_and(|m| m.params.is_unbroken())
}

/// # Safety
/// `m` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ptb_medium_derive(m: *const PtbMedium, out: *mut PtbDerived) -> PtbStatus {
    guard(|| {
        let d = medium::derive(&medium_ref(m)?.params).map_err(fail)?;
        *out_mut(out, "out")? = PtbDerived {
            alpha: d.alpha,
            length: d.length,
            global_phase: d.global_phase,
        };
        Ok(())
    })
}

/// Closed-form propagator over the medium length.
///
/// # Safety
/// `m` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ptb_medium_m_opt(m: *const PtbMedium, out: *mut PtbMatrix2) -> PtbStatus {
    guard(|| {
        let mat = medium::m_opt_analytic(&medium_ref(m)?.params).map_err(fail)?;
        *out_mut(out, "out")? = to_matrix(&mat);
        Ok(())
    })
}

/// Numerical `exp(-i H z)`; valid in either PT phase.
///
/// # Safety
/// `m` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ptb_medium_m_opt_numeric(
    m: *const PtbMedium,
    z: f64,
    out: *mut PtbMatrix2,
) -> PtbStatus {
    guard(|| {
        if !(z >= 0.0) {
            set_error(format!("z = {z} must be >= 0"));
            return Err(PtbStatus::InvalidArgument);
        }
        let mat = medium::m_opt_numeric(&medium_ref(m)?.params, z);
        *out_mut(out, "out")? = to_matrix(&mat);
        Ok(())
    })
}

/// Fills `out` with the default bench settings: full reflection, `beta = pi/4`,
/// standard splitter phases, medium after the splitter, swap enabled.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ptb_settings_default(out: *mut PtbSettings) -> PtbStatus {
    guard(|| {
        *out_mut(out, "out")? = PtbSettings {
            bs_angle: std::f64::consts::FRAC_PI_2,
            hwp_angle: std::f64::consts::FRAC_PI_4,
            bs_phases: BeamSplitterPhases::default().0,
            medium_position: PtbMediumPosition::AfterBs,
            mirror_swap: true,
        };
        Ok(())
    })
}

/// # Safety
/// `m` must be a live handle, `settings` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ptb_run_bench(
    m: *const PtbMedium,
    settings: *const PtbSettings,
    out: *mut PtbDetection,
) -> PtbStatus {
    guard(|| {
        let s = settings_of(m, settings)?;
        let w = bench::run_bench(&s).map_err(fail)?;
        *out_mut(out, "out")? = PtbDetection {
            w_uh: w.w_uh,
            w_uv: w.w_uv,
            w_lh: w.w_lh,
            w_lv: w.w_lv,
        };
        Ok(())
    })
}

/// # Safety
/// `record` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ptb_probabilities(
    record: *const PtbDetection,
    out: *mut PtbProbabilities,
) -> PtbStatus {
    guard(|| {
        let r = record.as_ref().ok_or_else(|| null("record"))?;
        let d = bench::DetectionRecord::new(r.w_uh, r.w_uv, r.w_lh, r.w_lv);
        let p = bench::probabilities(&d).map_err(fail)?;
        *out_mut(out, "out")? = PtbProbabilities {
            p_uh: p.p_uh,
            p_uv: p.p_uv,
            p_lh: p.p_lh,
            p_lv: p.p_lv,
            pa_h: p.pa_h,
            pa_v: p.pa_v,
            pb_u: p.pb_u,
            pb_l: p.pb_l,
        };
        Ok(())
    })
}

/// Closed-form polarization marginals.
///
/// # Safety
/// `m` must be a live handle, `settings` readable, `pa_h` and `pa_v` writable.
#[no_mangle]
pub unsafe extern "C" fn ptb_p_single_closed_form(
    m: *const PtbMedium,
    settings: *const PtbSettings,
    pa_h: *mut f64,
    pa_v: *mut f64,
) -> PtbStatus {
    guard(|| {
        let s = settings_of(m, settings)?;
        let (h, v) = bench::p_single_closed_form(&s).map_err(fail)?;
        *out_mut(pa_h, "pa_h")? = h;
        *out_mut(pa_v, "pa_v")? = v;
        Ok(())
    })
}

/// `|P_A(h; phi_a) - P_A(h; phi_b)|` with the remaining settings from `settings`.
///
/// # Safety
/// `m` must be a live handle, `settings` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ptb_signaling_delta(
    m: *const PtbMedium,
    settings: *const PtbSettings,
    phi_a: f64,
    phi_b: f64,
    out: *mut f64,
) -> PtbStatus {
    guard(|| {
        let s = settings_of(m, settings)?;
        *out_mut(out, "out")? = bench::signaling_delta_in(&s, phi_a, phi_b).map_err(fail)?;
        Ok(())
    })
}

/// # Safety
/// `m` must be a live handle, `settings` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ptb_chsh_s(
    m: *const PtbMedium,
    settings: *const PtbSettings,
    angles: *const [f64; 4],
    out: *mut f64,
) -> PtbStatus {
    guard(|| {
        let s = settings_of(m, settings)?;
        let a = *angles.as_ref().ok_or_else(|| null("angles"))?;
        *out_mut(out, "out")? = bench::chsh_s_in(&s, a).map_err(fail)?;
        Ok(())
    })
}

/// # Safety
/// `m` must be a live handle, `settings` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ptb_max_chsh(
    m: *const PtbMedium,
    settings: *const PtbSettings,
    resolution: usize,
    out: *mut PtbChshResult,
) -> PtbStatus {
    guard(|| {
        let s = settings_of(m, settings)?;
        let r = bench::max_chsh_in(&s, resolution).map_err(fail)?;
        *out_mut(out, "out")? = PtbChshResult {
            s_max: r.s_max,
            settings: r.settings,
            grid_s_max: r.grid_s_max,
        };
        Ok(())
    })
}

/// # Safety
/// `m` must be a live handle, `settings` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ptb_max_violation(
    m: *const PtbMedium,
    settings: *const PtbSettings,
    resolution: usize,
    out: *mut PtbViolationResult,
) -> PtbStatus {
    guard(|| {
        let s = settings_of(m, settings)?;
        let r = bench::max_violation_in(&s, resolution).map_err(fail)?;
        *out_mut(out, "out")? = PtbViolationResult {
            delta: r.delta,
            beta: r.beta,
            phi_a: r.phi_a,
            phi_b: r.phi_b,
        };
        Ok(())
    })
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn ptb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ptb_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(
        concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes(),
    ) {
        Ok(v) => v,
        Err(_) => c"unknown",
    };
    VERSION.as_ptr()
}

//! C ABI for `fracvar`.
//!
//! Every function returns a [`FracvarStatus`]; results go through out
//! pointers. On failure, [`fracvar_last_error`] returns a message for the
//! calling thread that stays valid until that thread's next call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fracvar::stochastic::{enumerate_variation, z_moment};
use fracvar::variation::{pth_variation, riesz_variation};
use fracvar::{Error, Regime, SignRule, WavePhi, WeightPsi, WtfSpec};

/// Opaque handle to a validated Weierstrass-type function.
pub struct FracvarSpec(WtfSpec);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FracvarStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    InvalidWave = 4,
    InvalidWeight = 5,
    UnsupportedSpec = 6,
    UnsupportedSign = 7,
    Capacity = 8,
    Shape = 9,
    Format = 10,
    Contract = 11,
    Hypothesis = 12,
    NoBracket = 13,
    Io = 14,
    BufferTooSmall = 15,
    Panic = 16,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FracvarRegime {
    Sub = 0,
    Critical = 1,
    Super = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracvarRegimeReport {
    pub regime: FracvarRegime,
    pub psi_at_inv_b: f64,
    pub threshold: f64,
    /// Hölder exponent in the super regime, NaN otherwise.
    pub beta: f64,
    pub q: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracvarZMoment {
    pub mean: f64,
    pub std_error: f64,
    pub tail_bound: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let mut bytes = msg.into();
    bytes.retain(|&c| c != 0);
    let msg = CString::new(bytes).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> FracvarStatus {
    match e {
        Error::Domain(_) => FracvarStatus::Domain,
        Error::InvalidWave(_) => FracvarStatus::InvalidWave,
        Error::InvalidWeight(_) => FracvarStatus::InvalidWeight,
        Error::UnsupportedSpec(_) => FracvarStatus::UnsupportedSpec,
        Error::UnsupportedSign(_) => FracvarStatus::UnsupportedSign,
        Error::Capacity(_) => FracvarStatus::Capacity,
        Error::Shape(_) => FracvarStatus::Shape,
        Error::Format { .. } => FracvarStatus::Format,
        Error::Contract(_) => FracvarStatus::Contract,
        Error::Hypothesis(_) => FracvarStatus::Hypothesis,
        Error::NoBracket { .. } => FracvarStatus::NoBracket,
        Error::Io(_) => FracvarStatus::Io,
    }
}

struct Fail(FracvarStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> FracvarStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            FracvarStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FracvarStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(FracvarStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(FracvarStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn spec_arg<'a>(p: *const FracvarSpec) -> Result<&'a WtfSpec, Fail> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null("spec"))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null("samples"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Message for the last failed call on this thread (empty after success).
#[no_mangle]
pub extern "C" fn fracvar_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a spec from catalog names, e.g. `"power:0.5"`, `"triangular"`,
/// `"plus"`. The handle must be released with [`fracvar_spec_free`].
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fracvar_spec_new(
    b: u32,
    weight: *const c_char,
    wave: *const c_char,
    signs: *const c_char,
    out: *mut *mut FracvarSpec,
) -> FracvarStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let psi: WeightPsi = str_arg(weight, "weight")?.parse()?;
        let phi: WavePhi = str_arg(wave, "wave")?.parse()?;
        let signs: SignRule = str_arg(signs, "signs")?.parse()?;
        let spec = WtfSpec::new(b, psi, phi, signs)?;
        *out = Box::into_raw(Box::new(FracvarSpec(spec)));
        Ok(())
    })
}

/// # Safety
/// `spec` must come from [`fracvar_spec_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fracvar_spec_free(spec: *mut FracvarSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// `f(t)` within `tol`; `err` (optional) receives the truncation bound.
///
/// # Safety
/// `spec` must be a live handle; `value` must be writable; `err` may be null.
#[no_mangle]
pub unsafe extern "C" fn fracvar_eval_f(
    spec: *const FracvarSpec,
    t: f64,
    tol: f64,
    value: *mut f64,
    err: *mut f64,
) -> FracvarStatus {
    guard(|| {
        let spec = spec_arg(spec)?;
        let value = out_arg(value, "value")?;
        let (v, e) = spec.eval_f(t, tol)?;
        *value = v;
        if let Some(err) = err.as_mut() {
            *err = e;
        }
        Ok(())
    })
}

/// Number of points `b^n + 1` on the level-`n` grid.
///
/// # Safety
/// `spec` must be a live handle; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fracvar_grid_len(
    spec: *const FracvarSpec,
    n: u32,
    len: *mut usize,
) -> FracvarStatus {
    guard(|| {
        let spec = spec_arg(spec)?;
        let len = out_arg(len, "len")?;
        *len = spec.grid_cells(n)? as usize + 1;
        Ok(())
    })
}

/// Writes `f(k b^{-n})`, `k = 0..=b^n`, into `buf`.
///
/// # Safety
/// `spec` must be a live handle; `buf` must hold `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fracvar_eval_grid(
    spec: *const FracvarSpec,
    n: u32,
    buf: *mut f64,
    cap: usize,
) -> FracvarStatus {
    guard(|| {
        let spec = spec_arg(spec)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let need = spec.grid_cells(n)? as usize + 1;
        if cap < need {
            return Err(Fail(
                FracvarStatus::BufferTooSmall,
                format!("grid needs {need} values, buffer holds {cap}"),
            ));
        }
        let values = spec.eval_f_grid(n)?;
        std::slice::from_raw_parts_mut(buf, need).copy_from_slice(&values);
        Ok(())
    })
}

/// `V^{p,t}_n` of `len = b^n + 1` samples.
///
/// # Safety
/// `samples` must hold `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fracvar_pth_variation(
    samples: *const f64,
    len: usize,
    b: u32,
    p: f64,
    t: f64,
    out: *mut f64,
) -> FracvarStatus {
    guard(|| {
        let samples = slice_arg(samples, len)?;
        let out = out_arg(out, "out")?;
        *out = pth_variation(samples, b, p, t)?;
        Ok(())
    })
}

/// `RV^p_n = b^{n(p−1)} V^{p,1}_n` of `len = b^n + 1` samples.
///
/// # Safety
/// `samples` must hold `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fracvar_riesz_variation(
    samples: *const f64,
    len: usize,
    b: u32,
    p: f64,
    out: *mut f64,
) -> FracvarStatus {
    guard(|| {
        let samples = slice_arg(samples, len)?;
        let out = out_arg(out, "out")?;
        *out = riesz_variation(samples, b, p)?;
        Ok(())
    })
}

/// `V^{p,1}_n` by enumeration of all `b^n` digit paths.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fracvar_enumerate_variation(
    spec: *const FracvarSpec,
    p: f64,
    n: u32,
    out: *mut f64,
) -> FracvarStatus {
    guard(|| {
        let spec = spec_arg(spec)?;
        let out = out_arg(out, "out")?;
        *out = enumerate_variation(spec, p, n)?;
        Ok(())
    })
}

/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fracvar_classify_regime(
    spec: *const FracvarSpec,
    out: *mut FracvarRegimeReport,
) -> FracvarStatus {
    guard(|| {
        let spec = spec_arg(spec)?;
        let out = out_arg(out, "out")?;
        let r = spec.regime();
        *out = FracvarRegimeReport {
            regime: match r.regime {
                Regime::Sub => FracvarRegime::Sub,
                Regime::Critical => FracvarRegime::Critical,
                Regime::Super => FracvarRegime::Super,
            },
            psi_at_inv_b: r.psi_at_inv_b,
            threshold: r.threshold,
            beta: r.beta.unwrap_or(f64::NAN),
            q: r.q,
        };
        Ok(())
    })
}

/// Seeded Monte Carlo estimate of `E|Z_N|^p`.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fracvar_z_moment(
    spec: *const FracvarSpec,
    p: f64,
    samples: usize,
    trunc_n: u32,
    seed: u64,
    out: *mut FracvarZMoment,
) -> FracvarStatus {
    guard(|| {
        let spec = spec_arg(spec)?;
        let out = out_arg(out, "out")?;
        let est = z_moment(spec, p, samples, trunc_n, seed)?;
        *out = FracvarZMoment {
            mean: est.mc_mean,
            std_error: est.mc_stderr,
            tail_bound: est.tail_bound,
        };
        Ok(())
    })
}

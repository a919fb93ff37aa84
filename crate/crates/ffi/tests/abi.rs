use std::ffi::{CStr, CString};
use std::ptr;

use fracvar_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn spec(b: u32, weight: &str, signs: &str) -> *mut FracvarSpec {
    let mut out = ptr::null_mut();
    let status = unsafe {
        fracvar_spec_new(
            b,
            cstr(weight).as_ptr(),
            cstr("triangular").as_ptr(),
            cstr(signs).as_ptr(),
            &mut out,
        )
    };
    assert_eq!(status, FracvarStatus::Ok);
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(fracvar_last_error()) }
        .to_str()
        .unwrap()
        .to_owned()
}

#[test]
fn takagi_grid_and_variation() {
    let s = spec(2, "power:1", "plus");
    let mut len = 0usize;
    assert_eq!(
        unsafe { fracvar_grid_len(s, 10, &mut len) },
        FracvarStatus::Ok
    );
    assert_eq!(len, 1025);
    let mut buf = vec![0.0; len];
    assert_eq!(
        unsafe { fracvar_eval_grid(s, 10, buf.as_mut_ptr(), len) },
        FracvarStatus::Ok
    );
    let mut v = 0.0;
    assert_eq!(
        unsafe { fracvar_pth_variation(buf.as_ptr(), len, 2, 2.0, 1.0, &mut v) },
        FracvarStatus::Ok
    );
    assert!((v - 10.0 / 1024.0).abs() < 1e-15);
    let mut e = 0.0;
    assert_eq!(
        unsafe { fracvar_enumerate_variation(s, 2.0, 10, &mut e) },
        FracvarStatus::Ok
    );
    assert!((v - e).abs() < 1e-14);
    let (mut f, mut err) = (0.0, 0.0);
    assert_eq!(
        unsafe { fracvar_eval_f(s, 0.5, 1e-12, &mut f, &mut err) },
        FracvarStatus::Ok
    );
    assert!((f - 0.5).abs() < 1e-12);
    assert_eq!(
        unsafe { fracvar_eval_f(s, 0.5, 1e-12, &mut f, ptr::null_mut()) },
        FracvarStatus::Ok
    );
    unsafe { fracvar_spec_free(s) };
}

#[test]
fn regime_and_z_moment() {
    let s = spec(2, "power:0.5", "plus");
    let mut r = FracvarRegimeReport {
        regime: FracvarRegime::Sub,
        psi_at_inv_b: 0.0,
        threshold: 0.0,
        beta: 0.0,
        q: 0.0,
    };
    assert_eq!(
        unsafe { fracvar_classify_regime(s, &mut r) },
        FracvarStatus::Ok
    );
    assert_eq!(r.regime, FracvarRegime::Super);
    assert_eq!(r.beta, 0.5);
    assert_eq!(r.q, 2.0);
    let mut z = FracvarZMoment {
        mean: 0.0,
        std_error: 0.0,
        tail_bound: 0.0,
    };
    assert_eq!(
        unsafe { fracvar_z_moment(s, 2.0, 20_000, 30, 7, &mut z) },
        FracvarStatus::Ok
    );
    assert!((z.mean - 1.0).abs() < 4.0 * (z.std_error + z.tail_bound));
    unsafe { fracvar_spec_free(s) };
}

#[test]
fn error_codes_and_messages() {
    let mut out = ptr::null_mut();
    let st = unsafe {
        fracvar_spec_new(
            2,
            cstr("power:0").as_ptr(),
            cstr("triangular").as_ptr(),
            cstr("plus").as_ptr(),
            &mut out,
        )
    };
    assert_eq!(st, FracvarStatus::InvalidWeight);
    assert!(out.is_null());
    assert!(last_error().contains("weight"), "{}", last_error());
    let st = unsafe {
        fracvar_spec_new(
            2,
            cstr("power:1").as_ptr(),
            cstr("square").as_ptr(),
            cstr("plus").as_ptr(),
            &mut out,
        )
    };
    assert_eq!(st, FracvarStatus::InvalidWave);
    let st = unsafe { fracvar_spec_new(2, ptr::null(), ptr::null(), ptr::null(), &mut out) };
    assert_eq!(st, FracvarStatus::NullPointer);

    let s = spec(2, "power:1", "alternating");
    let mut len = 0;
    assert_eq!(
        unsafe { fracvar_grid_len(s, 40, &mut len) },
        FracvarStatus::Capacity
    );
    let mut v = 0.0;
    assert_eq!(
        unsafe { fracvar_eval_f(s, 2.0, 1e-9, &mut v, ptr::null_mut()) },
        FracvarStatus::Domain
    );
    let mut z = FracvarZMoment {
        mean: 0.0,
        std_error: 0.0,
        tail_bound: 0.0,
    };
    assert_eq!(
        unsafe { fracvar_z_moment(s, 2.0, 10, 10, 0, &mut z) },
        FracvarStatus::Contract
    );
    assert_eq!(
        unsafe { fracvar_eval_f(s, 0.5, 1e-9, &mut v, ptr::null_mut()) },
        FracvarStatus::Ok
    );
    assert_eq!(last_error(), "");
    unsafe { fracvar_spec_free(s) };

    let bad = [0.0; 10];
    assert_eq!(
        unsafe { fracvar_pth_variation(bad.as_ptr(), 10, 2, 2.0, 1.0, &mut v) },
        FracvarStatus::Shape
    );
    assert_eq!(
        unsafe { fracvar_riesz_variation(ptr::null(), 9, 2, 2.0, &mut v) },
        FracvarStatus::NullPointer
    );
    unsafe { fracvar_spec_free(ptr::null_mut()) };
}

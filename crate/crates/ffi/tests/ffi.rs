use std::ffi::{CStr, CString};
use std::ptr;

use locspec_ffi::*;

const AR1: &str = r#"{"alpha":[{"kind":"constant","value":-0.5}],"sigma":{"kind":"constant","value":1.0}}"#;

fn model() -> *mut LsModel {
    let json = CString::new(AR1).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ls_model_from_json(json.as_ptr(), &mut m) }, LsStatus::Ok);
    m
}

fn last_error() -> String {
    let p = ls_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn model_queries() {
    let m = model();
    let mut c = 0.0;
    assert_eq!(unsafe { ls_model_covariance(m, 0.5, 1, &mut c) }, LsStatus::Ok);
    assert!((c - 2.0 / 3.0).abs() < 1e-12);
    let mut f = 0.0;
    assert_eq!(unsafe { ls_model_spectral_density(m, 0.5, 0.0, &mut f) }, LsStatus::Ok);
    assert!((f - 4.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-12);
    unsafe { ls_model_free(m) };
}

#[test]
fn unstable_model_reports_status_and_message() {
    let json = CString::new(r#"{"alpha":[{"kind":"constant","value":-1.5}],"sigma":{"kind":"constant","value":1.0}}"#).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ls_model_from_json(json.as_ptr(), &mut m) }, LsStatus::InvalidModel);
    assert!(m.is_null());
    assert!(last_error().contains("invalid model"));

    let bad = CString::new("{").unwrap();
    assert_eq!(unsafe { ls_model_from_json(bad.as_ptr(), &mut m) }, LsStatus::Config);
    assert_eq!(unsafe { ls_model_from_json(ptr::null(), &mut m) }, LsStatus::NullPointer);
}

#[test]
fn simulate_and_estimate() {
    let m = model();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ls_simulate(m, 400, 1, 0, &mut s) }, LsStatus::Ok);
    assert_eq!(unsafe { ls_sample_len(s) }, 400);

    let mut small = [0.0; 10];
    assert_eq!(unsafe { ls_sample_values(s, small.as_mut_ptr(), small.len()) }, LsStatus::BufferTooSmall);
    let mut vals = vec![0.0; 400];
    assert_eq!(unsafe { ls_sample_values(s, vals.as_mut_ptr(), vals.len()) }, LsStatus::Ok);

    let name = CString::new("cos1").unwrap();
    let (mut a, mut b) = (0.0, 0.0);
    assert_eq!(unsafe { ls_spectral_mean(s, name.as_ptr(), LsRoute::Frequency, &mut a) }, LsStatus::Ok);
    assert_eq!(unsafe { ls_spectral_mean(s, name.as_ptr(), LsRoute::Lag, &mut b) }, LsStatus::Ok);
    let acov1 = vals.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / 400.0;
    assert!((a - b).abs() < 1e-10 && (a - acov1).abs() < 1e-10);

    let fam = CString::new(r#"{"family":{"kind":"ar","p":1}}"#).unwrap();
    let mut theta = [0.0; 2];
    let mut dim = 0;
    assert_eq!(unsafe { ls_fit_whittle(s, fam.as_ptr(), theta.as_mut_ptr(), 2, &mut dim) }, LsStatus::Ok);
    assert_eq!(dim, 2);
    assert!((theta[0] + 0.5).abs() < 0.15);

    let mut alpha = [0.0];
    let mut s2 = 0.0;
    let st = unsafe { ls_local_yule_walker(s, 1, LsKernel::Epanechnikov, 0.3, 0.5, alpha.as_mut_ptr(), &mut s2) };
    assert_eq!(st, LsStatus::Ok);
    assert!(s2 > 0.0);
    let st = unsafe { ls_local_yule_walker(s, 1, LsKernel::Epanechnikov, 0.3, 0.01, alpha.as_mut_ptr(), &mut s2) };
    assert_eq!(st, LsStatus::OutOfBand);

    unsafe {
        ls_sample_free(s);
        ls_model_free(m);
    }
}

#[test]
fn sample_from_values_rejects_nan() {
    let v = [1.0, f64::NAN];
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ls_sample_from_values(v.as_ptr(), 2, &mut s) }, LsStatus::InvalidArgument);
    let v = [1.0, 2.0];
    assert_eq!(unsafe { ls_sample_from_values(v.as_ptr(), 2, &mut s) }, LsStatus::Ok);
    unsafe { ls_sample_free(s) };
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/locspec.h")).unwrap();
    for sym in ["ls_model_from_json", "ls_simulate", "ls_spectral_mean", "ls_fit_whittle", "LS_STATUS_PANIC", "LsModel"] {
        assert!(h.contains(sym), "{sym} missing from header");
    }
    let v = unsafe { CStr::from_ptr(ls_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

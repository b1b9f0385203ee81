use std::ffi::CStr;
use std::ptr;

use tumorstab_ffi::*;

fn last_error() -> String {
    let need = unsafe { ts_last_error(ptr::null_mut(), 0) };
    let mut buf = vec![0 as std::ffi::c_char; need];
    unsafe { ts_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn profile(beta: f64, sigma: f64, mu: f64) -> *mut TsProfile {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { ts_profile_new(beta, sigma, mu, &mut p) }, TS_OK);
    assert!(!p.is_null());
    p
}

#[test]
fn radius_matches_library() {
    let p = profile(1.0, 0.5, 3.0);
    let mut r = 0.0;
    assert_eq!(unsafe { ts_profile_radius(p, &mut r) }, TS_OK);
    let want = tumorstab::stationary::solve_radius(1.0, 0.5).unwrap();
    assert_eq!(r, want);
    assert!((tumorstab::stationary::radius_equation_lhs(1.0, r) - 0.5 / 3.0).abs() < 1e-12);
    // nutrient increases outward from the center and stays below the far field
    let (mut s0, mut s1) = (0.0, 0.0);
    assert_eq!(unsafe { ts_profile_sigma(p, 0.0, &mut s0) }, TS_OK);
    assert_eq!(unsafe { ts_profile_sigma(p, r, &mut s1) }, TS_OK);
    assert!(0.0 < s0 && s0 < s1 && s1 < 1.0);
    unsafe { ts_profile_free(p) };
}

#[test]
fn translation_zero_and_bifurcation_value() {
    let (beta, sigma) = (2.0, 0.3);
    let p = profile(beta, sigma, 1.5);
    let (mut re, mut im) = (1.0, 1.0);
    assert_eq!(unsafe { ts_dispersion(p, 1, 0.0, 0.0, &mut re, &mut im) }, TS_OK);
    assert!(re.abs() < 1e-12 && im == 0.0, "{re} {im}");
    unsafe { ts_profile_free(p) };

    let mut mu3 = 0.0;
    assert_eq!(unsafe { ts_mu_bifurcation(beta, sigma, 3, &mut mu3) }, TS_OK);
    let q = profile(beta, sigma, mu3);
    assert_eq!(unsafe { ts_dispersion(q, 3, 0.0, 0.0, &mut re, &mut im) }, TS_OK);
    assert!(re.abs() < 1e-9, "{re}");
    unsafe { ts_profile_free(q) };
}

#[test]
fn dominant_root_is_a_zero() {
    let p = profile(1.0, 0.5, 3.0);
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { ts_dominant_root(p, 2, &mut re, &mut im) }, TS_OK);
    let (mut hr, mut hi) = (1.0, 1.0);
    assert_eq!(unsafe { ts_dispersion(p, 2, re, im, &mut hr, &mut hi) }, TS_OK);
    assert!(hr.hypot(hi) < 1e-9);
    assert!(re < 0.0);
    unsafe { ts_profile_free(p) };
}

#[test]
fn threshold_lies_below_first_bifurcations() {
    let (mut star, mut mu1, mut mu2) = (0.0, 0.0, 0.0);
    assert_eq!(unsafe { ts_mu_star(1.0, 0.5, &mut star) }, TS_OK);
    assert_eq!(unsafe { ts_mu_bifurcation(1.0, 0.5, 1, &mut mu1) }, TS_OK);
    assert_eq!(unsafe { ts_mu_bifurcation(1.0, 0.5, 2, &mut mu2) }, TS_OK);
    assert!(star > 0.0 && star <= mu2 * (1.0 + 1e-12) && star < mu1);
}

#[test]
fn errors_are_reported() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { ts_profile_new(1.0, 1.5, 1.0, &mut p) }, TS_ERR_VALIDATION);
    assert!(p.is_null());
    assert!(last_error().contains("sigma_tilde"), "{}", last_error());

    assert_eq!(unsafe { ts_profile_new(1.0, 0.5, 1.0, ptr::null_mut()) }, TS_ERR_NULL);
    let mut r = 0.0;
    assert_eq!(unsafe { ts_profile_radius(ptr::null(), &mut r) }, TS_ERR_NULL);
    let mut mu = 0.0;
    assert_eq!(unsafe { ts_mu_bifurcation(1.0, 0.5, 0, &mut mu) }, TS_ERR_VALIDATION);

    // success clears the message
    let q = profile(1.0, 0.5, 1.0);
    assert_eq!(last_error(), "");
    assert_eq!(unsafe { ts_profile_sigma(q, -1.0, &mut r) }, TS_ERR_VALIDATION);
    unsafe { ts_profile_free(q) };
}

#[test]
fn error_buffer_truncates() {
    let mut p = ptr::null_mut();
    unsafe { ts_profile_new(-1.0, 0.5, 1.0, &mut p) };
    let mut buf = [1 as std::ffi::c_char; 5];
    let need = unsafe { ts_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(need > 5);
    assert_eq!(buf[4], 0);
}

#[test]
fn errors_are_per_thread() {
    let mut p = ptr::null_mut();
    unsafe { ts_profile_new(1.0, 2.0, 1.0, &mut p) };
    let other = std::thread::spawn(last_error).join().unwrap();
    assert_eq!(other, "");
    assert!(!last_error().is_empty());
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ts_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/tumorstab.h")).unwrap();
    for name in [
        "ts_profile_new",
        "ts_profile_free",
        "ts_profile_radius",
        "ts_profile_sigma",
        "ts_dispersion",
        "ts_dominant_root",
        "ts_mu_bifurcation",
        "ts_mu_star",
        "ts_last_error",
        "ts_version",
        "typedef struct TsProfile TsProfile",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

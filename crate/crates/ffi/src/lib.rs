//! C interface. Every function returns a status code; results go through
//! out-pointers. On failure the message is kept per thread and can be read
//! with `ts_last_error`. Profiles are opaque and must be released with
//! `ts_profile_free`.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64 as C64;
use tumorstab::dispersion::{dominant_root, mu_bifurcation, mu_star, ContourOptions, DispersionContext, MuStarOptions};
use tumorstab::stationary::{ModelParams, StationaryProfile};
use tumorstab::Error;

pub const TS_OK: i32 = 0;
/// A required pointer was null.
pub const TS_ERR_NULL: i32 = 1;
/// Input outside the admissible range.
pub const TS_ERR_VALIDATION: i32 = 2;
/// The computation failed (no convergence, ill conditioning, ...).
pub const TS_ERR_NUMERICAL: i32 = 3;
/// Internal error; the library caught a panic.
pub const TS_ERR_PANIC: i32 = 4;

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

/// Stationary tumor at fixed parameters.
pub struct TsProfile {
    inner: StationaryProfile,
}

fn guard(f: impl FnOnce() -> Result<(), i32>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            TS_OK
        }
        Ok(Err(code)) => code,
        Err(_) => {
            set_error("internal error".into());
            TS_ERR_PANIC
        }
    }
}

fn fail(e: Error) -> i32 {
    let code = if e.is_validation() { TS_ERR_VALIDATION } else { TS_ERR_NUMERICAL };
    set_error(e.to_string());
    code
}

fn null(what: &str) -> i32 {
    set_error(format!("{what} is null"));
    TS_ERR_NULL
}

unsafe fn profile<'a>(p: *const TsProfile) -> Result<&'a StationaryProfile, i32> {
    p.as_ref().map(|p| &p.inner).ok_or_else(|| null("profile"))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), i32> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

/// Builds the stationary profile; `*out` receives a new handle.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_profile_new(beta: f64, sigma_tilde: f64, mu: f64, out: *mut *mut TsProfile) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = ModelParams::new(beta, sigma_tilde, mu)
            .and_then(StationaryProfile::new)
            .map_err(fail)?;
        out.write(Box::into_raw(Box::new(TsProfile { inner })));
        Ok(())
    })
}

/// Releases a handle from `ts_profile_new`. Null is ignored.
///
/// # Safety
/// `p` must be null or a live handle, and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn ts_profile_free(p: *mut TsProfile) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Stationary radius.
///
/// # Safety
/// `p` must be null or a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_profile_radius(p: *const TsProfile, out: *mut f64) -> i32 {
    guard(|| write(out, profile(p)?.radius))
}

/// Nutrient level at radius `r`.
///
/// # Safety
/// As for `ts_profile_radius`.
#[no_mangle]
pub unsafe extern "C" fn ts_profile_sigma(p: *const TsProfile, r: f64, out: *mut f64) -> i32 {
    guard(|| {
        let pr = profile(p)?;
        if !(0.0..=pr.radius).contains(&r) {
            return Err(fail(Error::Domain {
                what: "r must lie in [0, R]",
                value: r,
            }));
        }
        write(out, pr.sigma(r))
    })
}

/// `h_n(s)` at `s = s_re + i s_im`.
///
/// # Safety
/// `p` must be null or a live handle; outputs null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_dispersion(
    p: *const TsProfile,
    n: u32,
    s_re: f64,
    s_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> i32 {
    guard(|| {
        let ctx = DispersionContext::new(n as usize, profile(p)?).map_err(fail)?;
        let h = ctx.h(C64::new(s_re, s_im)).map_err(fail)?;
        write(out_re, h.re)?;
        write(out_im, h.im)
    })
}

/// Zero of `h_n` with the largest real part.
///
/// # Safety
/// As for `ts_dispersion`.
#[no_mangle]
pub unsafe extern "C" fn ts_dominant_root(p: *const TsProfile, n: u32, out_re: *mut f64, out_im: *mut f64) -> i32 {
    guard(|| {
        let pr = profile(p)?;
        let ctx = DispersionContext::new(n as usize, pr).map_err(fail)?;
        let nf = n as f64;
        let depth = 64.0 * (nf * nf / (pr.radius * pr.radius)).max(16.0);
        let z = dominant_root(&ctx, depth, &ContourOptions::default()).map_err(fail)?;
        write(out_re, z.s.re)?;
        write(out_im, z.s.im)
    })
}

/// Bifurcation value `μ_n` (`n >= 1`).
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_mu_bifurcation(beta: f64, sigma_tilde: f64, n: u32, out: *mut f64) -> i32 {
    guard(|| {
        let r = tumorstab::stationary::solve_radius(beta, sigma_tilde).map_err(fail)?;
        write(out, mu_bifurcation(n as usize, r, beta).map_err(fail)?)
    })
}

/// Stability threshold `μ*` with default options.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_mu_star(beta: f64, sigma_tilde: f64, out: *mut f64) -> i32 {
    guard(|| {
        let m = mu_star(beta, sigma_tilde, &MuStarOptions::default(), &ContourOptions::default()).map_err(fail)?;
        write(out, m.mu_star)
    })
}

/// Copies the calling thread's last error message, NUL terminated and
/// truncated to `cap` bytes, into `buf`. Returns the buffer size needed for
/// the full message. `buf` may be null to query the size.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn ts_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            buf.add(n).write(0);
        }
        bytes.len() + 1
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ts_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

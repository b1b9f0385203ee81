//! Half-integer order modified Bessel functions and zeros of the
//! half-integer order Bessel functions of the first kind.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::ratio::ratio_ladder;
use crate::error::{Error, Result};

/// Arguments above this overflow the unscaled function.
pub const OVERFLOW_ARG: f64 = 700.0;

/// `e^{-x} I_{1/2}(x)`.
fn i_half_scaled_base(x: f64) -> f64 {
    (2.0 / (PI * x)).sqrt() * (-(-2.0 * x).exp_m1()) / 2.0
}

/// `e^{-x} I_{n+1/2}(x)` for `x >= 0`.
///
/// Built as `I_{1/2}` times the product of consecutive order ratios, which
/// are all positive, so nothing cancels.
pub fn bessel_i_half_scaled(n: usize, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            what: "Bessel argument must be finite and non-negative",
            value: x,
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut v = i_half_scaled_base(x);
    if n > 0 {
        let ladder = ratio_ladder(n - 1, C64::new(x * x, 0.0))?;
        for p in &ladder {
            v *= x * p.re;
        }
    }
    Ok(v)
}

/// `I_{n+1/2}(x)` for `0 <= x <= 700`.
pub fn bessel_i_half(n: usize, x: f64) -> Result<f64> {
    if x > OVERFLOW_ARG {
        return Err(Error::Overflow { n, x });
    }
    let s = bessel_i_half_scaled(n, x)?;
    Ok(s * x.exp())
}

/// Spherical Bessel `j_n(x)` and `j_{n-1}(x)` by upward recurrence; only
/// accurate for `x` beyond the turning point, which is where zeros live.
fn spherical_j_pair(n: usize, x: f64) -> (f64, f64) {
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    if n == 0 {
        return (j0, c / x);
    }
    let mut prev = j0;
    let mut cur = s / (x * x) - c / x;
    for k in 1..n {
        let next = (2 * k + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Value and derivative of `j_n` at `x`.
fn spherical_j_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (j, jm1) = spherical_j_pair(n, x);
    if n == 0 {
        // j_0' = -j_1
        let j1 = x.sin() / (x * x) - x.cos() / x;
        return (j, -j1);
    }
    (j, jm1 - (n + 1) as f64 / x * j)
}

fn refine_zero(n: usize, mut a: f64, mut b: f64) -> f64 {
    let mut fa = spherical_j_pair(n, a).0;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let (fm, _) = spherical_j_pair(n, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        if b - a < 1e-6 {
            break;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..20 {
        let (f, df) = spherical_j_with_derivative(n, x);
        let step = f / df;
        let nx = x - step;
        if !(nx > a - 1e-6 && nx < b + 1e-6) {
            break;
        }
        x = nx;
        if step.abs() <= 4.0 * f64::EPSILON * x {
            break;
        }
    }
    x
}

struct ZeroScanner {
    n: usize,
    last: f64,
}

impl ZeroScanner {
    fn new(n: usize) -> Self {
        let nu = n as f64 + 0.5;
        // classical lower bound for the first zero
        let last = if n == 0 {
            0.0
        } else {
            (nu * (nu + 2.0)).sqrt() - PI / 2.0
        };
        ZeroScanner { n, last }
    }

    /// Next zero beyond `last`. Consecutive zeros are more than π apart, so
    /// a half-π stride brackets at most one zero per step.
    fn next_zero(&mut self) -> f64 {
        if self.n == 0 {
            let m = (self.last / PI).floor() + 1.0;
            self.last = m * PI;
            return self.last;
        }
        let stride = PI / 2.0;
        let mut a = self.last + 0.5 * stride;
        let mut fa = spherical_j_pair(self.n, a).0;
        loop {
            let b = a + stride;
            let fb = spherical_j_pair(self.n, b).0;
            if fb == 0.0 {
                self.last = b;
                return b;
            }
            if (fa > 0.0) != (fb > 0.0) {
                let z = refine_zero(self.n, a, b);
                self.last = z;
                return z;
            }
            a = b;
            fa = fb;
        }
    }
}

/// First `count` positive zeros `j_{n+1/2,1} < j_{n+1/2,2} < ...` of
/// `J_{n+1/2}`.
pub fn bessel_zeros(n: usize, count: usize) -> Vec<f64> {
    let mut scanner = ZeroScanner::new(n);
    (0..count).map(|_| scanner.next_zero()).collect()
}

/// All zeros of `J_{n+1/2}` not exceeding `x_max`.
pub fn bessel_zeros_upto(n: usize, x_max: f64) -> Vec<f64> {
    let mut scanner = ZeroScanner::new(n);
    let mut out = Vec::new();
    loop {
        let z = scanner.next_zero();
        if z > x_max {
            return out;
        }
        out.push(z);
    }
}

//! Reference implementations used as test oracles. They take a different
//! route from the library (power series, Miller recurrence, closed forms,
//! plain bisection) so agreement means something.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use tumorstab::evolution::RadialGrid;
use tumorstab::stationary::{ModelParams, StationaryProfile};

/// `Σ_k (u/4)^k / (k! (ν+1)_k)`.
pub fn hyper_series(nu: f64, u: C64) -> C64 {
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..2000 {
        let kf = k as f64;
        term *= u / (4.0 * kf * (nu + kf));
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// `I_{n+3/2}(ξ) / (ξ I_{n+1/2}(ξ))` as a function of `u = ξ²`, by series.
pub fn ratio_series(n: usize, u: C64) -> C64 {
    let nu = n as f64 + 0.5;
    hyper_series(nu + 1.0, u) / (hyper_series(nu, u) * (2.0 * (nu + 1.0)))
}

/// `I_{n+1/2}(x)` by its power series.
pub fn bessel_i_series(n: usize, x: f64) -> f64 {
    let nu = n as f64 + 0.5;
    // Γ(ν+1) = √π Π_{k=0}^{n} (k + 1/2)
    let gamma: f64 = PI.sqrt() * (0..=n).map(|k| k as f64 + 0.5).product::<f64>();
    (x / 2.0).powf(nu) / gamma * hyper_series(nu, C64::new(x * x, 0.0)).re
}

/// Spherical Bessel `j_n(x)` by Miller's backward recurrence, normalized
/// against whichever of the closed forms `j_0`, `j_1` is larger.
pub fn spherical_jn(n: usize, x: f64) -> f64 {
    let start = n + 40 + x as usize;
    let mut seq = vec![0.0f64; start + 2];
    seq[start] = 1e-300;
    for k in (1..=start).rev() {
        seq[k - 1] = (2 * k + 1) as f64 / x * seq[k] - seq[k + 1];
        if seq[k - 1].abs() > 1e250 {
            seq.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    let j0 = x.sin() / x;
    let j1 = x.sin() / (x * x) - x.cos() / x;
    if j0.abs() >= j1.abs() {
        seq[n] * j0 / seq[0]
    } else {
        seq[n] * j1 / seq[1]
    }
}

/// `P_0(ξ) = coth ξ / ξ - 1/ξ²`.
pub fn p0_closed(xi: f64) -> f64 {
    1.0 / (xi * xi.tanh()) - 1.0 / (xi * xi)
}

/// Stationary radius by plain bisection on the closed form of `P_0`.
pub fn radius_oracle(beta: f64, sigma_tilde: f64) -> f64 {
    let f = |r: f64| {
        let p = p0_closed(r);
        beta * p / (beta + r * p) - sigma_tilde / 3.0
    };
    let (mut lo, mut hi) = (1e-2, 200.0);
    assert!(f(lo) > 0.0 && f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn profile(beta: f64, sigma_tilde: f64, mu: f64) -> StationaryProfile {
    StationaryProfile::new(ModelParams::new(beta, sigma_tilde, mu).unwrap()).unwrap()
}

pub fn grid(p: &StationaryProfile, cells: usize) -> RadialGrid {
    RadialGrid::new(p.radius, cells).unwrap()
}

/// Ratios of successive errors.
pub fn ratios(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| w[0] / w[1]).collect()
}

/// Largest `|a - b|`.
pub fn sup_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Sign-change scan of a real function, refined by bisection.
pub fn real_zeros(f: impl Fn(f64) -> f64, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let step = (hi - lo) / samples as f64;
    let mut a = lo;
    let mut fa = f(a);
    for k in 1..=samples {
        let b = lo + k as f64 * step;
        let fb = f(b);
        if fa.is_finite() && fb.is_finite() && fa * fb < 0.0 {
            let (mut x0, mut x1, mut f0) = (a, b, fa);
            for _ in 0..100 {
                let m = 0.5 * (x0 + x1);
                let fm = f(m);
                if f0 * fm <= 0.0 {
                    x1 = m;
                } else {
                    x0 = m;
                    f0 = fm;
                }
            }
            out.push(0.5 * (x0 + x1));
        }
        a = b;
        fa = fb;
    }
    out
}

/// Seeded generator so failures reproduce.
pub fn rng(seed: u64) -> rand::rngs::StdRng {
    use rand::SeedableRng;
    rand::rngs::StdRng::seed_from_u64(seed)
}

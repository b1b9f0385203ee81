//! Ratio of consecutive half-integer modified Bessel functions.
//!
//! `ratio(n, u)` evaluates `I_{n+3/2}(ξ) / (ξ I_{n+1/2}(ξ))` with `u = ξ²`.
//! The quantity is single valued in `u`, meromorphic, with simple poles at
//! `u = -j²_{n+1/2,m}` (residue 2), so every evaluation works directly in `u`.

use num_complex::Complex64 as C64;

use super::bessel::bessel_zeros_upto;
use crate::error::{Error, Result};

/// Distance in `u` below which an evaluation is refused as a pole hit.
pub const POLE_GUARD: f64 = 1e-8;

const REL_TOL: f64 = 1e-13;
const MAX_DEPTH: usize = 1 << 20;

/// Fixed point of `p = 1 / (u p + c)`; tail seed for the backward recurrence.
fn tail_seed(u: C64, c: f64) -> C64 {
    let disc = (C64::new(c * c, 0.0) + 4.0 * u).sqrt();
    2.0 / (c + disc)
}

/// Backward recurrence from depth `k_top` down to order 0, keeping values
/// (and u-derivatives) for orders `0..=keep`.
fn backward(u: C64, k_top: usize, keep: usize) -> (Vec<C64>, Vec<C64>) {
    let mut p = tail_seed(u, (2 * k_top + 3) as f64);
    let mut dp = C64::new(0.0, 0.0);
    let mut vals = vec![C64::new(0.0, 0.0); keep + 1];
    let mut ders = vec![C64::new(0.0, 0.0); keep + 1];
    for k in (0..k_top).rev() {
        let den = u * p + (2 * k + 3) as f64;
        let next = 1.0 / den;
        // d/du of 1/(u p + c) = -(p + u p') / den²
        dp = -(p + u * dp) * next * next;
        p = next;
        if k <= keep {
            vals[k] = p;
            ders[k] = dp;
        }
    }
    (vals, ders)
}

fn start_depth(n: usize, u: C64) -> usize {
    n + (u.norm().sqrt().ceil() as usize) + 30
}

fn converged(a: C64, b: C64) -> bool {
    let scale = a.norm().max(b.norm()).max(1e-300);
    (a - b).norm() <= REL_TOL * scale
}

/// Orders `0..=n` of the ratio together with their u-derivatives.
fn ladder_with_derivative(n: usize, u: C64) -> Result<(Vec<C64>, Vec<C64>)> {
    if !(u.re.is_finite() && u.im.is_finite()) {
        return Err(Error::Domain {
            what: "ratio argument must be finite",
            value: u.re,
        });
    }
    let mut depth = start_depth(n, u);
    let mut vals = backward(u, depth, n).0;
    let mut ders;
    loop {
        let next_depth = n + 2 * (depth - n);
        let (v2, d2) = backward(u, next_depth, n);
        let ok = (0..=n).all(|k| converged(vals[k], v2[k]) || !v2[k].is_finite());
        vals = v2;
        ders = d2;
        depth = next_depth;
        if ok {
            break;
        }
        if depth > MAX_DEPTH {
            return Err(Error::Convergence(format!(
                "Bessel ratio recurrence for n={n} at u={u} did not settle"
            )));
        }
    }
    check_pole(n, u, vals[n])?;
    Ok((vals, ders))
}

/// Near a pole the ratio behaves like `2 / (u + j²)`, which gives a cheap
/// distance estimate; the zero index is only computed when reporting.
fn check_pole(n: usize, u: C64, value: C64) -> Result<()> {
    let finite = value.re.is_finite() && value.im.is_finite();
    if finite && 2.0 / value.norm() >= POLE_GUARD {
        return Ok(());
    }
    if u.re >= 0.0 {
        return Ok(());
    }
    let x = (-u.re).sqrt();
    let zeros = bessel_zeros_upto(n, x + 4.0);
    let (m, dist) = zeros
        .iter()
        .enumerate()
        .map(|(i, &j)| (i + 1, (u + j * j).norm()))
        .fold((0, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
    if dist < POLE_GUARD || !finite {
        return Err(Error::PoleProximity {
            n,
            m,
            distance: dist,
        });
    }
    Ok(())
}

/// `P̃_n(u)`; errors within [`POLE_GUARD`] of a pole.
pub fn ratio(n: usize, u: C64) -> Result<C64> {
    let (vals, _) = ladder_with_derivative(n, u)?;
    Ok(vals[n])
}

/// `P̃_n(u)` and `dP̃_n/du`.
pub fn ratio_with_derivative(n: usize, u: C64) -> Result<(C64, C64)> {
    let (vals, ders) = ladder_with_derivative(n, u)?;
    Ok((vals[n], ders[n]))
}

/// All orders `P̃_0(u), ..., P̃_n(u)` from one recurrence sweep.
pub fn ratio_ladder(n: usize, u: C64) -> Result<Vec<C64>> {
    let (vals, _) = ladder_with_derivative(n, u)?;
    Ok(vals)
}

/// Real-argument form `P_n(ξ) = P̃_n(ξ²)`.
pub fn ratio_real(n: usize, xi: f64) -> Result<f64> {
    Ok(ratio(n, C64::new(xi * xi, 0.0))?.re)
}

/// `P_0(ξ) = coth ξ / ξ - 1/ξ²`; the closed form cancels badly for small
/// `ξ`, where the recurrence is used instead.
pub fn p0(xi: f64) -> f64 {
    let a = xi.abs();
    if a < 2.0 {
        let (vals, _) = backward(C64::new(a * a, 0.0), 40, 0);
        vals[0].re
    } else {
        1.0 / (a * a.tanh()) - 1.0 / (a * a)
    }
}

/// `dP_1/dξ` at real `ξ`, taken from the u-derivative so no cancellation
/// occurs for small `ξ`.
pub fn p1_prime(xi: f64) -> Result<f64> {
    let (_, d) = ratio_with_derivative(1, C64::new(xi * xi, 0.0))?;
    Ok(2.0 * xi * d.re)
}

/// `dP_1/dξ` from the closed form in terms of `P_0`; valid away from ξ = 0.
pub fn p1_prime_closed(xi: f64) -> f64 {
    let p = p0(xi);
    (xi * xi * p + 1.0 + 6.0 * p - 1.0 / p) / (xi * xi * xi * p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p0_branches_agree_with_ratio() {
        for &x in &[0.0, 1e-3, 0.05, 0.7, 1.999, 2.001, 3.0, 19.9, 80.0] {
            let cf = ratio_real(0, x).unwrap();
            assert!((cf - p0(x)).abs() <= 1e-14 * cf.abs().max(1.0), "x={x}");
        }
    }

    #[test]
    fn tail_ratio_small_u_limit() {
        // P̃_n(0) = 1/(2n+3)
        for n in 0..20 {
            let v = ratio(n, C64::new(0.0, 0.0)).unwrap();
            assert!((v.re - 1.0 / (2 * n + 3) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let u = C64::new(-3.7, 2.2);
        let a = ratio(4, u).unwrap();
        let b = ratio(4, u.conj()).unwrap();
        assert!((a - b.conj()).norm() < 1e-15);
    }

    #[test]
    fn pole_is_refused() {
        // first zero of j_0 is π, so P̃_0 has a pole at u = -π²
        let u = C64::new(-std::f64::consts::PI.powi(2) + 1e-10, 0.0);
        match ratio(0, u) {
            Err(Error::PoleProximity { n: 0, m: 1, .. }) => {}
            other => panic!("expected pole error, got {other:?}"),
        }
    }

    #[test]
    fn closed_derivative_matches() {
        for &x in &[0.4, 1.0, 2.5, 7.0] {
            let a = p1_prime(x).unwrap();
            let b = p1_prime_closed(x);
            assert!((a - b).abs() < 1e-10 * a.abs().max(1.0), "x={x}: {a} {b}");
        }
    }
}

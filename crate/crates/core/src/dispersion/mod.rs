//! The dispersion relation `h_n(s) = 0` for spherical-harmonic mode `n`,
//! the bifurcation values `μ_n`, root location in the complex plane, and the
//! stability threshold `μ*`.

pub mod contour;
mod stability;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{bessel_zeros_upto, p1_prime, ratio, ratio_real, ratio_with_derivative};
use crate::stationary::StationaryProfile;

pub use contour::{count_zeros, find_zeros, Analytic, ContourOptions, Rect, Zero};
pub use stability::{
    bifurcation_table, dominant_root, large_n_bound_check, mu_star, BifurcationTable,
    table_at_radius, LargeNReport, MuStar, MuStarOptions,
};

/// Everything needed to evaluate `h_n` for one mode at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionContext {
    pub n: usize,
    pub mu: f64,
    pub beta: f64,
    pub radius: f64,
    /// `(β + R P_0) / (β R P_0)`.
    pub k: f64,
    /// `n(n-1)(n+2) / (2R³)`.
    pub e_n: f64,
    /// `R² P_1 + 1 + βR`.
    pub boundary_factor: f64,
    /// `R P_1(R)`.
    pub rp1: f64,
    /// `n/R + β`.
    pub c: f64,
}

impl DispersionContext {
    pub fn new(n: usize, profile: &StationaryProfile) -> Result<Self> {
        let mu = profile.params.mu;
        if !(mu > 0.0) {
            return Err(Error::validation("params.mu", "dispersion needs mu > 0"));
        }
        let (r, b) = (profile.radius, profile.params.beta);
        let nf = n as f64;
        Ok(DispersionContext {
            n,
            mu,
            beta: b,
            radius: r,
            k: profile.k_factor(),
            e_n: nf * (nf - 1.0) * (nf + 2.0) / (2.0 * r * r * r),
            boundary_factor: profile.boundary_factor(),
            rp1: r * profile.p1,
            c: nf / r + b,
        })
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        DispersionContext { mu, ..*self }
    }

    /// Boundary term `N P̃ / ((s+1) R P̃ + c)` and its s-derivative. Near a pole
    /// of `P̃_n` the reciprocal `1/P̃_n = u P̃_{n+1} + 2n + 3` is used; those
    /// poles are removable for `h_n`.
    pub(crate) fn boundary_term(&self, s: C64) -> Result<(C64, C64)> {
        let r = self.radius;
        let u = (s + 1.0) * r * r;
        let nn = self.boundary_factor;
        match ratio_with_derivative(self.n, u) {
            Ok((p, dp)) => {
                let den = (s + 1.0) * r * p + self.c;
                let v = nn * p / den;
                let d = nn * (self.c * r * r * dp - r * p * p) / (den * den);
                Ok((v, d))
            }
            Err(Error::PoleProximity { .. }) => {
                let (q, dq) = ratio_with_derivative(self.n + 1, u)?;
                let inv = u * q + (2 * self.n + 3) as f64;
                let dinv = r * r * (q + u * dq);
                let den = (s + 1.0) * r + self.c * inv;
                let v = nn / den;
                let d = -nn * (r + self.c * dinv) / (den * den);
                Ok((v, d))
            }
            Err(e) => Err(e),
        }
    }

    /// `h_n(s)` and `h_n'(s)`.
    pub fn eval_with_derivative(&self, s: C64) -> Result<(C64, C64)> {
        let (b, db) = self.boundary_term(s)?;
        let v = self.k / self.mu * (s + self.e_n) - self.rp1 + b;
        let d = self.k / self.mu + db;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::DispersionPole { re: s.re, im: s.im });
        }
        Ok((v, d))
    }

    /// `h_n(s)`.
    pub fn h(&self, s: C64) -> Result<C64> {
        Ok(self.eval_with_derivative(s)?.0)
    }

    /// `|h_n(s)|` divided by the sum of the magnitudes of its three terms,
    /// i.e. the backward error of a computed zero.
    pub fn relative_residual(&self, s: C64) -> f64 {
        match self.boundary_term(s) {
            Ok((b, _)) => {
                let lead = self.k / self.mu * (s + self.e_n);
                let v = lead - self.rp1 + b;
                v.norm() / (lead.norm() + self.rp1.abs() + b.norm())
            }
            Err(_) => f64::INFINITY,
        }
    }

    /// Real poles of `h_n` in `[lo, hi]`: the zeros of
    /// `(s+1) R P̃_n + n/R + β`, one between consecutive poles of `P̃_n` and
    /// one in `(-1 - j²_1/R², -1)`.
    pub fn poles_in(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        let hi = hi.min(-1.0);
        if lo >= hi {
            return Ok(Vec::new());
        }
        let r = self.radius;
        let xmax = ((-1.0 - lo).max(0.0)).sqrt() * r;
        let zeros = bessel_zeros_upto(self.n, xmax + 4.0);
        // interval endpoints in s, descending
        let mut ends = vec![-1.0];
        ends.extend(zeros.iter().map(|j| -1.0 - j * j / (r * r)));
        let phi = |s: f64| -> Result<f64> {
            let u = (s + 1.0) * r * r;
            let p = ratio(self.n, C64::new(u, 0.0))?.re;
            Ok((s + 1.0) * r * p + self.c)
        };
        let mut out = Vec::new();
        for w in ends.windows(2) {
            let (right, left) = (w[0], w[1]);
            if right < lo {
                break;
            }
            let pad = 1e-7 * (right - left);
            let (mut a, mut b) = (left + pad, if right == -1.0 { right } else { right - pad });
            // φ increases with s on each interval
            let (fa, fb) = (phi(a)?, phi(b)?);
            if !(fa < 0.0 && fb > 0.0) {
                return Err(Error::Convergence(format!(
                    "pole bracket ({a}, {b}) for n={} lacks a sign change",
                    self.n
                )));
            }
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if phi(m)? < 0.0 {
                    a = m;
                } else {
                    b = m;
                }
                if b - a <= 4.0 * f64::EPSILON * a.abs() {
                    break;
                }
            }
            let p = 0.5 * (a + b);
            if p >= lo && p <= hi {
                out.push(p);
            }
        }
        Ok(out)
    }

    fn bound_scale(&self) -> f64 {
        self.mu * self.boundary_factor / (self.k * self.radius)
    }

    /// Upper bound on `|Im s|` over all non-real zeros.
    pub fn imag_bound(&self) -> f64 {
        self.bound_scale().sqrt()
    }

    /// Upper bound on `|Im s|` over zeros with non-negative real part.
    pub fn right_half_imag_bound(&self) -> f64 {
        let q = self.bound_scale();
        q.min(q.sqrt())
    }

    /// Upper bound on `Re s` over zeros with non-negative real part
    /// (negative when no such zero can exist).
    pub fn real_bound(&self) -> f64 {
        -self.e_n + self.mu * self.rp1 / self.k + self.bound_scale()
    }
}

/// `h_n` with the real poles inside a search region multiplied away and,
/// optionally for `n = 1`, the permanent translation zero at `s = 0`
/// divided out.
pub struct Reduced<'a> {
    pub ctx: &'a DispersionContext,
    pub poles: Vec<f64>,
    pub deflate_origin: bool,
}

impl Reduced<'_> {
    fn deflate(&self) -> bool {
        self.deflate_origin && self.ctx.n == 1
    }

    /// `h_1(s)/s` near the origin as `∫_0^1 h_1'(ts) dt`.
    fn deflated_near_origin(&self, s: C64) -> Result<C64> {
        let (x, w) = crate::special::gauss_legendre(10);
        let mut acc = C64::new(0.0, 0.0);
        for (xi, wi) in x.iter().zip(&w) {
            let t = 0.5 * (xi + 1.0);
            acc += 0.5 * wi * self.ctx.eval_with_derivative(s * t)?.1;
        }
        Ok(acc)
    }
}

impl Analytic for Reduced<'_> {
    fn eval(&self, s: C64) -> Result<(C64, C64)> {
        let (mut v, mut d) = if self.deflate() && s.norm() < 1e-2 {
            let g = self.deflated_near_origin(s)?;
            let h = 1e-4;
            let gp = self.deflated_near_origin(s + h)?;
            let gm = self.deflated_near_origin(s - h)?;
            (g, (gp - gm) / (2.0 * h))
        } else {
            let (h, dh) = self.ctx.eval_with_derivative(s)?;
            if self.deflate() {
                let g = h / s;
                (g, (dh - g) / s)
            } else {
                (h, dh)
            }
        };
        for &p in &self.poles {
            d = d * (s - p) + v;
            v *= s - p;
        }
        Ok((v, d))
    }

    fn log_derivative(&self, s: C64) -> Result<C64> {
        if self.deflate() && s.norm() < 1e-2 {
            let (v, d) = self.eval(s)?;
            return Ok(d / v);
        }
        let (h, dh) = self.ctx.eval_with_derivative(s)?;
        let mut ld = dh / h;
        if self.deflate() {
            ld -= 1.0 / s;
        }
        for &p in &self.poles {
            ld += 1.0 / (s - p);
        }
        Ok(ld)
    }
}

/// Roots of `h_n` in a region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub n: usize,
    pub mu: f64,
    pub region: Rect,
    /// Sorted by decreasing real part. `residual` is the relative residual
    /// (see [`DispersionContext::relative_residual`]).
    pub roots: Vec<Zero>,
}

impl RootSet {
    /// Member with the largest real part.
    pub fn dominant(&self) -> Option<&Zero> {
        self.roots.first()
    }
}

/// All zeros of `h_n` inside `region`, each polished by Newton.
pub fn find_roots(ctx: &DispersionContext, region: Rect, opts: &ContourOptions) -> Result<RootSet> {
    roots_impl(ctx, region, opts, false)
}

/// As [`find_roots`], but for `n = 1` the translation zero at the origin is
/// divided out first, so the set holds only the other zeros.
pub fn find_roots_excluding_translation(ctx: &DispersionContext, region: Rect, opts: &ContourOptions) -> Result<RootSet> {
    roots_impl(ctx, region, opts, true)
}

fn roots_impl(ctx: &DispersionContext, region: Rect, opts: &ContourOptions, deflate_origin: bool) -> Result<RootSet> {
    let mut region = region;
    // keep vertical edges off the real poles of h_n
    let all_poles = ctx.poles_in(region.re_min - 1.0, region.re_max + 1.0)?;
    let gap = 1e-6 * region.width().max(1.0);
    for _ in 0..8 {
        let bad = all_poles
            .iter()
            .any(|&p| (p - region.re_min).abs() < gap || (p - region.re_max).abs() < gap);
        if !bad {
            break;
        }
        region.re_min -= 1e-3 * region.width().max(1.0);
    }
    let inside: Vec<f64> = if region.im_min < 0.0 && region.im_max > 0.0 {
        all_poles
            .iter()
            .copied()
            .filter(|&p| p > region.re_min && p < region.re_max)
            .collect()
    } else {
        Vec::new()
    };
    let reduced = Reduced {
        ctx,
        poles: inside.clone(),
        deflate_origin,
    };
    let zeros = find_zeros(&reduced, &region, &inside, opts)?;
    let roots = zeros
        .into_iter()
        .map(|z| Zero {
            residual: ctx.relative_residual(z.s),
            ..z
        })
        .collect();
    Ok(RootSet {
        n: ctx.n,
        mu: ctx.mu,
        region,
        roots,
    })
}

/// `μ_n`: the value of μ at which `h_n(0) = 0`, for `n >= 2`, and the
/// double-zero value `μ_1` for `n = 1`.
pub fn mu_bifurcation(n: usize, radius: f64, beta: f64) -> Result<f64> {
    if !(radius > 0.0) || !(beta > 0.0) {
        return Err(Error::Domain {
            what: "mu_bifurcation needs R > 0 and beta > 0",
            value: radius.min(beta),
        });
    }
    let p0 = crate::special::p0(radius);
    let p1 = ratio_real(1, radius)?;
    let k = (beta + radius * p0) / (beta * radius * p0);
    let nn = radius * radius * p1 + 1.0 + beta * radius;
    match n {
        0 => Err(Error::Domain {
            what: "mu_bifurcation is defined for n >= 1",
            value: 0.0,
        }),
        1 => {
            let dp1 = p1_prime(radius)?;
            let den = radius * p1 * p1 - 0.5 * (1.0 + beta * radius) * dp1;
            if !(den > 0.0) {
                return Err(Error::Denominator { n, value: den });
            }
            Ok(k * nn / (radius * radius * den))
        }
        _ => {
            let nf = n as f64;
            let pn = ratio_real(n, radius)?;
            let e_n = nf * (nf - 1.0) * (nf + 2.0) / (2.0 * radius.powi(3));
            let den = (nf + beta * radius) * p1 - (1.0 + beta * radius) * pn;
            if !(den > 0.0) {
                return Err(Error::Denominator { n, value: den });
            }
            Ok(k * e_n * (radius * pn + nf / radius + beta) / den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stationary::ModelParams;

    fn profile(mu: f64) -> StationaryProfile {
        StationaryProfile::new(ModelParams::new(1.0, 0.5, mu).unwrap()).unwrap()
    }

    #[test]
    fn translation_zero() {
        let p = profile(3.0);
        let ctx = DispersionContext::new(1, &p).unwrap();
        assert!(ctx.h(C64::new(0.0, 0.0)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn derivative_matches_difference() {
        let p = profile(4.0);
        for n in [0, 1, 2, 5] {
            let ctx = DispersionContext::new(n, &p).unwrap();
            let s = C64::new(-0.7, 0.9);
            let (_, d) = ctx.eval_with_derivative(s).unwrap();
            let h = 1e-5;
            let fd = (ctx.h(s + h).unwrap() - ctx.h(s - h).unwrap()) / (2.0 * h);
            assert!((d - fd).norm() < 1e-7 * d.norm().max(1.0), "n={n}");
        }
    }

    #[test]
    fn ratio_pole_is_removable() {
        let p = profile(2.0);
        let ctx = DispersionContext::new(2, &p).unwrap();
        let j = crate::special::bessel_zeros(2, 1)[0];
        let s_pole = -1.0 - j * j / (p.radius * p.radius);
        let at = ctx.h(C64::new(s_pole, 0.0)).unwrap();
        let near = ctx.h(C64::new(s_pole + 1e-6, 0.0)).unwrap();
        assert!((at - near).norm() < 1e-4);
    }

    #[test]
    fn poles_interlace() {
        let p = profile(2.0);
        let ctx = DispersionContext::new(3, &p).unwrap();
        let poles = ctx.poles_in(-60.0, 0.0).unwrap();
        assert!(!poles.is_empty());
        for &q in &poles {
            let v = ctx.h(C64::new(q + 1e-9, 0.0));
            assert!(v.map(|v| v.norm() > 1e3).unwrap_or(true));
        }
    }
}

//! Transform-domain solution of one mode and its numerical inversion.
//!
//! For each `s` the boundary amplitude is
//! `ρ̂(s) = (n+βR)/(βR) · K/(μ h_n(s)) · B(s)` where the bracket `B` collects
//! the initial amplitude, the boundary fluxes of two radial problems driven
//! by the initial nutrient perturbation, and the forcing terms. Inversion
//! uses a Talbot contour wrapped around the negative real axis.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::grid::{RadialGrid, RadialOperator};
use super::stepper::LaplaceForcing;
use crate::dispersion::{find_roots, ContourOptions, DispersionContext, Rect};
use crate::error::{Error, Result};
use crate::stationary::StationaryProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TalbotOptions {
    /// Number of contour nodes in the upper half plane.
    pub nodes: usize,
    /// Contour parameter `r = scale · nodes / t`.
    pub scale: f64,
    /// Horizontal shift of the contour.
    pub shift: f64,
    /// For `n = 1`: the data has been recentered, so the bracket vanishes
    /// at `s = 0` and the translation zero is not a singularity.
    pub recentered: bool,
}

impl Default for TalbotOptions {
    fn default() -> Self {
        TalbotOptions {
            nodes: 64,
            scale: 0.2,
            shift: 0.0,
            recentered: false,
        }
    }
}

fn contour_radius(t: f64, opts: &TalbotOptions) -> f64 {
    opts.scale * opts.nodes as f64 / t
}

/// Point of the contour at angle `θ` and the weight factor `1 + iσ(θ)`.
fn contour_point(theta: f64, r: f64, shift: f64) -> (C64, C64) {
    if theta == 0.0 {
        return (C64::new(shift + r, 0.0), C64::new(1.0, 0.0));
    }
    let cot = 1.0 / theta.tan();
    let s = C64::new(shift + r * theta * cot, r * theta);
    let sigma = theta + (theta * cot - 1.0) * cot;
    (s, C64::new(1.0, sigma))
}

/// Inverts `f` at time `t > 0`. `f` need not be real on the real axis: both
/// halves of the contour are evaluated.
pub fn talbot(f: &dyn Fn(C64) -> Result<C64>, t: f64, opts: &TalbotOptions) -> Result<C64> {
    if !(t > 0.0) {
        return Err(Error::Domain {
            what: "Talbot inversion needs t > 0",
            value: t,
        });
    }
    let m = opts.nodes;
    let r = contour_radius(t, opts);
    let (s0, _) = contour_point(0.0, r, opts.shift);
    let mut acc = 0.5 * (t * s0).exp() * f(s0)?;
    for k in 1..m {
        let theta = k as f64 * std::f64::consts::PI / m as f64;
        let (s, w) = contour_point(theta, r, opts.shift);
        let sc = s.conj();
        acc += 0.5 * ((t * s).exp() * f(s)? * w + (t * sc).exp() * f(sc)? * w.conj());
    }
    Ok(acc * r / m as f64)
}

/// True if the pole `p` lies inside the contour (left of it).
fn encloses(p: C64, r: f64, shift: f64) -> bool {
    let theta = p.im.abs() / r;
    if theta >= std::f64::consts::PI {
        return false;
    }
    let edge = if theta == 0.0 {
        shift + r
    } else {
        shift + r * theta / theta.tan()
    };
    p.re < edge
}

/// Initial data of one mode in the transform-domain formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeInit {
    pub rho0: C64,
    pub w0: Vec<C64>,
}

/// `ρ̂(s)` for one mode.
pub struct ModeTransform<'a> {
    ctx: DispersionContext,
    profile: StationaryProfile,
    grid: RadialGrid,
    init: ModeInit,
    forcing: &'a dyn LaplaceForcing,
    /// `∂_r` at R of the μ-free pressure-type problem with the initial data.
    flux_w0_static: Option<C64>,
}

impl<'a> ModeTransform<'a> {
    pub fn new(
        n: usize,
        init: ModeInit,
        forcing: &'a dyn LaplaceForcing,
        profile: &StationaryProfile,
        grid: &RadialGrid,
    ) -> Result<Self> {
        grid.check(init.w0.len())?;
        let ctx = DispersionContext::new(n, profile)?;
        let nonzero = init.w0.iter().any(|v| v.norm() > 0.0);
        let flux_w0_static = if nonzero {
            Some(static_flux(n, &init.w0, profile, grid)?)
        } else {
            None
        };
        Ok(ModeTransform {
            ctx,
            profile: *profile,
            grid: grid.clone(),
            init,
            forcing,
            flux_w0_static,
        })
    }

    pub fn context(&self) -> &DispersionContext {
        &self.ctx
    }

    /// The bracket `B(s)`.
    pub fn bracket(&self, s: C64) -> Result<C64> {
        let n = self.ctx.n;
        let nf = n as f64;
        let beta = self.profile.params.beta;
        let mu = self.profile.params.mu;
        let r = self.profile.radius;
        let br = beta * r;
        let sp1 = s + 1.0;
        let mut out = br / (nf + br) * self.init.rho0;
        if let Some(phi) = self.flux_w0_static {
            let xi = shifted_flux(n, sp1, &self.init.w0, beta, &self.grid)?;
            out += mu / sp1 * (xi - phi);
        }
        let eps = self.forcing.eps();
        if eps != 0.0 {
            let mut e = C64::new(0.0, 0.0);
            if let Some(f1) = self.forcing.f1_hat(s, &self.grid) {
                let xi = shifted_flux(n, sp1, &f1, beta, &self.grid)?;
                let phi = static_flux(n, &f1, &self.profile, &self.grid)?;
                e += mu / sp1 * (xi - phi);
            }
            if let Some(f2) = self.forcing.f2_hat(s, &self.grid) {
                e -= static_flux(n, &f2, &self.profile, &self.grid)?;
            }
            let [b1, b2, b3] = self.forcing.b_hat(s);
            let tail = self.ctx.boundary_term(s)?.0 / self.profile.boundary_factor();
            e += br / (nf + br) * b1 + br * r / (nf + br) * mu * b2 * tail - nf * beta / (nf + br) * b3;
            out += eps * e;
        }
        Ok(out)
    }

    /// `ρ̂(s)`.
    pub fn eval(&self, s: C64) -> Result<C64> {
        let nf = self.ctx.n as f64;
        let br = self.profile.params.beta * self.profile.radius;
        let h = self.ctx.h(s)?;
        let pre = (nf + br) / br * self.profile.k_factor() / self.profile.params.mu;
        Ok(pre * self.bracket(s)? / h)
    }
}

/// Flux at R of `-Δu + (n(n+1)/r² + c) u = f`, `∂_r u + βu = 0`.
fn shifted_flux(n: usize, c: C64, f: &[C64], beta: f64, grid: &RadialGrid) -> Result<C64> {
    let op = RadialOperator::new(n, c, 1.0, beta, grid)?;
    Ok(op.solve(f, C64::new(0.0, 0.0))?.boundary_derivative)
}

fn static_flux(n: usize, f: &[C64], profile: &StationaryProfile, grid: &RadialGrid) -> Result<C64> {
    shifted_flux(n, C64::new(0.0, 0.0), f, profile.params.beta, grid)
}

/// `ρ(t)` at each requested time from the transform-domain formula.
pub fn laplace_mode_solution(
    n: usize,
    init: &ModeInit,
    forcing: &dyn LaplaceForcing,
    profile: &StationaryProfile,
    grid: &RadialGrid,
    t_list: &[f64],
    opts: &TalbotOptions,
) -> Result<Vec<C64>> {
    let tr = ModeTransform::new(n, init.clone(), forcing, profile, grid)?;
    let zeros = singular_zeros(&tr, opts)?;
    let mut out = Vec::with_capacity(t_list.len());
    for &t in t_list {
        if !(t > 0.0) {
            return Err(Error::Domain {
                what: "inversion times must be positive",
                value: t,
            });
        }
        let r = contour_radius(t, opts);
        for &p in &zeros {
            if !encloses(p, r, opts.shift) {
                return Err(Error::Contour(format!(
                    "zero {p} of h_{n} lies outside the contour at t = {t}; try shift >= {:.3} or a larger scale",
                    suggested_shift(p, r)
                )));
            }
            let closest = nearest_node(p, r, opts);
            if closest < 1e-8 * p.norm().max(1.0) {
                return Err(Error::Contour(format!(
                    "contour at t = {t} passes within {closest:e} of the zero {p} of h_{n}; try shift = {:.3}",
                    opts.shift + 0.1 * r
                )));
            }
        }
        out.push(talbot(&|s| tr.eval(s), t, opts)?);
    }
    Ok(out)
}

/// Zeros of `h_n` that act as singularities of `ρ̂`: every zero in a window
/// around the right part of the spectrum, minus `s = 0` for recentered
/// `n = 1` data.
fn singular_zeros(tr: &ModeTransform, opts: &TalbotOptions) -> Result<Vec<C64>> {
    let ctx = tr.context();
    let right = ctx.real_bound().max(0.0) + 1.0;
    let y = ctx.imag_bound() + 1.0;
    let set = find_roots(ctx, Rect::new(-20.0, right, -y, y), &ContourOptions::default())?;
    Ok(set
        .roots
        .iter()
        .map(|z| z.s)
        .filter(|s| !(opts.recentered && ctx.n == 1 && s.norm() < 1e-8))
        .collect())
}

fn suggested_shift(p: C64, r: f64) -> f64 {
    // put the pole a quarter of the way into the opening at its height
    let theta = (p.im.abs() / r).min(3.0);
    let edge = if theta == 0.0 { r } else { r * theta / theta.tan() };
    p.re - edge + 0.25 * r
}

fn nearest_node(p: C64, r: f64, opts: &TalbotOptions) -> f64 {
    (0..opts.nodes)
        .map(|k| {
            let theta = k as f64 * std::f64::consts::PI / opts.nodes as f64;
            let s = contour_point(theta, r, opts.shift).0;
            (s - p).norm().min((s.conj() - p).norm())
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_known_transforms() {
        let opts = TalbotOptions::default();
        for &t in &[0.1, 0.5, 1.0, 3.0, 10.0] {
            let a = talbot(&|s| Ok(1.0 / (s + 1.0)), t, &opts).unwrap();
            assert!((a - (-t).exp()).norm() < 1e-10, "t={t} {a}");
            let b = talbot(&|s| Ok(1.0 / (s * s + 1.0)), t, &opts).unwrap();
            assert!((b - t.sin()).norm() < 1e-9, "t={t} {b}");
            // complex-valued transform of e^{(-1+2i)t}
            let c = talbot(&|s| Ok(1.0 / (s - C64::new(-1.0, 2.0))), t, &opts).unwrap();
            let want = (C64::new(-1.0, 2.0) * t).exp();
            assert!((c - want).norm() < 1e-9, "t={t} {c}");
        }
    }

    #[test]
    fn enclosure_test() {
        assert!(encloses(C64::new(-1.0, 0.5), 2.0, 0.0));
        assert!(!encloses(C64::new(1.0, 0.0), 0.5, 0.0));
        assert!(!encloses(C64::new(-1.0, 10.0), 2.0, 0.0));
    }
}

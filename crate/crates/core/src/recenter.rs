//! Choice of a new center for the perturbed sphere.
//!
//! A translation of the origin by `a` changes the degree-one data by
//! `ρ → ρ - b`, `w → w + b σ_S'` where `b` are the `Y_{1,m}` coefficients of
//! `a · x̂`. The degree-one transform numerator at `s = 0` is affine in `b`
//! with slope `Q`, so a zero of it exists whenever `Q ≠ 0`, that is away
//! from the bifurcation value `μ_1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dispersion::mu_bifurcation;
use crate::error::{Error, Result};
use crate::evolution::{RadialGrid, RadialOperator};
use crate::stationary::StationaryProfile;

/// Below this `|Q|` the translation is refused.
pub const Q_FLOOR: f64 = 1e-10;

/// Boundary fluxes of the two degree-one problems driven by `σ_S'`: one
/// with shift 1 (nutrient type) and one with shift 0 scaled by μ (pressure
/// type), both with `∂_r u + β u = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDerivs {
    pub xi_closed: f64,
    pub phi_closed: f64,
    pub xi_numeric: f64,
    pub phi_numeric: f64,
    pub cells: usize,
}

impl BoundaryDerivs {
    pub fn max_discrepancy(&self) -> f64 {
        (self.xi_closed - self.xi_numeric)
            .abs()
            .max((self.phi_closed - self.phi_numeric).abs())
    }
}

/// Closed form of the nutrient-type flux; independent of μ.
pub fn xi_flux_closed(profile: &StationaryProfile) -> f64 {
    let (b, r, p) = (profile.params.beta, profile.radius, profile.p0);
    let a = b / (b + r * p);
    (b + r * p) / (p * profile.boundary_factor()) * a * a * (-1.5 * r * p - 0.5 * r * r * r * p * p + 0.5 * r)
}

/// Closed form of the pressure-type flux: `-μ σ_S''(R) + μ λ / (1 + βR)`.
pub fn phi_flux_closed(profile: &StationaryProfile) -> f64 {
    let mu = profile.params.mu;
    let (b, r) = (profile.params.beta, profile.radius);
    -mu * profile.sigma_second(r) + mu * profile.lambda / (1.0 + b * r)
}

/// The two degree-one operators used at `s = 0`.
struct DegreeOne {
    xi: RadialOperator,
    phi: RadialOperator,
    mu: f64,
}

impl DegreeOne {
    fn new(profile: &StationaryProfile, grid: &RadialGrid) -> Result<Self> {
        if (profile.radius - grid.radius).abs() > 1e-12 * profile.radius {
            return Err(Error::validation("grid.radius", "grid radius differs from the stationary radius"));
        }
        let beta = profile.params.beta;
        Ok(DegreeOne {
            xi: RadialOperator::new(1, C64::new(1.0, 0.0), 1.0, beta, grid)?,
            phi: RadialOperator::new(1, C64::new(0.0, 0.0), 1.0, beta, grid)?,
            mu: profile.params.mu,
        })
    }

    /// `(∂_r ξ(R), ∂_r φ(R))` for source `f`; φ carries the factor μ.
    fn fluxes(&self, f: &[C64]) -> Result<(C64, C64)> {
        let zero = C64::new(0.0, 0.0);
        let xi = self.xi.solve(f, zero)?.boundary_derivative;
        let phi = self.phi.solve(f, zero)?.boundary_derivative * self.mu;
        Ok((xi, phi))
    }

    /// `μ ∂_r ξ(R) - ∂_r φ(R)`.
    fn combination(&self, f: &[C64]) -> Result<C64> {
        let (xi, phi) = self.fluxes(f)?;
        Ok(self.mu * xi - phi)
    }
}

/// Closed-form and grid values of both boundary fluxes.
pub fn boundary_derivs(profile: &StationaryProfile, grid: &RadialGrid) -> Result<BoundaryDerivs> {
    let ops = DegreeOne::new(profile, grid)?;
    let src = grid.sample(|r| profile.sigma_prime(r));
    let (xi, phi) = ops.fluxes(&src)?;
    Ok(BoundaryDerivs {
        xi_closed: xi_flux_closed(profile),
        phi_closed: phi_flux_closed(profile),
        xi_numeric: xi.re,
        phi_numeric: phi.re,
        cells: grid.cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QCoefficient {
    /// `βR/(1+βR) · (μ/μ_1 - 1)`.
    pub closed: f64,
    /// `-βR/(1+βR) + μ ∂_r ξ(R) - ∂_r φ(R)` from the closed-form fluxes.
    pub assembled: f64,
    pub mu_1: f64,
}

/// `Q` in closed form, together with its value assembled from the two
/// closed-form boundary fluxes.
pub fn q_coefficient(profile: &StationaryProfile) -> Result<QCoefficient> {
    let (b, r, mu) = (profile.params.beta, profile.radius, profile.params.mu);
    let br = b * r / (1.0 + b * r);
    let mu_1 = mu_bifurcation(1, r, b)?;
    let closed = br * (-1.0 + mu / mu_1);
    let assembled = -br + mu * xi_flux_closed(profile) - phi_flux_closed(profile);
    if (closed - assembled).abs() > 1e-8 * closed.abs().max(1.0) {
        log::warn!("Q closed form {closed} and assembled form {assembled} disagree");
    }
    Ok(QCoefficient {
        closed,
        assembled,
        mu_1,
    })
}

/// Degree-one initial data indexed by `m + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode1Data {
    pub rho: [C64; 3],
    pub w: [Vec<C64>; 3],
}

impl Mode1Data {
    pub fn zero(grid: &RadialGrid) -> Self {
        let z = vec![C64::new(0.0, 0.0); grid.cells];
        Mode1Data {
            rho: [C64::new(0.0, 0.0); 3],
            w: [z.clone(), z.clone(), z],
        }
    }

    /// Data of a rigid translation with coefficients `b`:
    /// `ρ = b`, `w = -b σ_S'`.
    pub fn translation(b: [C64; 3], profile: &StationaryProfile, grid: &RadialGrid) -> Self {
        let sp = grid.sample(|r| profile.sigma_prime(r));
        Mode1Data {
            rho: b,
            w: b.map(|bm| sp.iter().map(|v| -bm * v).collect()),
        }
    }

    /// Data seen from an origin moved by the translation with coefficients `b`.
    pub fn shifted(&self, b: [C64; 3], profile: &StationaryProfile, grid: &RadialGrid) -> Self {
        let sp = grid.sample(|r| profile.sigma_prime(r));
        let mut out = self.clone();
        for m in 0..3 {
            out.rho[m] -= b[m];
            for (v, s) in out.w[m].iter_mut().zip(&sp) {
                *v += b[m] * s;
            }
        }
        out
    }
}

fn sqrt_8pi_3() -> f64 {
    (8.0 * std::f64::consts::PI / 3.0).sqrt()
}

fn sqrt_4pi_3() -> f64 {
    (4.0 * std::f64::consts::PI / 3.0).sqrt()
}

/// Translation vector from degree-one coefficients (complex in general;
/// real for real data).
pub fn a_from_b(b: [C64; 3]) -> [C64; 3] {
    [
        (b[0] - b[2]) / sqrt_8pi_3(),
        -C64::i() * (b[0] + b[2]) / sqrt_8pi_3(),
        b[1] / sqrt_4pi_3(),
    ]
}

pub fn b_from_a(a: [f64; 3]) -> [C64; 3] {
    let k = 0.5 * sqrt_8pi_3();
    [
        k * C64::new(a[0], a[1]),
        C64::new(a[2] * sqrt_4pi_3(), 0.0),
        k * C64::new(-a[0], a[1]),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterShift {
    /// Real part of the translation vector.
    pub a: [f64; 3],
    /// Largest `|Im a_i|`; zero up to rounding for real data.
    pub a_imag: f64,
    pub b: [C64; 3],
    /// Slope of the numerator in `b` on the grid used.
    pub q: f64,
    /// `|Q b_m + G_m|`.
    pub residuals: [f64; 3],
    /// Numerator recomputed from the shifted data.
    pub shifted_residuals: [f64; 3],
    pub contraction_factor: Option<f64>,
    /// `‖F‖` after each fixed-point iteration.
    pub history: Vec<f64>,
}

/// Numerator of the degree-one transform at `s = 0` for each m, and the
/// grid value of `Q`.
struct Numerator {
    ops: DegreeOne,
    q: f64,
    br: f64,
}

impl Numerator {
    fn new(profile: &StationaryProfile, grid: &RadialGrid) -> Result<Self> {
        let ops = DegreeOne::new(profile, grid)?;
        let br = profile.params.beta * profile.radius / (1.0 + profile.params.beta * profile.radius);
        let sp = grid.sample(|r| profile.sigma_prime(r));
        let q = -br + ops.combination(&sp)?.re;
        Ok(Numerator { ops, q, br })
    }

    fn eval(&self, data: &Mode1Data) -> Result<[C64; 3]> {
        let mut out = [C64::new(0.0, 0.0); 3];
        for m in 0..3 {
            out[m] = self.br * data.rho[m] + self.ops.combination(&data.w[m])?;
        }
        Ok(out)
    }
}

/// Linear-order translation: the `b` that makes the degree-one numerator
/// vanish at `s = 0`.
pub fn mode1_translation(data: &Mode1Data, profile: &StationaryProfile, grid: &RadialGrid) -> Result<CenterShift> {
    for w in &data.w {
        grid.check(w.len())?;
    }
    let num = Numerator::new(profile, grid)?;
    if num.q.abs() < Q_FLOOR {
        return Err(Error::NearBifurcation { q: num.q });
    }
    let g = num.eval(data)?;
    let b = g.map(|gm| -gm / num.q);
    let residuals = [0, 1, 2].map(|m| (num.q * b[m] + g[m]).norm());
    let after = num.eval(&data.shifted(b, profile, grid))?;
    let a = a_from_b(b);
    Ok(CenterShift {
        a: a.map(|x| x.re),
        a_imag: a.iter().map(|x| x.im.abs()).fold(0.0, f64::max),
        b,
        q: num.q,
        residuals,
        shifted_residuals: after.map(|x| x.norm()),
        contraction_factor: None,
        history: Vec::new(),
    })
}

/// Degree-one numerator after translating by `a`, in translation
/// coordinates; the linear part of the recentering equation.
pub fn numerator_in_a(data: &Mode1Data, profile: &StationaryProfile, grid: &RadialGrid) -> Result<impl Fn(&[f64]) -> Vec<f64>> {
    let num = Numerator::new(profile, grid)?;
    if num.q.abs() < Q_FLOOR {
        return Err(Error::NearBifurcation { q: num.q });
    }
    let g0 = num.eval(data)?;
    let q = num.q;
    // affine in b, so precompute and map
    Ok(move |a: &[f64]| {
        let b = b_from_a([a[0], a[1], a[2]]);
        let f = [0, 1, 2].map(|m| g0[m] + q * b[m]);
        a_from_b(f).iter().map(|x| x.re).collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Largest admissible condition number of the linear part's Jacobian.
    pub max_condition: f64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions {
            tol: 1e-10,
            max_iter: 200,
            max_condition: 1e12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub x: Vec<f64>,
    /// `‖F_1(x) + ε G(x)‖`.
    pub residual: f64,
    /// Largest observed ratio of successive step lengths.
    pub contraction_factor: f64,
    pub history: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn jacobian(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let m = f(x).len();
    let mut j = DMatrix::zeros(m, n);
    for k in 0..n {
        let h = 1e-6 * x[k].abs().max(1.0);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[k] += h;
        xm[k] -= h;
        let (fp, fm) = (f(&xp), f(&xm));
        for i in 0..m {
            j[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    j
}

/// Solves `F_1(x) + ε G(x) = 0` near `a0` (where `F_1(a0) = 0`) by the
/// iteration `x ← F_1⁻¹(-ε G(x))` inside the ball of radius `k` about `a0`.
/// `F_1` is inverted by chord Newton with its Jacobian at `a0`.
pub fn fixed_point_solve(
    f1: &dyn Fn(&[f64]) -> Vec<f64>,
    g: &dyn Fn(&[f64]) -> Vec<f64>,
    a0: &[f64],
    eps: f64,
    k: f64,
    opts: &FixedPointOptions,
) -> Result<FixedPoint> {
    let dim = a0.len();
    let f0 = f1(a0);
    if f0.len() != dim {
        return Err(Error::GridMismatch {
            expected: dim,
            got: f0.len(),
        });
    }
    let j = jacobian(f1, a0);
    let sv = j.clone().svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    // a vanishing Jacobian is singular whatever its condition number says
    let cond = if smin > 0.0 && smax > 1e-8 { smax / smin } else { f64::INFINITY };
    if !(cond <= opts.max_condition) {
        return Err(Error::Singular { cond });
    }
    let scale = smax * norm(a0).max(1.0);
    if norm(&f0) > 1e-8 * scale {
        return Err(Error::validation(
            "fixed_point.a0",
            format!("F_1(a0) = {:e} is not zero", norm(&f0)),
        ));
    }
    if eps == 0.0 {
        return Ok(FixedPoint {
            x: a0.to_vec(),
            residual: norm(&f0),
            contraction_factor: 0.0,
            history: Vec::new(),
        });
    }
    let lu = j.lu();

    // F_1⁻¹(target), started from `start`
    let invert = |target: &[f64], start: &[f64]| -> Result<Vec<f64>> {
        let mut y = start.to_vec();
        let mut last = f64::INFINITY;
        for _ in 0..100 {
            let r: Vec<f64> = f1(&y).iter().zip(target).map(|(a, b)| a - b).collect();
            let rn = norm(&r);
            if rn <= 1e-14 * scale {
                return Ok(y);
            }
            if rn > last {
                return Err(Error::NonContraction { factor: rn / last });
            }
            last = rn;
            let d = lu
                .solve(&DVector::from_vec(r))
                .ok_or(Error::Singular { cond: f64::INFINITY })?;
            for (yi, di) in y.iter_mut().zip(d.iter()) {
                *yi -= di;
            }
        }
        Ok(y)
    };

    let total = |x: &[f64]| -> f64 {
        let a = f1(x);
        let b = g(x);
        norm(&a.iter().zip(&b).map(|(p, q)| p + eps * q).collect::<Vec<_>>())
    };

    let mut x = a0.to_vec();
    let mut prev_step: Option<f64> = None;
    let mut factor: f64 = 0.0;
    let mut history = Vec::new();
    for _ in 0..opts.max_iter {
        let target: Vec<f64> = g(&x).iter().map(|v| -eps * v).collect();
        let next = invert(&target, &x)?;
        let step = norm(&next.iter().zip(&x).map(|(p, q)| p - q).collect::<Vec<_>>());
        if let Some(ps) = prev_step {
            if ps > 1e-14 * scale {
                let ratio = step / ps;
                factor = factor.max(ratio);
                if ratio >= 1.0 {
                    return Err(Error::NonContraction { factor: ratio });
                }
            }
        }
        prev_step = Some(step);
        x = next;
        let dist = norm(&x.iter().zip(a0).map(|(p, q)| p - q).collect::<Vec<_>>());
        if dist > k {
            return Err(Error::NonContraction { factor: factor.max(1.0) });
        }
        let res = total(&x);
        history.push(res);
        if res <= opts.tol {
            return Ok(FixedPoint {
                x,
                residual: res,
                contraction_factor: factor,
                history,
            });
        }
    }
    Err(Error::Convergence(format!(
        "fixed-point iteration stalled at residual {:e}",
        history.last().copied().unwrap_or(f64::NAN)
    )))
}

/// Full recentering: the translation `a` with
/// `numerator(a) + ε G(a) = 0`, starting from the linear-order translation.
pub fn recenter_fixed_point(
    data: &Mode1Data,
    g: &dyn Fn(&[f64]) -> Vec<f64>,
    eps: f64,
    k: f64,
    profile: &StationaryProfile,
    grid: &RadialGrid,
    opts: &FixedPointOptions,
) -> Result<CenterShift> {
    let linear = mode1_translation(data, profile, grid)?;
    let f1 = numerator_in_a(data, profile, grid)?;
    let fp = fixed_point_solve(&f1, g, &linear.a, eps, k, opts)?;
    let a = [fp.x[0], fp.x[1], fp.x[2]];
    let b = b_from_a(a);
    let num = Numerator::new(profile, grid)?;
    let g0 = num.eval(data)?;
    let after = num.eval(&data.shifted(b, profile, grid))?;
    Ok(CenterShift {
        a,
        a_imag: linear.a_imag,
        b,
        q: num.q,
        residuals: [0, 1, 2].map(|m| (num.q * b[m] + g0[m]).norm()),
        shifted_residuals: after.map(|x| x.norm()),
        contraction_factor: Some(fp.contraction_factor),
        history: fp.history,
    })
}

//! The radially symmetric stationary tumor: its radius, nutrient and
//! pressure profiles, and the boundary coefficients the stability analysis
//! needs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{p0, p1_prime, ratio_real, ratio_with_derivative};

/// Model parameters. `mu` may be zero when only μ-independent quantities
/// are needed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Vasculature (boundary transfer) strength.
    pub beta: f64,
    /// Proliferation threshold relative to the external nutrient level.
    pub sigma_tilde: f64,
    /// Tumor aggressiveness.
    pub mu: f64,
}

impl ModelParams {
    pub fn new(beta: f64, sigma_tilde: f64, mu: f64) -> Result<Self> {
        let p = ModelParams {
            beta,
            sigma_tilde,
            mu,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::validation("params.beta", "must be positive and finite"));
        }
        if !(self.sigma_tilde > 0.0 && self.sigma_tilde < 1.0) {
            return Err(Error::validation("params.sigma_tilde", "must lie in (0, 1)"));
        }
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return Err(Error::validation("params.mu", "must be non-negative and finite"));
        }
        Ok(())
    }

    pub fn with_mu(self, mu: f64) -> Self {
        ModelParams { mu, ..self }
    }
}

/// Left side of the radius equation: `β P_0(R) / (β + R P_0(R))`.
pub fn radius_equation_lhs(beta: f64, r: f64) -> f64 {
    let p = p0(r);
    beta * p / (beta + r * p)
}

fn radius_equation_derivative(beta: f64, r: f64) -> Result<f64> {
    let (p, dp_du) = ratio_with_derivative(0, (r * r).into())?;
    let (p, dp) = (p.re, 2.0 * r * dp_du.re);
    let den = beta + r * p;
    Ok(beta * (beta * dp - p * p) / (den * den))
}

/// Radius of the stationary tumor: the unique root of
/// `β P_0(R) / (β + R P_0(R)) = σ̃/3`.
pub fn solve_radius(beta: f64, sigma_tilde: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::validation("params.beta", "must be positive and finite"));
    }
    if !(sigma_tilde > 0.0 && sigma_tilde < 1.0) {
        return Err(Error::NoRoot(format!(
            "stationary radius needs sigma_tilde in (0, 1), got {sigma_tilde}"
        )));
    }
    let target = sigma_tilde / 3.0;
    let f = |r: f64| radius_equation_lhs(beta, r) - target;
    let (mut lo, mut hi) = (1e-3, 50.0);
    while f(lo) < 0.0 {
        lo *= 0.1;
        if lo < 1e-300 {
            return Err(Error::NoRoot("radius bracket underflow".into()));
        }
    }
    while f(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoRoot("radius bracket exceeded 1e12".into()));
        }
    }
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut r = 0.5 * (lo + hi);
    for _ in 0..2 {
        let step = f(r) / radius_equation_derivative(beta, r)?;
        let cand = r - step;
        if cand.is_finite() && f(cand).abs() <= f(r).abs() {
            r = cand;
        }
    }
    Ok(r)
}

/// `sinh(r) / sinh(R)` without overflow.
fn sinh_ratio(r: f64, big_r: f64) -> f64 {
    (r - big_r).exp() * (-(-2.0 * r).exp_m1()) / (-(-2.0 * big_r).exp_m1())
}

/// `sinh(r)/r` and its first two derivatives, with series near the origin.
fn sinhc(r: f64) -> (f64, f64, f64) {
    if r < 1e-3 {
        let r2 = r * r;
        (
            1.0 + r2 / 6.0 + r2 * r2 / 120.0,
            r / 3.0 + r * r2 / 30.0,
            1.0 / 3.0 + r2 / 10.0,
        )
    } else if r < 1e-2 {
        let r2 = r * r;
        let (s, c) = (r.sinh(), r.cosh());
        (
            s / r,
            r / 3.0 + r * r2 / 30.0 + r * r2 * r2 / 840.0,
            s / r - 2.0 * c / r2 + 2.0 * s / (r2 * r),
        )
    } else {
        let (s, c) = (r.sinh(), r.cosh());
        (s / r, c / r - s / (r * r), s / r - 2.0 * c / (r * r) + 2.0 * s / (r * r * r))
    }
}

/// The stationary solution and the boundary constants derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryProfile {
    pub params: ModelParams,
    pub radius: f64,
    /// Nutrient level at the boundary, `β / (β + R P_0(R))`.
    pub boundary_sigma: f64,
    /// Additive pressure constant.
    pub c1: f64,
    /// `σ_S''(R) + β σ_S'(R)`.
    pub lambda: f64,
    pub p0: f64,
    pub p1: f64,
    pub p1_prime: f64,
}

impl StationaryProfile {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        let radius = solve_radius(params.beta, params.sigma_tilde)?;
        Self::with_radius(params, radius)
    }

    /// Profile at a known radius (for example one read from a cache).
    pub fn with_radius(params: ModelParams, radius: f64) -> Result<Self> {
        let (beta, st, mu) = (params.beta, params.sigma_tilde, params.mu);
        let p0v = p0(radius);
        let p1v = ratio_real(1, radius)?;
        let a = beta / (beta + radius * p0v);
        let c1 = 1.0 / radius + mu * a - mu * st * radius * radius / 6.0;
        let lambda = beta * p0v / (beta + radius * p0v)
            * (radius * radius * p1v + 1.0 + beta * radius);
        Ok(StationaryProfile {
            params,
            radius,
            boundary_sigma: a,
            c1,
            lambda,
            p0: p0v,
            p1: p1v,
            p1_prime: p1_prime(radius)?,
        })
    }

    /// Same radius and nutrient profile, different aggressiveness.
    pub fn with_mu(&self, mu: f64) -> Self {
        let params = self.params.with_mu(mu);
        let r = self.radius;
        StationaryProfile {
            params,
            c1: 1.0 / r + mu * self.boundary_sigma - mu * params.sigma_tilde * r * r / 6.0,
            ..*self
        }
    }

    /// `A R / sinh R`, so that `σ_S(r) = scale · sinh(r)/r`.
    fn sigma_scale(&self) -> f64 {
        let r = self.radius;
        self.boundary_sigma * r * 2.0 * (-r).exp() / (-(-2.0 * r).exp_m1())
    }

    pub fn sigma(&self, r: f64) -> f64 {
        if r < 1e-2 {
            return self.sigma_scale() * sinhc(r).0;
        }
        self.boundary_sigma * self.radius / r * sinh_ratio(r, self.radius)
    }

    pub fn sigma_prime(&self, r: f64) -> f64 {
        if r < 1e-2 {
            return self.sigma_scale() * sinhc(r).1;
        }
        // d/dr [sinh r / r] / sinh R = (coth r / r - 1/r²) sinh r / sinh R
        let cr = 1.0 / r.tanh();
        self.boundary_sigma * self.radius * sinh_ratio(r, self.radius) * (cr / r - 1.0 / (r * r))
    }

    pub fn sigma_second(&self, r: f64) -> f64 {
        if r < 1e-2 {
            return self.sigma_scale() * sinhc(r).2;
        }
        let cr = 1.0 / r.tanh();
        let rr = r * r;
        self.boundary_sigma
            * self.radius
            * sinh_ratio(r, self.radius)
            * (1.0 / r - 2.0 * cr / rr + 2.0 / (rr * r))
    }

    pub fn pressure(&self, r: f64) -> f64 {
        let mu = self.params.mu;
        -mu * self.sigma(r) + mu * self.params.sigma_tilde * r * r / 6.0 + self.c1
    }

    pub fn pressure_prime(&self, r: f64) -> f64 {
        let mu = self.params.mu;
        -mu * self.sigma_prime(r) + mu * self.params.sigma_tilde * r / 3.0
    }

    pub fn pressure_second(&self, r: f64) -> f64 {
        let mu = self.params.mu;
        -mu * self.sigma_second(r) + mu * self.params.sigma_tilde / 3.0
    }

    /// `p_S''(R) = -μ(β/(β + R P_0) - σ̃)`.
    pub fn boundary_pressure_curvature(&self) -> f64 {
        -self.params.mu * (self.boundary_sigma - self.params.sigma_tilde)
    }

    /// `R² P_1(R) + 1 + βR`, a recurring boundary combination.
    pub fn boundary_factor(&self) -> f64 {
        self.radius * self.radius * self.p1 + 1.0 + self.params.beta * self.radius
    }

    /// `(β + R P_0) / (β R P_0)`, which equals `3 / (σ̃ R)` on the stationary radius.
    pub fn k_factor(&self) -> f64 {
        let (b, r, p) = (self.params.beta, self.radius, self.p0);
        (b + r * p) / (b * r * p)
    }
}

/// Largest pointwise residuals of the stationary equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub nutrient: f64,
    pub pressure: f64,
    pub robin: f64,
    pub curvature: f64,
}

/// Evaluates the stationary equations on `grid_size` uniformly spaced
/// interior radii, plus both boundary conditions.
pub fn residual_check(profile: &StationaryProfile, grid_size: usize) -> Result<ResidualReport> {
    if grid_size < 16 {
        return Err(Error::validation("grid_size", "must be at least 16"));
    }
    let (big_r, mu, st) = (
        profile.radius,
        profile.params.mu,
        profile.params.sigma_tilde,
    );
    let mut nutrient: f64 = 0.0;
    let mut pressure: f64 = 0.0;
    for k in 1..=grid_size {
        let r = big_r * k as f64 / grid_size as f64;
        let (s, s1, s2) = (
            profile.sigma(r),
            profile.sigma_prime(r),
            profile.sigma_second(r),
        );
        nutrient = nutrient.max((s2 + 2.0 / r * s1 - s).abs());
        let (p1, p2) = (profile.pressure_prime(r), profile.pressure_second(r));
        pressure = pressure.max((p2 + 2.0 / r * p1 + mu * (s - st)).abs());
    }
    let robin = (profile.sigma_prime(big_r) + profile.params.beta * (profile.sigma(big_r) - 1.0)).abs();
    let curvature = (profile.pressure(big_r) - 1.0 / big_r).abs();
    Ok(ResidualReport {
        nutrient,
        pressure,
        robin,
        curvature,
    })
}

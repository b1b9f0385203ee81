//! Time stepping of one spherical-harmonic mode of the linearized system:
//! a parabolic nutrient perturbation `w`, an elliptic pressure perturbation
//! `q`, and the boundary amplitude `ρ` tied to both through boundary data.
//!
//! The three equations are advanced together by BDF2 (backward Euler on the
//! first step). `ρ` enters `w` and `q` only through boundary values, so the
//! new-level solution splits as `particular + ρ_new · basis`; the basis pair
//! depends only on the step size and is assembled once.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::grid::{RadialGrid, RadialOperator, RadialSolution};
use crate::error::{Error, Result};
use crate::stationary::StationaryProfile;

/// Largest accepted step.
pub const MAX_DT: f64 = 0.1;
/// Largest accepted horizon.
pub const MAX_HORIZON: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeState {
    pub n: usize,
    pub m: i64,
    pub t: f64,
    pub w: Vec<C64>,
    pub q: Vec<C64>,
    pub rho: C64,
    /// Previous level `(w, ρ)` for the two-step formula.
    #[serde(default)]
    pub history: Option<(Vec<C64>, C64)>,
}

impl ModeState {
    /// State at `t = 0`; `q` is filled in by [`ModeState::initialize`].
    pub fn new(n: usize, m: i64, w: Vec<C64>, rho: C64) -> Self {
        let len = w.len();
        ModeState {
            n,
            m,
            t: 0.0,
            w,
            q: vec![C64::new(0.0, 0.0); len],
            rho,
            history: None,
        }
    }

    pub fn zero(n: usize, m: i64, grid: &RadialGrid) -> Self {
        ModeState::new(n, m, vec![C64::new(0.0, 0.0); grid.cells], C64::new(0.0, 0.0))
    }

    /// Solves for `q` from the current `w` and `ρ`.
    pub fn initialize(&mut self, forcing: &dyn ModeForcing, profile: &StationaryProfile, grid: &RadialGrid) -> Result<()> {
        let f2 = forcing.f2(self.t, grid);
        let b3 = forcing.b(self.t)[2];
        self.q = elliptic_q(self.n, &self.w, self.rho, b3, forcing.eps(), f2.as_deref(), profile, grid)?;
        Ok(())
    }
}

/// Time-dependent forcing of one mode: radial fields `f¹, f²` and boundary
/// scalars `b¹, b², b³`, all multiplied by `eps`. `None` means zero.
pub trait ModeForcing: Sync {
    fn eps(&self) -> f64;
    fn f1(&self, t: f64, grid: &RadialGrid) -> Option<Vec<C64>>;
    fn f2(&self, t: f64, grid: &RadialGrid) -> Option<Vec<C64>>;
    /// `[b¹, b², b³]` at time `t`.
    fn b(&self, t: f64) -> [C64; 3];
}

/// Laplace transform of a forcing, for the transform-domain solution.
pub trait LaplaceForcing: Sync {
    fn eps(&self) -> f64;
    fn f1_hat(&self, s: C64, grid: &RadialGrid) -> Option<Vec<C64>>;
    fn f2_hat(&self, s: C64, grid: &RadialGrid) -> Option<Vec<C64>>;
    fn b_hat(&self, s: C64) -> [C64; 3];
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NoForcing;

impl ModeForcing for NoForcing {
    fn eps(&self) -> f64 {
        0.0
    }
    fn f1(&self, _: f64, _: &RadialGrid) -> Option<Vec<C64>> {
        None
    }
    fn f2(&self, _: f64, _: &RadialGrid) -> Option<Vec<C64>> {
        None
    }
    fn b(&self, _: f64) -> [C64; 3] {
        [C64::new(0.0, 0.0); 3]
    }
}

impl LaplaceForcing for NoForcing {
    fn eps(&self) -> f64 {
        0.0
    }
    fn f1_hat(&self, _: C64, _: &RadialGrid) -> Option<Vec<C64>> {
        None
    }
    fn f2_hat(&self, _: C64, _: &RadialGrid) -> Option<Vec<C64>> {
        None
    }
    fn b_hat(&self, _: C64) -> [C64; 3] {
        [C64::new(0.0, 0.0); 3]
    }
}

/// Every component is a fixed profile times `e^{rate·t}`; its transform is
/// the profile over `s - rate`, so both solution paths see the same input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialForcing {
    pub eps: f64,
    pub rate: f64,
    pub f1: Vec<C64>,
    pub f2: Vec<C64>,
    pub b: [C64; 3],
}

impl ModeForcing for ExponentialForcing {
    fn eps(&self) -> f64 {
        self.eps
    }
    fn f1(&self, t: f64, _: &RadialGrid) -> Option<Vec<C64>> {
        let e = (self.rate * t).exp();
        Some(self.f1.iter().map(|v| v * e).collect())
    }
    fn f2(&self, t: f64, _: &RadialGrid) -> Option<Vec<C64>> {
        let e = (self.rate * t).exp();
        Some(self.f2.iter().map(|v| v * e).collect())
    }
    fn b(&self, t: f64) -> [C64; 3] {
        let e = (self.rate * t).exp();
        self.b.map(|v| v * e)
    }
}

impl LaplaceForcing for ExponentialForcing {
    fn eps(&self) -> f64 {
        self.eps
    }
    fn f1_hat(&self, s: C64, _: &RadialGrid) -> Option<Vec<C64>> {
        let k = 1.0 / (s - self.rate);
        Some(self.f1.iter().map(|v| v * k).collect())
    }
    fn f2_hat(&self, s: C64, _: &RadialGrid) -> Option<Vec<C64>> {
        let k = 1.0 / (s - self.rate);
        Some(self.f2.iter().map(|v| v * k).collect())
    }
    fn b_hat(&self, s: C64) -> [C64; 3] {
        let k = 1.0 / (s - self.rate);
        self.b.map(|v| v * k)
    }
}

/// Dirichlet value of the pressure perturbation for unit `ρ`:
/// `-(1 - n(n+1)/2) / R²`.
pub(crate) fn pressure_boundary_gain(n: usize, radius: f64) -> f64 {
    -(1.0 - (n * (n + 1)) as f64 / 2.0) / (radius * radius)
}

fn check_profile(profile: &StationaryProfile, grid: &RadialGrid) -> Result<()> {
    if (profile.radius - grid.radius).abs() > 1e-12 * profile.radius {
        return Err(Error::validation(
            "grid.radius",
            format!("grid radius {} differs from stationary radius {}", grid.radius, profile.radius),
        ));
    }
    Ok(())
}

/// Solves `-Δq + n(n+1)/r² q = μ w + eps f²` with
/// `q(R) = -(1 - n(n+1)/2) ρ / R² + eps b³`.
#[allow(clippy::too_many_arguments)]
pub fn elliptic_q(
    n: usize,
    w: &[C64],
    rho: C64,
    b3: C64,
    eps: f64,
    f2: Option<&[C64]>,
    profile: &StationaryProfile,
    grid: &RadialGrid,
) -> Result<Vec<C64>> {
    check_profile(profile, grid)?;
    let op = RadialOperator::new(n, C64::new(0.0, 0.0), 0.0, 1.0, grid)?;
    let rhs = pressure_rhs(w, eps, f2, profile.params.mu, grid)?;
    let g = pressure_boundary_gain(n, grid.radius) * rho + eps * b3;
    Ok(op.solve(&rhs, g)?.values)
}

fn pressure_rhs(w: &[C64], eps: f64, f2: Option<&[C64]>, mu: f64, grid: &RadialGrid) -> Result<Vec<C64>> {
    grid.check(w.len())?;
    let mut rhs: Vec<C64> = w.iter().map(|v| mu * v).collect();
    if let Some(f) = f2 {
        grid.check(f.len())?;
        for (r, v) in rhs.iter_mut().zip(f) {
            *r += eps * v;
        }
    }
    Ok(rhs)
}

/// Response of `(w, q)` to a unit new-level `ρ` for one step size.
#[derive(Debug, Clone)]
struct Basis {
    /// Weight of the new level in the time derivative (1/dt or 3/(2dt)).
    lead: f64,
    w_op: RadialOperator,
    w: RadialSolution,
    q: RadialSolution,
}

/// Integrator for one mode with a fixed step.
#[derive(Debug, Clone)]
pub struct ModeStepper {
    n: usize,
    dt: f64,
    profile: StationaryProfile,
    grid: RadialGrid,
    q_op: RadialOperator,
    euler: Basis,
    bdf2: Basis,
}

impl ModeStepper {
    pub fn new(n: usize, dt: f64, profile: &StationaryProfile, grid: &RadialGrid) -> Result<Self> {
        if !(dt > 0.0 && dt <= MAX_DT) {
            return Err(Error::validation("evolve.dt", format!("must lie in (0, {MAX_DT}]")));
        }
        check_profile(profile, grid)?;
        let q_op = RadialOperator::new(n, C64::new(0.0, 0.0), 0.0, 1.0, grid)?;
        let basis = |lead: f64| -> Result<Basis> {
            let beta = profile.params.beta;
            let w_op = RadialOperator::new(n, C64::new(1.0 + lead, 0.0), 1.0, beta, grid)?;
            let zero = vec![C64::new(0.0, 0.0); grid.cells];
            let w = w_op.solve(&zero, C64::new(-profile.lambda, 0.0))?;
            let rhs = pressure_rhs(&w.values, 0.0, None, profile.params.mu, grid)?;
            let q = q_op.solve(&rhs, pressure_boundary_gain(n, grid.radius).into())?;
            Ok(Basis { lead, w_op, w, q })
        };
        Ok(ModeStepper {
            n,
            dt,
            profile: *profile,
            grid: grid.clone(),
            euler: basis(1.0 / dt)?,
            bdf2: basis(1.5 / dt)?,
            q_op,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `state` by one step.
    pub fn step(&self, state: &mut ModeState, forcing: &dyn ModeForcing) -> Result<()> {
        if state.n != self.n {
            return Err(Error::validation("state.n", "mode index differs from the stepper's"));
        }
        self.grid.check(state.w.len())?;
        let t_new = state.t + self.dt;
        let eps = forcing.eps();
        let [b1, b2, b3] = forcing.b(t_new);

        // history terms of the time derivative: lead·u_new - hist
        let (basis, w_hist, rho_hist): (&Basis, Vec<C64>, C64) = match &state.history {
            None => (
                &self.euler,
                state.w.iter().map(|v| v / self.dt).collect(),
                state.rho / self.dt,
            ),
            Some((w_old, rho_old)) => {
                let k = 0.5 / self.dt;
                (
                    &self.bdf2,
                    state.w.iter().zip(w_old).map(|(a, b)| k * (4.0 * a - b)).collect(),
                    k * (4.0 * state.rho - rho_old),
                )
            }
        };

        let mut rhs = w_hist;
        if let Some(f1) = forcing.f1(t_new, &self.grid) {
            self.grid.check(f1.len())?;
            for (r, v) in rhs.iter_mut().zip(&f1) {
                *r += eps * v;
            }
        }
        let w_part = basis.w_op.solve(&rhs, eps * b2)?;
        let f2 = forcing.f2(t_new, &self.grid);
        let q_rhs = pressure_rhs(&w_part.values, eps, f2.as_deref(), self.profile.params.mu, &self.grid)?;
        let q_part = self.q_op.solve(&q_rhs, eps * b3)?;

        // lead ρ - hist = μ a ρ - ∂q(R) + eps b¹ with ∂q = ∂q_part + ρ ∂q_basis
        let growth = self.profile.params.mu * (self.profile.boundary_sigma - self.profile.params.sigma_tilde);
        let den = basis.lead - growth + basis.q.boundary_derivative;
        let rho_new = (rho_hist - q_part.boundary_derivative + eps * b1) / den;

        let w_new: Vec<C64> = w_part
            .values
            .iter()
            .zip(&basis.w.values)
            .map(|(p, b)| p + rho_new * b)
            .collect();
        let q_new: Vec<C64> = q_part
            .values
            .iter()
            .zip(&basis.q.values)
            .map(|(p, b)| p + rho_new * b)
            .collect();

        let w_old = std::mem::replace(&mut state.w, w_new);
        state.history = Some((w_old, state.rho));
        state.q = q_new;
        state.rho = rho_new;
        state.t = t_new;
        Ok(())
    }
}

/// One step of size `dt`. Builds a fresh [`ModeStepper`]; use that type
/// directly when stepping repeatedly.
pub fn step_mode(
    state: &ModeState,
    dt: f64,
    forcing: &dyn ModeForcing,
    profile: &StationaryProfile,
    grid: &RadialGrid,
) -> Result<ModeState> {
    let stepper = ModeStepper::new(state.n, dt, profile, grid)?;
    let mut next = state.clone();
    stepper.step(&mut next, forcing)?;
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub n: usize,
    pub m: i64,
    pub t: Vec<f64>,
    pub rho: Vec<C64>,
    /// States at the requested snapshot times (nearest step at or after).
    pub snapshots: Vec<ModeState>,
    pub final_state: ModeState,
}

/// Integrates from `init` (taken at `t = 0`) to `horizon` with uniform steps.
pub fn evolve_mode(
    init: &ModeState,
    forcing: &dyn ModeForcing,
    horizon: f64,
    dt: f64,
    profile: &StationaryProfile,
    grid: &RadialGrid,
    snapshot_times: &[f64],
) -> Result<Trajectory> {
    if !(horizon > 0.0 && horizon <= MAX_HORIZON) {
        return Err(Error::validation("evolve.horizon", format!("must lie in (0, {MAX_HORIZON}]")));
    }
    let stepper = ModeStepper::new(init.n, dt, profile, grid)?;
    let steps = (horizon / dt - 1e-9).ceil() as usize;
    let mut state = init.clone();
    state.t = 0.0;
    state.history = None;
    state.initialize(forcing, profile, grid)?;

    let mut t = Vec::with_capacity(steps + 1);
    let mut rho = Vec::with_capacity(steps + 1);
    t.push(0.0);
    rho.push(state.rho);
    let mut wanted: Vec<f64> = snapshot_times.to_vec();
    wanted.sort_by(f64::total_cmp);
    let mut next_snap = 0;
    let mut snapshots = Vec::new();
    while next_snap < wanted.len() && wanted[next_snap] <= 0.0 {
        snapshots.push(state.clone());
        next_snap += 1;
    }
    for _ in 0..steps {
        stepper.step(&mut state, forcing)?;
        t.push(state.t);
        rho.push(state.rho);
        while next_snap < wanted.len() && wanted[next_snap] <= state.t + 1e-12 {
            snapshots.push(state.clone());
            next_snap += 1;
        }
    }
    Ok(Trajectory {
        n: init.n,
        m: init.m,
        t,
        rho,
        snapshots,
        final_state: state,
    })
}

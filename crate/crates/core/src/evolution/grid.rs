//! Cell-centred finite-volume discretization of the radial operator
//! `-Δ + n(n+1)/r² + c` on the ball of radius R.
//!
//! Cells are `[k h, (k+1) h]` with nodes at the midpoints, so no unknown sits
//! at the origin and the face area `r²` closes the inner flux by itself.
//! The outer face uses a quadratic through the boundary value and the last
//! two nodes; solving it for the boundary value keeps the system tridiagonal.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible number of cells.
pub const MIN_CELLS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub radius: f64,
    pub cells: usize,
}

impl RadialGrid {
    pub fn new(radius: f64, cells: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::validation("grid.radius", "must be positive and finite"));
        }
        if cells < MIN_CELLS {
            return Err(Error::validation(
                "grid.cells",
                format!("must be at least {MIN_CELLS}, got {cells}"),
            ));
        }
        Ok(RadialGrid { radius, cells })
    }

    pub fn h(&self) -> f64 {
        self.radius / self.cells as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.cells).map(|k| self.node(k)).collect()
    }

    /// Samples `f` at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<C64> {
        (0..self.cells).map(|k| C64::new(f(self.node(k)), 0.0)).collect()
    }

    fn volume(&self, k: usize) -> f64 {
        let h = self.h();
        let (a, b) = (k as f64, k as f64 + 1.0);
        (b * b * b - a * a * a) * h * h * h / 3.0
    }

    fn face(&self, k: usize) -> f64 {
        let r = k as f64 * self.h();
        r * r
    }

    pub(crate) fn check(&self, len: usize) -> Result<()> {
        if len != self.cells {
            return Err(Error::GridMismatch {
                expected: self.cells,
                got: len,
            });
        }
        Ok(())
    }
}

/// Boundary condition `alpha ∂_r u + beta u = value` at `r = R`.
/// Dirichlet data is `alpha = 0, beta = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Robin {
    pub alpha: f64,
    pub beta: f64,
    pub value: C64,
}

impl Robin {
    pub fn new(alpha: f64, beta: f64, value: C64) -> Self {
        Robin { alpha, beta, value }
    }

    pub fn dirichlet(value: C64) -> Self {
        Robin::new(0.0, 1.0, value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    /// Values at the cell centres.
    pub values: Vec<C64>,
    pub boundary_value: C64,
    /// `∂_r u(R)`, second order.
    pub boundary_derivative: C64,
}

/// Tridiagonal matrix of the operator for fixed `n`, shift `c` and boundary
/// coefficients `(alpha, beta)`; only the boundary value enters the
/// right-hand side, so one assembly serves many solves.
#[derive(Debug, Clone)]
pub struct RadialOperator {
    grid: RadialGrid,
    alpha: f64,
    beta: f64,
    lower: Vec<C64>,
    diag: Vec<C64>,
    upper: Vec<C64>,
    /// Coefficient of the boundary value in the last row.
    boundary_gain: f64,
}

impl RadialOperator {
    pub fn new(n: usize, c: C64, alpha: f64, beta: f64, grid: &RadialGrid) -> Result<Self> {
        let h = grid.h();
        let cells = grid.cells;
        let den = 8.0 * alpha + 3.0 * h * beta;
        if !(den.abs() > 0.0) || !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::Domain {
                what: "boundary coefficients give no usable closure",
                value: den,
            });
        }
        let l = (n * (n + 1)) as f64;
        let mut lower = vec![C64::new(0.0, 0.0); cells];
        let mut diag = vec![C64::new(0.0, 0.0); cells];
        let mut upper = vec![C64::new(0.0, 0.0); cells];
        for k in 0..cells {
            let v = grid.volume(k);
            let inner = grid.face(k) / (h * v);
            diag[k] = c + l * h / v + inner;
            if k > 0 {
                lower[k] = C64::new(-inner, 0.0);
            }
            if k + 1 < cells {
                let outer = grid.face(k + 1) / (h * v);
                diag[k] += outer;
                upper[k] = C64::new(-outer, 0.0);
            }
        }
        // outer flux R² u'(R) with u'(R) = (8 g - β(9 u_{N-1} - u_{N-2})) / den
        let last = cells - 1;
        let w = grid.face(cells) / (grid.volume(last) * den);
        diag[last] += 9.0 * beta * w;
        lower[last] -= beta * w;
        Ok(RadialOperator {
            grid: grid.clone(),
            alpha,
            beta,
            lower,
            diag,
            upper,
            boundary_gain: 8.0 * w,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// Solves with right-hand side `rhs` and boundary value `g`.
    pub fn solve(&self, rhs: &[C64], g: C64) -> Result<RadialSolution> {
        self.grid.check(rhs.len())?;
        let mut b = rhs.to_vec();
        let last = b.len() - 1;
        b[last] += self.boundary_gain * g;
        let values = thomas(&self.lower, &self.diag, &self.upper, &b)?;
        let h = self.grid.h();
        let (u1, u2) = (values[last], values[last - 1]);
        let den = 8.0 * self.alpha + 3.0 * h * self.beta;
        let boundary_derivative = (8.0 * g - self.beta * (9.0 * u1 - u2)) / den;
        let boundary_value = (3.0 * h * g + self.alpha * (9.0 * u1 - u2)) / den;
        Ok(RadialSolution {
            values,
            boundary_value,
            boundary_derivative,
        })
    }

    /// Applies the discrete operator (boundary value taken as zero).
    pub fn apply(&self, u: &[C64]) -> Vec<C64> {
        let n = u.len();
        (0..n)
            .map(|k| {
                let mut v = self.diag[k] * u[k];
                if k > 0 {
                    v += self.lower[k] * u[k - 1];
                }
                if k + 1 < n {
                    v += self.upper[k] * u[k + 1];
                }
                v
            })
            .collect()
    }
}

/// Thomas algorithm without pivoting; a pivot that is tiny against its row
/// is reported as ill conditioning rather than divided through.
fn thomas(lower: &[C64], diag: &[C64], upper: &[C64], rhs: &[C64]) -> Result<Vec<C64>> {
    let n = diag.len();
    let mut cp = vec![C64::new(0.0, 0.0); n];
    let mut dp = vec![C64::new(0.0, 0.0); n];
    let mut pivot = diag[0];
    for k in 0..n {
        if k > 0 {
            pivot = diag[k] - lower[k] * cp[k - 1];
        }
        let scale = diag[k].norm() + lower[k].norm() + upper[k].norm();
        if !(pivot.norm() > 1e-10 * scale) {
            return Err(Error::Conditioning(format!(
                "radial solve: pivot {:e} at row {k} of {n} (row scale {:e})",
                pivot.norm(),
                scale
            )));
        }
        cp[k] = upper[k] / pivot;
        let prev = if k > 0 { lower[k] * dp[k - 1] } else { C64::new(0.0, 0.0) };
        dp[k] = (rhs[k] - prev) / pivot;
    }
    let mut x = dp;
    for k in (0..n - 1).rev() {
        let next = x[k + 1];
        x[k] -= cp[k] * next;
    }
    Ok(x)
}

/// Solves `-Δu + (n(n+1)/r² + c) u = rhs` in the ball with
/// `alpha ∂_r u + beta u = value` at `r = R`.
pub fn bvp_solve_radial(n: usize, c: C64, rhs: &[C64], robin: Robin, grid: &RadialGrid) -> Result<RadialSolution> {
    RadialOperator::new(n, c, robin.alpha, robin.beta, grid)?.solve(rhs, robin.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_coarse_grid() {
        assert!(RadialGrid::new(1.0, 32).unwrap_err().is_validation());
    }

    #[test]
    fn constant_solution_for_n0() {
        // u = 1 solves -Δu + u = 1 with u(R) = 1 and with u' + u = 1
        let g = RadialGrid::new(2.0, 64).unwrap();
        let rhs = vec![C64::new(1.0, 0.0); 64];
        for robin in [Robin::dirichlet(1.0.into()), Robin::new(1.0, 1.0, 1.0.into())] {
            let s = bvp_solve_radial(0, 1.0.into(), &rhs, robin, &g).unwrap();
            assert!(s.values.iter().all(|v| (v - 1.0).norm() < 1e-12));
            assert!(s.boundary_derivative.norm() < 1e-11);
        }
    }

    #[test]
    fn linear_mode_is_exact_for_n1() {
        // u = r is harmonic in the n = 1 sense
        let g = RadialGrid::new(1.5, 80).unwrap();
        let rhs = vec![C64::new(0.0, 0.0); 80];
        let s = bvp_solve_radial(1, 0.0.into(), &rhs, Robin::new(1.0, 2.0, (1.0 + 2.0 * 1.5).into()), &g).unwrap();
        for (k, v) in s.values.iter().enumerate() {
            assert!((v - g.node(k)).norm() < 1e-11, "k={k}");
        }
        assert!((s.boundary_derivative - 1.0).norm() < 1e-11);
    }

    #[test]
    fn singular_shift_is_reported() {
        // -u'' - 2u'/r - π² u has the Dirichlet eigenfunction sin(πr)/r on
        // the unit ball; pick c on the discrete eigenvalue
        let g = RadialGrid::new(1.0, 64).unwrap();
        let mut c = -std::f64::consts::PI.powi(2);
        // locate the discrete eigenvalue by secant on the last pivot
        let last_pivot = |c: f64| -> f64 {
            let op = RadialOperator::new(0, c.into(), 0.0, 1.0, &g).unwrap();
            let mut p = op.diag[0];
            for k in 1..64 {
                p = op.diag[k] - op.lower[k] * op.upper[k - 1] / p;
            }
            p.re
        };
        let (mut a, mut b) = (c - 0.1, c + 0.1);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if last_pivot(a) * last_pivot(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        c = 0.5 * (a + b);
        let rhs = vec![C64::new(1.0, 0.0); 64];
        let r = bvp_solve_radial(0, c.into(), &rhs, Robin::dirichlet(0.0.into()), &g);
        assert!(matches!(r, Err(Error::Conditioning(_))), "{r:?}");
    }
}

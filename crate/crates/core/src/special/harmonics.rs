//! Complex orthonormal spherical harmonics with the Condon–Shortley phase,
//! a product quadrature grid on the sphere, and band-limited
//! projection/synthesis.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; count];
    let mut w = vec![0.0; count];
    let nf = count as f64;
    for i in 0..count.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..count {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = nf * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[count - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[count - 1 - i] = wi;
    }
    (x, w)
}

/// Normalized associated Legendre values `Ȳ_{n,m}(θ)` for `0 <= m <= n <= n_max`,
/// i.e. `Y_{n,m}(θ, 0)`, indexed by [`tri_index`].
fn legendre_table(n_max: usize, cos_t: f64, sin_t: f64) -> Vec<f64> {
    let mut out = vec![0.0; (n_max + 1) * (n_max + 2) / 2];
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=n_max {
        if m > 0 {
            pmm *= -((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * sin_t;
        }
        out[tri_index(m, m)] = pmm;
        if m == n_max {
            break;
        }
        let mut prev = pmm;
        let mut cur = ((2 * m + 3) as f64).sqrt() * cos_t * pmm;
        out[tri_index(m + 1, m)] = cur;
        for n in (m + 2)..=n_max {
            let a = coeff_a(n, m);
            let a_prev = coeff_a(n - 1, m);
            let next = a * (cos_t * cur - prev / a_prev);
            prev = cur;
            cur = next;
            out[tri_index(n, m)] = cur;
        }
    }
    out
}

fn coeff_a(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    ((4.0 * n * n - 1.0) / (n * n - m * m)).sqrt()
}

fn tri_index(n: usize, m: usize) -> usize {
    n * (n + 1) / 2 + m
}

/// `Y_{n,m}(θ, φ)`.
pub fn ylm(n: usize, m: i64, theta: f64, phi: f64) -> C64 {
    let am = m.unsigned_abs() as usize;
    if am > n {
        return C64::new(0.0, 0.0);
    }
    let table = legendre_table(n, theta.cos(), theta.sin());
    let v = C64::from_polar(table[tri_index(n, am)], am as f64 * phi);
    if m >= 0 {
        v
    } else if am % 2 == 0 {
        v.conj()
    } else {
        -v.conj()
    }
}

/// Product grid: Gauss–Legendre in `cos θ` times uniform `φ`. Exact for
/// projecting fields of degree at most `n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    pub n_max: usize,
    /// Polar angles, ascending in `cos θ`.
    pub theta: Vec<f64>,
    /// Gauss–Legendre weights in `cos θ`.
    pub weights: Vec<f64>,
    pub phi: Vec<f64>,
}

impl SphereGrid {
    pub fn new(n_max: usize) -> Self {
        let (x, w) = gauss_legendre(n_max + 1);
        let n_phi = 2 * n_max + 2;
        SphereGrid {
            n_max,
            theta: x.iter().map(|c| c.acos()).collect(),
            weights: w,
            phi: (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect(),
        }
    }

    /// Number of samples, row-major in (θ, φ).
    pub fn len(&self) -> usize {
        self.theta.len() * self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Samples a function of (θ, φ) on the grid.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for &t in &self.theta {
            for &p in &self.phi {
                out.push(f(t, p));
            }
        }
        out
    }
}

/// Coefficients `c_{n,m}` for `n <= n_max`, stored at `n² + n + m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub n_max: usize,
    pub data: Vec<C64>,
}

impl ModeCoefficients {
    pub fn zeros(n_max: usize) -> Self {
        ModeCoefficients {
            n_max,
            data: vec![C64::new(0.0, 0.0); (n_max + 1) * (n_max + 1)],
        }
    }

    pub fn get(&self, n: usize, m: i64) -> C64 {
        self.data[(n * n + n).wrapping_add_signed(m as isize)]
    }

    pub fn set(&mut self, n: usize, m: i64, v: C64) {
        self.data[(n * n + n).wrapping_add_signed(m as isize)] = v;
    }

    /// Largest `|c_{n,-m} - (-1)^m conj(c_{n,m})|`; zero for real fields.
    pub fn reality_defect(&self) -> (usize, i64, f64) {
        let mut worst = (0, 0, 0.0);
        for n in 0..=self.n_max {
            for m in 1..=(n as i64) {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let d = (self.get(n, -m) - sign * self.get(n, m).conj()).norm();
                if d > worst.2 {
                    worst = (n, m, d);
                }
            }
            let d = self.get(n, 0).im.abs();
            if d > worst.2 {
                worst = (n, 0, d);
            }
        }
        worst
    }
}

/// Projects real samples onto `Y_{n,m}` for `n <= n_max`.
pub fn project(samples: &[f64], grid: &SphereGrid, n_max: usize) -> Result<ModeCoefficients> {
    if samples.len() != grid.len() {
        return Err(Error::GridMismatch {
            expected: grid.len(),
            got: samples.len(),
        });
    }
    if n_max > grid.n_max {
        return Err(Error::Domain {
            what: "projection band exceeds grid band limit",
            value: n_max as f64,
        });
    }
    let n_phi = grid.phi.len();
    let dphi = 2.0 * PI / n_phi as f64;
    let mut out = ModeCoefficients::zeros(n_max);
    for (i, &t) in grid.theta.iter().enumerate() {
        let row = &samples[i * n_phi..(i + 1) * n_phi];
        // Fourier coefficients in φ for m = -n_max..=n_max; negative orders
        // are computed independently so the reality check below means something.
        let nm = n_max as i64;
        let fm: Vec<C64> = (-nm..=nm)
            .map(|m| {
                row.iter()
                    .zip(&grid.phi)
                    .map(|(&v, &p)| v * C64::from_polar(1.0, -(m as f64) * p))
                    .sum::<C64>()
                    * dphi
            })
            .collect();
        let table = legendre_table(n_max, t.cos(), t.sin());
        let w = grid.weights[i];
        for n in 0..=n_max {
            for m in -(n as i64)..=(n as i64) {
                let am = m.unsigned_abs() as usize;
                let mut y = table[tri_index(n, am)] * w;
                if m < 0 && am % 2 == 1 {
                    y = -y;
                }
                let cur = out.get(n, m);
                out.set(n, m, cur + fm[(m + nm) as usize] * y);
            }
        }
    }
    let scale = out.data.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let (n, m, d) = out.reality_defect();
    if d > 1e-12 * scale {
        return Err(Error::Symmetry { n, m, defect: d });
    }
    Ok(out)
}

/// Evaluates `Σ c_{n,m} Y_{n,m}` on the grid; the coefficients must
/// describe a real field.
pub fn synthesize(coeffs: &ModeCoefficients, grid: &SphereGrid) -> Result<Vec<f64>> {
    if coeffs.n_max > grid.n_max {
        return Err(Error::Domain {
            what: "coefficient band exceeds grid band limit",
            value: coeffs.n_max as f64,
        });
    }
    let scale = coeffs.data.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let (n, m, d) = coeffs.reality_defect();
    if d > 1e-12 * scale {
        return Err(Error::Symmetry { n, m, defect: d });
    }
    let nm = coeffs.n_max;
    let mut out = Vec::with_capacity(grid.len());
    for &t in &grid.theta {
        let table = legendre_table(nm, t.cos(), t.sin());
        for &p in &grid.phi {
            let mut v = 0.0;
            for n in 0..=nm {
                v += coeffs.get(n, 0).re * table[tri_index(n, 0)];
                for m in 1..=n {
                    // c_{n,m} Y_{n,m} + c_{n,-m} Y_{n,-m} = 2 Re(c_{n,m} Y_{n,m})
                    let y = C64::from_polar(table[tri_index(n, m)], m as f64 * p);
                    v += 2.0 * (coeffs.get(n, m as i64) * y).re;
                }
            }
            out.push(v);
        }
    }
    Ok(out)
}

use serde::{Deserialize, Serialize};

use super::grid::RadialGrid;
use super::laplace::ModeInit;
use crate::error::{Error, Result};
use crate::special::{project, ModeCoefficients, SphereGrid};

/// Dropped energy fraction above which truncation is reported.
pub const TRUNCATION_WARN: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeInitial {
    pub n: usize,
    pub m: i64,
    pub init: ModeInit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub band: usize,
    pub modes: Vec<ModeInitial>,
    /// Largest fraction of `L²(S²)` energy outside the band, over the
    /// boundary field and all shells.
    pub dropped_fraction: f64,
    pub warnings: Vec<String>,
}

impl Decomposition {
    pub fn mode(&self, n: usize, m: i64) -> Option<&ModeInitial> {
        self.modes.iter().find(|x| x.n == n && x.m == m)
    }
}

fn sphere_energy(samples: &[f64], sphere: &SphereGrid) -> f64 {
    let n_phi = sphere.phi.len();
    let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
    sphere
        .weights
        .iter()
        .enumerate()
        .map(|(i, w)| w * dphi * samples[i * n_phi..(i + 1) * n_phi].iter().map(|v| v * v).sum::<f64>())
        .sum()
}

fn dropped(samples: &[f64], coeffs: &ModeCoefficients, sphere: &SphereGrid) -> f64 {
    let total = sphere_energy(samples, sphere);
    if total == 0.0 {
        return 0.0;
    }
    let kept: f64 = coeffs.data.iter().map(|c| c.norm_sqr()).sum();
    ((total - kept) / total).max(0.0)
}

/// Splits the boundary perturbation and the nutrient perturbation (one
/// sample set per radial node) into per-mode initial data for `n <= band`.
pub fn decompose_initial(
    rho0: &[f64],
    w0_shells: &[Vec<f64>],
    band: usize,
    sphere: &SphereGrid,
    grid: &RadialGrid,
) -> Result<Decomposition> {
    grid.check(w0_shells.len())?;
    let rho_c = project(rho0, sphere, band)?;
    let mut worst = dropped(rho0, &rho_c, sphere);
    let mut shells = Vec::with_capacity(w0_shells.len());
    for s in w0_shells {
        let c = project(s, sphere, band)?;
        worst = worst.max(dropped(s, &c, sphere));
        shells.push(c);
    }
    let mut modes = Vec::with_capacity((band + 1) * (band + 1));
    for n in 0..=band {
        for m in -(n as i64)..=(n as i64) {
            modes.push(ModeInitial {
                n,
                m,
                init: ModeInit {
                    rho0: rho_c.get(n, m),
                    w0: shells.iter().map(|c| c.get(n, m)).collect(),
                },
            });
        }
    }
    let mut warnings = Vec::new();
    if worst > TRUNCATION_WARN {
        let msg = format!("band {band} drops an energy fraction {worst:.3e} of the initial data");
        log::warn!("{msg}");
        warnings.push(msg);
    }
    Ok(Decomposition {
        band,
        modes,
        dropped_fraction: worst,
        warnings,
    })
}

/// Nonzero check used by callers that require a populated mode.
pub fn require_mode(d: &Decomposition, n: usize, m: i64) -> Result<&ModeInitial> {
    d.mode(n, m).ok_or_else(|| Error::validation("modes", format!("mode ({n}, {m}) outside band {}", d.band)))
}

/// Real-valued boundary data has `c_{n,-m} = (-1)^m conj(c_{n,m})`.
pub fn conjugate_defect(d: &Decomposition) -> f64 {
    let mut worst: f64 = 0.0;
    for x in &d.modes {
        if x.m <= 0 {
            continue;
        }
        let sign = if x.m % 2 == 0 { 1.0 } else { -1.0 };
        if let Some(y) = d.mode(x.n, -x.m) {
            worst = worst.max((y.init.rho0 - sign * x.init.rho0.conj()).norm());
            for (a, b) in y.init.w0.iter().zip(&x.init.w0) {
                worst = worst.max((a - sign * b.conj()).norm());
            }
        }
    }
    worst
}

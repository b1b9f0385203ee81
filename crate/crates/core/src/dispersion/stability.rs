use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{find_roots, find_roots_excluding_translation, mu_bifurcation, ContourOptions, DispersionContext, Rect, Zero};
use crate::error::{Error, Result};
use crate::stationary::{ModelParams, StationaryProfile};

/// Zero of `h_n` with the largest real part. Of a conjugate pair the member
/// with positive imaginary part is returned.
pub fn dominant_root(ctx: &DispersionContext, search_depth: f64, opts: &ContourOptions) -> Result<Zero> {
    let x = ctx.real_bound().max(0.0) + 1.0;
    let y = ctx.imag_bound() + 1.0;
    let n = ctx.n as f64;
    let mut depth = (n * n / (ctx.radius * ctx.radius)).max(5.0);
    loop {
        let region = Rect::new(-depth, x, -y, y);
        let set = find_roots(ctx, region, opts)?;
        let best = set.roots.iter().copied().max_by(|a, b| {
            a.s.re
                .total_cmp(&b.s.re)
                .then(b.s.im.abs().total_cmp(&a.s.im.abs()))
        });
        if let Some(mut z) = best {
            // pick the upper member of a pair with equal real part
            if z.s.im < 0.0 {
                if let Some(up) = set
                    .roots
                    .iter()
                    .find(|w| (w.s - z.s.conj()).norm() <= 1e-8 * z.s.norm().max(1.0))
                {
                    z = *up;
                }
            }
            return Ok(z);
        }
        if depth >= search_depth {
            return Err(Error::NoRoot(format!(
                "no zero of h_{} with real part above {}",
                ctx.n, -search_depth
            )));
        }
        depth = (2.0 * depth).min(search_depth);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuStarOptions {
    /// Highest mode checked by root location; higher modes are covered by
    /// the large-n bound.
    pub n_max: usize,
    pub rel_tol: f64,
    /// Also run the large-n bound check at the threshold.
    pub certify_tail: bool,
}

impl Default for MuStarOptions {
    fn default() -> Self {
        MuStarOptions {
            n_max: 16,
            rel_tol: 1e-8,
            certify_tail: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuStar {
    pub mu_star: f64,
    pub mu_1: f64,
    pub mu_2: f64,
    /// Mode that loses stability first.
    pub critical_mode: usize,
    /// Largest real part of that mode's zeros just above the threshold.
    pub critical_root: C64,
    pub tail_certified: Option<bool>,
    pub warnings: Vec<String>,
}

/// Largest real part of zeros of `h_n` with `Re s >= -margin`, or `None`.
fn rightmost_near_axis(ctx: &DispersionContext, opts: &ContourOptions) -> Result<Option<Zero>> {
    let bound = ctx.real_bound();
    let margins = [0.05, 0.0713, 0.0331, 0.0907];
    if bound < -margins[0] {
        return Ok(None);
    }
    let y = ctx.right_half_imag_bound() + 1.0;
    let mut last = None;
    for m in margins {
        let region = Rect::new(-m, bound.max(0.0) + 1.0, -y, y);
        match find_roots_excluding_translation(ctx, region, opts) {
            Ok(set) => return Ok(set.roots.first().copied()),
            Err(e @ Error::Contour(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// `(mode, rightmost zero)` for the first mode with a zero in `Re s >= 0`.
fn instability(profile: &StationaryProfile, n_max: usize, opts: &ContourOptions) -> Result<Option<(usize, Zero)>> {
    let found: Vec<Option<(usize, Zero)>> = (0..=n_max)
        .into_par_iter()
        .map(|n| -> Result<Option<(usize, Zero)>> {
            let ctx = DispersionContext::new(n, profile)?;
            Ok(rightmost_near_axis(&ctx, opts)?
                .filter(|z| z.s.re >= 0.0)
                .map(|z| (n, z)))
        })
        .collect::<Result<_>>()?;
    Ok(found
        .into_iter()
        .flatten()
        .max_by(|a, b| a.1.s.re.total_cmp(&b.1.s.re)))
}

/// Stability threshold: the supremum of μ such that every mode other than
/// the translation zero of `n = 1` has all zeros in `Re s < 0`.
pub fn mu_star(beta: f64, sigma_tilde: f64, opts: &MuStarOptions, contour: &ContourOptions) -> Result<MuStar> {
    if opts.n_max < 8 {
        return Err(Error::validation("bifurcation.n_max", "must be at least 8"));
    }
    let base = StationaryProfile::new(ModelParams::new(beta, sigma_tilde, 1.0)?)?;
    let r = base.radius;
    let mu_1 = mu_bifurcation(1, r, beta)?;
    let mu_2 = mu_bifurcation(2, r, beta)?;
    let upper = mu_1.min(mu_2);
    let mut warnings = Vec::new();

    let mut lo = upper * (1.0 - 1e-9);
    let at_upper = instability(&base.with_mu(lo), opts.n_max, contour)?;
    let (mu_star, critical_mode, critical_root) = match at_upper {
        None => {
            // stable right up to the first bifurcation value
            let hi = upper * (1.0 + 1e-6);
            let above = instability(&base.with_mu(hi), opts.n_max, contour)?;
            let (mode, z) = above.unwrap_or((if mu_2 <= mu_1 { 2 } else { 1 }, Zero {
                s: C64::new(0.0, 0.0),
                residual: 0.0,
                multiplicity: 1,
            }));
            (upper, mode, z.s)
        }
        Some(mut worst) => {
            let mut hi = lo;
            lo = 0.5 * hi;
            let mut tries = 0;
            while let Some(w) = instability(&base.with_mu(lo), opts.n_max, contour)? {
                worst = w;
                hi = lo;
                lo *= 0.5;
                tries += 1;
                if tries > 60 {
                    return Err(Error::NoRoot("no stable mu found below the bifurcation values".into()));
                }
            }
            while hi - lo > opts.rel_tol * hi {
                let mid = 0.5 * (lo + hi);
                match instability(&base.with_mu(mid), opts.n_max, contour)? {
                    Some(w) => {
                        worst = w;
                        hi = mid;
                    }
                    None => lo = mid,
                }
            }
            (0.5 * (lo + hi), worst.0, worst.1.s)
        }
    };

    let tail_certified = if opts.certify_tail {
        let first = (opts.n_max + 1).max(20);
        let mut range = vec![first];
        for n in [30, 40] {
            if n > first {
                range.push(n);
            }
        }
        match large_n_bound_check(&base.with_mu(mu_star), &range, contour) {
            Ok(rep) => {
                if !rep.pass {
                    warnings.push(format!(
                        "large-n bound not certified over {:?} (delta0 = {})",
                        range, rep.delta0
                    ));
                }
                Some(rep.pass)
            }
            Err(e) => {
                warnings.push(format!("large-n check failed: {e}"));
                Some(false)
            }
        }
    } else {
        None
    };
    for w in &warnings {
        log::warn!("{w}");
    }

    Ok(MuStar {
        mu_star,
        mu_1,
        mu_2,
        critical_mode,
        critical_root,
        tail_certified,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargeNReport {
    /// `(n, dominant zero)`.
    pub dominant: Vec<(usize, C64)>,
    /// `min_n (-Re s_n) / n²`.
    pub delta0: f64,
    /// `delta0 > 0` and the dominant real parts decrease with n.
    pub pass: bool,
}

/// Checks that dominant zeros of high modes satisfy `Re s <= -δ₀ n²`.
pub fn large_n_bound_check(profile: &StationaryProfile, n_range: &[usize], opts: &ContourOptions) -> Result<LargeNReport> {
    let dominant: Vec<(usize, C64)> = n_range
        .par_iter()
        .map(|&n| -> Result<(usize, C64)> {
            let ctx = DispersionContext::new(n, profile)?;
            let depth = 64.0 * ((n * n) as f64 / (profile.radius * profile.radius)).max(16.0);
            Ok((n, dominant_root(&ctx, depth, opts)?.s))
        })
        .collect::<Result<_>>()?;
    let delta0 = dominant
        .iter()
        .map(|(n, s)| -s.re / (*n * *n) as f64)
        .fold(f64::INFINITY, f64::min);
    let monotone = dominant.windows(2).all(|w| w[1].1.re < w[0].1.re);
    Ok(LargeNReport {
        pass: delta0 > 0.0 && monotone,
        dominant,
        delta0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationTable {
    pub beta: f64,
    pub sigma_tilde: f64,
    pub radius: f64,
    pub mu_1: f64,
    /// `(n, μ_n)` for `n = 2..=n_max`.
    pub mu_n: Vec<(usize, f64)>,
    pub increasing: bool,
}

pub fn bifurcation_table(beta: f64, sigma_tilde: f64, n_max: usize) -> Result<BifurcationTable> {
    let radius = crate::stationary::solve_radius(beta, sigma_tilde)?;
    table_at_radius(beta, sigma_tilde, radius, n_max)
}

/// As [`bifurcation_table`] with the stationary radius already known.
pub fn table_at_radius(beta: f64, sigma_tilde: f64, radius: f64, n_max: usize) -> Result<BifurcationTable> {
    let mu_1 = mu_bifurcation(1, radius, beta)?;
    let mu_n: Vec<(usize, f64)> = (2..=n_max)
        .map(|n| Ok((n, mu_bifurcation(n, radius, beta)?)))
        .collect::<Result<_>>()?;
    let increasing = mu_n.windows(2).all(|w| w[1].1 > w[0].1);
    Ok(BifurcationTable {
        beta,
        sigma_tilde,
        radius,
        mu_1,
        mu_n,
        increasing,
    })
}

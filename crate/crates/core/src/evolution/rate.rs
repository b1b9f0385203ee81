use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// Slope of `log|ρ|`.
    pub rate: f64,
    pub intercept: f64,
    /// RMS misfit of the log samples used.
    pub residual: f64,
    /// The signal oscillates: the slope was fitted to the peaks of `|ρ|`
    /// and the dominant exponent is a complex pair.
    pub complex_pair: bool,
    pub points: usize,
}

impl RateFit {
    /// `exp(intercept + rate t)`.
    pub fn envelope(&self, t: f64) -> f64 {
        (self.intercept + self.rate * t).exp()
    }
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mt;
    let rms = (pts.iter().map(|p| (p.1 - icept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    (slope, icept, rms)
}

/// Exponential rate of `ρ(t)` on the trailing `fit_window` fraction of the
/// time span. A damped oscillation is recognised by a two-term linear
/// prediction fit, which needs less than one period; failing that, a real
/// signal that changes sign is fitted through its peaks.
pub fn decay_rate(t: &[f64], rho: &[C64], fit_window: f64) -> Result<RateFit> {
    if t.len() != rho.len() {
        return Err(Error::GridMismatch {
            expected: t.len(),
            got: rho.len(),
        });
    }
    if !(fit_window > 0.0 && fit_window <= 1.0) {
        return Err(Error::validation("fit_window", "must lie in (0, 1]"));
    }
    if t.len() < 4 {
        return Err(Error::validation("trajectory", "needs at least four samples"));
    }
    let t_end = t[t.len() - 1];
    let t_start = t_end - fit_window * (t_end - t[0]);
    let first = t.iter().position(|&x| x >= t_start).unwrap_or(0);
    let (tw, rw) = (&t[first..], &rho[first..]);

    // Oscillation is judged on the larger component.
    let use_re = rw.iter().map(|v| v.re.abs()).sum::<f64>() >= rw.iter().map(|v| v.im.abs()).sum::<f64>();
    let comp: Vec<f64> = rw.iter().map(|v| if use_re { v.re } else { v.im }).collect();
    let sign_changes = comp.windows(2).filter(|w| w[0] * w[1] < 0.0).count();

    if let Some(fit) = pair_fit(tw, &comp) {
        return Ok(fit);
    }
    if sign_changes >= 2 {
        let peaks = peaks_of_abs(tw, &comp);
        if peaks.len() < 2 {
            return Err(Error::validation(
                "fit_window",
                "oscillating signal has fewer than two peaks in the window",
            ));
        }
        let (rate, intercept, residual) = least_squares(&peaks);
        return Ok(RateFit {
            rate,
            intercept,
            residual,
            complex_pair: true,
            points: peaks.len(),
        });
    }
    if rw.iter().any(|v| v.norm() == 0.0) {
        return Err(Error::validation("trajectory", "zero sample inside the fit window"));
    }
    let pts: Vec<(f64, f64)> = tw.iter().zip(rw).map(|(&t, v)| (t, v.norm().ln())).collect();
    let (rate, intercept, residual) = least_squares(&pts);
    Ok(RateFit {
        rate,
        intercept,
        residual,
        complex_pair: false,
        points: pts.len(),
    })
}

/// Samples used by the linear prediction fit.
const PAIR_SAMPLES: usize = 128;

/// Fits `x_{k+2} = a1 x_{k+1} + a0 x_k` on evenly strided samples. Accepts
/// the result only if the characteristic roots are a complex pair and the
/// two-term model beats the one-term one by a wide margin, so a real decay
/// with small contamination is never reported as oscillating.
fn pair_fit(t: &[f64], x: &[f64]) -> Option<RateFit> {
    let len = t.len();
    if len < 8 {
        return None;
    }
    let dt = t[1] - t[0];
    if !(dt > 0.0) || t.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt) {
        return None;
    }
    let stride = ((len - 1) / PAIR_SAMPLES).max(1);
    let xs: Vec<f64> = x.iter().step_by(stride).copied().collect();
    let ts: Vec<f64> = t.iter().step_by(stride).copied().collect();
    if xs.len() < 6 {
        return None;
    }
    let delta = dt * stride as f64;
    let scale = xs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let y: Vec<f64> = xs.iter().map(|v| v / scale).collect();

    // one-term residual
    let (mut num1, mut den1) = (0.0, 0.0);
    for w in y.windows(2) {
        num1 += w[1] * w[0];
        den1 += w[0] * w[0];
    }
    let a = num1 / den1;
    let r1: f64 = y.windows(2).map(|w| (w[1] - a * w[0]).powi(2)).sum::<f64>().sqrt();

    // two-term normal equations in (a1, a0)
    let (mut s11, mut s10, mut s00, mut b1, mut b0) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for w in y.windows(3) {
        s11 += w[1] * w[1];
        s10 += w[1] * w[0];
        s00 += w[0] * w[0];
        b1 += w[2] * w[1];
        b0 += w[2] * w[0];
    }
    let det = s11 * s00 - s10 * s10;
    if !(det.abs() > 1e-13 * (s11 * s00)) {
        return None;
    }
    let a1 = (b1 * s00 - b0 * s10) / det;
    let a0 = (s11 * b0 - s10 * b1) / det;
    let r2: f64 = y
        .windows(3)
        .map(|w| (w[2] - a1 * w[1] - a0 * w[0]).powi(2))
        .sum::<f64>()
        .sqrt();
    let disc = a1 * a1 + 4.0 * a0;
    if disc >= 0.0 || !(r2 < 1e-2 * r1) {
        return None;
    }
    let z = C64::new(0.5 * a1, 0.5 * (-disc).sqrt());
    let s = z.ln() / delta;
    if s.im.abs() < 1e-6 * s.norm() {
        return None;
    }
    // amplitude: x ≈ e^{σt}(p cos ωt + q sin ωt)
    let (mut cc, mut cs, mut ss, mut xc, mut xsn) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&tk, &xk) in ts.iter().zip(&xs) {
        let e = (s.re * (tk - ts[0])).exp();
        let (c, sn) = ((s.im * tk).cos() * e, (s.im * tk).sin() * e);
        cc += c * c;
        cs += c * sn;
        ss += sn * sn;
        xc += xk * c;
        xsn += xk * sn;
    }
    let d = cc * ss - cs * cs;
    if !(d.abs() > 0.0) {
        return None;
    }
    let p = (xc * ss - xsn * cs) / d;
    let q = (cc * xsn - cs * xc) / d;
    let amp = p.hypot(q);
    if !(amp > 0.0) {
        return None;
    }
    Some(RateFit {
        rate: s.re,
        intercept: amp.ln() - s.re * ts[0],
        residual: r2 / (y.len() as f64).sqrt(),
        complex_pair: true,
        points: y.len(),
    })
}

/// Local maxima of `|x|` strictly inside the window, refined by a parabola
/// through the three log samples around each one; returns `(t, log|x|)`.
fn peaks_of_abs(t: &[f64], x: &[f64]) -> Vec<(f64, f64)> {
    let a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let mut out = Vec::new();
    for k in 1..a.len().saturating_sub(1) {
        if a[k] > a[k - 1] && a[k] >= a[k + 1] && a[k] > 0.0 && a[k - 1] > 0.0 && a[k + 1] > 0.0 {
            let (l0, l1, l2) = (a[k - 1].ln(), a[k].ln(), a[k + 1].ln());
            let den = l0 - 2.0 * l1 + l2;
            let (h0, h1) = (t[k] - t[k - 1], t[k + 1] - t[k]);
            let h = 0.5 * (h0 + h1);
            if den < 0.0 {
                let off = 0.5 * (l0 - l2) / den;
                out.push((t[k] + off * h, l1 - 0.25 * (l0 - l2) * off));
            } else {
                out.push((t[k], l1));
            }
        }
    }
    out
}

//! Zeros of an analytic function inside a rectangle by the argument
//! principle: adaptive Gauss–Kronrod on the logarithmic derivative, moment
//! estimates for isolated zeros, recursive subdivision, Newton polish.

use std::collections::BinaryHeap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A function with a computable value and derivative.
pub trait Analytic: Sync {
    fn eval(&self, s: C64) -> Result<(C64, C64)>;

    /// Logarithmic derivative `f'/f`.
    fn log_derivative(&self, s: C64) -> Result<C64> {
        let (v, d) = self.eval(s)?;
        Ok(d / v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn center(&self) -> C64 {
        C64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn contains(&self, s: C64, slack: f64) -> bool {
        s.re >= self.re_min - slack
            && s.re <= self.re_max + slack
            && s.im >= self.im_min - slack
            && s.im <= self.im_max + slack
    }

    fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.re_min, self.im_min),
            C64::new(self.re_max, self.im_min),
            C64::new(self.re_max, self.im_max),
            C64::new(self.re_min, self.im_max),
        ]
    }

    fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }
}

/// A located zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    pub s: C64,
    /// `|f(s)|` after polishing.
    pub residual: f64,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, Copy)]
pub struct ContourOptions {
    pub max_depth: usize,
    /// Absolute tolerance on each contour integral (before division by 2πi).
    pub integral_tol: f64,
    pub max_intervals: usize,
    pub newton_tol: f64,
}

impl Default for ContourOptions {
    fn default() -> Self {
        ContourOptions {
            max_depth: 40,
            integral_tol: 1e-7,
            max_intervals: 6000,
            newton_tol: 1e-14,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// `∮ f'/f ds` and `∮ s f'/f ds` along a straight segment.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    m0: C64,
    m1: C64,
}

impl std::ops::Add for Moments {
    type Output = Moments;
    fn add(self, o: Moments) -> Moments {
        Moments {
            m0: self.m0 + o.m0,
            m1: self.m1 + o.m1,
        }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: Moments,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn gk_piece(f: &dyn Analytic, z0: C64, dz: C64, a: f64, b: f64) -> Result<Piece> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut kron = Moments::default();
    let mut gauss = Moments::default();
    let mut point = |t: f64, wk: f64, wg: f64| -> Result<()> {
        let s = z0 + dz * t;
        let ld = f.log_derivative(s)?;
        if !(ld.re.is_finite() && ld.im.is_finite()) {
            return Err(Error::Contour(format!("non-finite log-derivative at {s}")));
        }
        let v = ld * dz * half;
        kron.m0 += v * wk;
        kron.m1 += v * s * wk;
        gauss.m0 += v * wg;
        gauss.m1 += v * s * wg;
        Ok(())
    };
    for i in 0..7 {
        let x = half * XGK[i];
        let wg = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
        point(mid - x, WGK[i], wg)?;
        point(mid + x, WGK[i], wg)?;
    }
    point(mid, WGK[7], WG[3])?;
    let err = (kron.m0 - gauss.m0).norm();
    Ok(Piece {
        a,
        b,
        value: kron,
        err,
    })
}

/// Adaptive integral of the log-derivative along the segment `z0 -> z1`.
fn segment(f: &dyn Analytic, z0: C64, z1: C64, opts: &ContourOptions) -> Result<Moments> {
    let dz = z1 - z0;
    let mut heap = BinaryHeap::new();
    heap.push(gk_piece(f, z0, dz, 0.0, 1.0)?);
    let mut total_err = heap.peek().map(|p| p.err).unwrap_or(0.0);
    let mut count = 1;
    while total_err > opts.integral_tol {
        if count >= opts.max_intervals {
            return Err(Error::Contour(format!(
                "segment {z0} -> {z1} needs more than {} panels; a zero or pole is on or very near the contour",
                opts.max_intervals
            )));
        }
        let worst = heap.pop().expect("non-empty");
        let m = 0.5 * (worst.a + worst.b);
        if worst.b - worst.a < 1e-15 {
            return Err(Error::Contour(format!(
                "singularity on contour near {}",
                z0 + dz * m
            )));
        }
        let left = gk_piece(f, z0, dz, worst.a, m)?;
        let right = gk_piece(f, z0, dz, m, worst.b)?;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        count += 1;
        if count % 64 == 0 {
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    Ok(heap
        .into_iter()
        .fold(Moments::default(), |acc, p| acc + p.value))
}

/// Boundary moments of a rectangle, counter-clockwise.
fn rect_moments(f: &dyn Analytic, r: &Rect, opts: &ContourOptions) -> Result<Moments> {
    let c = r.corners();
    let mut total = Moments::default();
    for k in 0..4 {
        total = total + segment(f, c[k], c[(k + 1) % 4], opts)?;
    }
    Ok(total)
}

fn winding(m: &Moments) -> Result<i64> {
    let n = m.m0 / C64::new(0.0, 2.0 * std::f64::consts::PI);
    let k = n.re.round();
    if (n.re - k).abs() > 0.1 || n.im.abs() > 0.1 {
        return Err(Error::Contour(format!(
            "winding number {n} is not close to an integer"
        )));
    }
    Ok(k as i64)
}

/// Number of zeros (minus poles) of `f` inside `rect`.
pub fn count_zeros(f: &dyn Analytic, rect: &Rect, opts: &ContourOptions) -> Result<i64> {
    winding(&rect_moments(f, rect, opts)?)
}

/// Newton iteration; returns the converged point or `None`.
pub fn newton(f: &dyn Analytic, start: C64, tol: f64, max_iter: usize) -> Option<C64> {
    let mut s = start;
    for _ in 0..max_iter {
        let ld = f.log_derivative(s).ok()?;
        if !(ld.re.is_finite() && ld.im.is_finite()) || ld.norm() == 0.0 {
            return None;
        }
        let step = 1.0 / ld;
        s -= step;
        if step.norm() <= tol * s.norm().max(1.0) {
            // one more step to reach the floor
            if let Ok(ld) = f.log_derivative(s) {
                let st = 1.0 / ld;
                if st.re.is_finite() && st.norm() < step.norm() {
                    s -= st;
                }
            }
            return Some(s);
        }
    }
    None
}

/// Newton for a zero of known multiplicity `k`.
fn modified_newton(f: &dyn Analytic, start: C64, k: f64, tol: f64) -> Option<C64> {
    let mut s = start;
    for _ in 0..100 {
        let ld = f.log_derivative(s).ok()?;
        if !(ld.re.is_finite() && ld.im.is_finite()) || ld.norm() == 0.0 {
            return Some(s);
        }
        let step = k / ld;
        s -= step;
        if step.norm() <= tol * s.norm().max(1.0) {
            return Some(s);
        }
    }
    Some(s)
}

const SPLITS:[f64; 6] = [0.5 - 0.0317, 0.5 + 0.0429, 0.5 - 0.0871, 0.5 + 0.1133, 0.37, 0.63];

/// All zeros of `f` in `rect`, where `f` must have no poles inside `rect`.
/// `avoid` lists points (typically real poles outside the admissible set)
/// that subdivision lines must not cross.
pub fn find_zeros(
    f: &dyn Analytic,
    rect: &Rect,
    avoid: &[f64],
    opts: &ContourOptions,
) -> Result<Vec<Zero>> {
    let moments = rect_moments(f, rect, opts)?;
    let mut out = Vec::new();
    solve(f, rect, moments, avoid, opts, 0, &mut out)?;
    out.sort_by(|a, b| b.s.re.total_cmp(&a.s.re).then(a.s.im.total_cmp(&b.s.im)));
    Ok(out)
}

fn residual(f: &dyn Analytic, s: C64) -> f64 {
    f.eval(s).map(|(v, _)| v.norm()).unwrap_or(f64::INFINITY)
}

fn solve(
    f: &dyn Analytic,
    rect: &Rect,
    moments: Moments,
    avoid: &[f64],
    opts: &ContourOptions,
    depth: usize,
    out: &mut Vec<Zero>,
) -> Result<()> {
    let count = winding(&moments)?;
    if count < 0 {
        return Err(Error::Contour(format!(
            "negative winding {count}: a pole lies inside the region"
        )));
    }
    if count == 0 {
        return Ok(());
    }
    let slack = 1e-9 * rect.diameter().max(1.0);
    if count == 1 {
        let estimate = moments.m1 / moments.m0;
        for start in [estimate, rect.center()] {
            if let Some(s) = newton(f, start, opts.newton_tol, 80) {
                if rect.contains(s, slack) {
                    out.push(Zero {
                        s,
                        residual: residual(f, s),
                        multiplicity: 1,
                    });
                    return Ok(());
                }
            }
        }
    }
    let scale = rect.center().norm().max(1.0);
    if count >= 2 {
        // all zeros may coincide: test a tiny box around their centroid
        let c = moments.m1 / moments.m0;
        let s = modified_newton(f, c, count as f64, opts.newton_tol).unwrap_or(c);
        let d = 1e-7 * scale;
        let tiny = Rect::new(s.re - d, s.re + d, s.im - d, s.im + d);
        if rect.contains(s, slack) {
            if let Ok(k) = count_zeros(f, &tiny, opts) {
                if k == count {
                    out.push(Zero {
                        s,
                        residual: residual(f, s),
                        multiplicity: count as u32,
                    });
                    return Ok(());
                }
            }
        }
    }
    if rect.diameter() < 1e-9 * scale {
        // a cluster or a multiple zero that no further split can separate
        let c = rect.center();
        let s = newton(f, c, opts.newton_tol, 200).unwrap_or(c);
        out.push(Zero {
            s,
            residual: residual(f, s),
            multiplicity: count as u32,
        });
        return Ok(());
    }
    if depth >= opts.max_depth {
        return Err(Error::UnresolvedRegion {
            re_min: rect.re_min,
            re_max: rect.re_max,
            im_min: rect.im_min,
            im_max: rect.im_max,
            count,
        });
    }
    let vertical = rect.width() >= rect.height();
    let mut last_err = None;
    for frac in SPLITS {
        let (a, b) = if vertical {
            let x = rect.re_min + frac * rect.width();
            let near = avoid
                .iter()
                .any(|&p| (p - x).abs() < 1e-6 * rect.width() && rect.im_min <= 0.0 && rect.im_max >= 0.0);
            if near {
                continue;
            }
            (
                Rect::new(rect.re_min, x, rect.im_min, rect.im_max),
                Rect::new(x, rect.re_max, rect.im_min, rect.im_max),
            )
        } else {
            let y = rect.im_min + frac * rect.height();
            (
                Rect::new(rect.re_min, rect.re_max, rect.im_min, y),
                Rect::new(rect.re_min, rect.re_max, y, rect.im_max),
            )
        };
        let ma = match rect_moments(f, &a, opts) {
            Ok(m) => m,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let mb = Moments {
            m0: moments.m0 - ma.m0,
            m1: moments.m1 - ma.m1,
        };
        let (ca, cb) = match (winding(&ma), winding(&mb)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(e), _) | (_, Err(e)) => {
                last_err = Some(e);
                continue;
            }
        };
        if ca + cb != count || ca < 0 || cb < 0 {
            last_err = Some(Error::Contour(format!(
                "subdivision counts {ca} + {cb} != {count}"
            )));
            continue;
        }
        solve(f, &a, ma, avoid, opts, depth + 1, out)?;
        solve(f, &b, mb, avoid, opts, depth + 1, out)?;
        return Ok(());
    }
    Err(last_err.unwrap_or(Error::Contour("no admissible subdivision".into())))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Poly(Vec<C64>);

    impl Analytic for Poly {
        fn eval(&self, s: C64) -> Result<(C64, C64)> {
            let mut v = C64::new(1.0, 0.0);
            let mut d = C64::new(0.0, 0.0);
            for &r in &self.0 {
                d = d * (s - r) + v;
                v *= s - r;
            }
            Ok((v, d))
        }
    }

    #[test]
    fn finds_known_zeros() {
        let roots = vec![
            C64::new(0.3, 0.4),
            C64::new(0.3, -0.4),
            C64::new(-1.7, 0.0),
            C64::new(2.2, 1.1),
        ];
        let f = Poly(roots.clone());
        let z = find_zeros(&f, &Rect::new(-3.0, 3.0, -2.0, 2.0), &[], &ContourOptions::default()).unwrap();
        assert_eq!(z.len(), 4);
        for r in roots {
            assert!(z.iter().any(|x| (x.s - r).norm() < 1e-12));
        }
    }

    #[test]
    fn double_zero_reported_with_multiplicity() {
        let f = Poly(vec![C64::new(0.25, 0.0), C64::new(0.25, 0.0)]);
        let z = find_zeros(&f, &Rect::new(-1.0, 1.0, -1.0, 1.0), &[], &ContourOptions::default()).unwrap();
        let total: u32 = z.iter().map(|z| z.multiplicity).sum();
        assert_eq!(total, 2);
        assert!(z.iter().all(|z| (z.s - 0.25).norm() < 1e-6));
    }

    #[test]
    fn empty_region() {
        let f = Poly(vec![C64::new(5.0, 0.0)]);
        let n = count_zeros(&f, &Rect::new(-1.0, 1.0, -1.0, 1.0), &ContourOptions::default()).unwrap();
        assert_eq!(n, 0);
    }
}

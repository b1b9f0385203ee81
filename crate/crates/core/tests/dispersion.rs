mod common;

use common::*;
use num_complex::Complex64 as C64;
use rand::Rng;
use tumorstab::dispersion::*;
use tumorstab::special::bessel_zeros;
use tumorstab::stationary::*;

/// `h_n(s)` assembled from the series oracle.
fn h_oracle(n: usize, s: C64, p: &StationaryProfile) -> C64 {
    let (r, b, mu) = (p.radius, p.params.beta, p.params.mu);
    let p0 = p0_closed(r);
    let p1 = ratio_series(1, C64::new(r * r, 0.0)).re;
    let k = (b + r * p0) / (b * r * p0);
    let nf = n as f64;
    let e_n = nf * (nf - 1.0) * (nf + 2.0) / (2.0 * r * r * r);
    let big_n = r * r * p1 + 1.0 + b * r;
    let pt = ratio_series(n, (s + 1.0) * r * r);
    k / mu * (s + e_n) - r * p1 + big_n * pt / ((s + 1.0) * r * pt + nf / r + b)
}

#[test]
fn radius_matches_bisection_oracle() {
    for &b in &[0.2, 1.0, 3.0, 20.0] {
        for &st in &[0.1, 0.5, 0.9] {
            let want = radius_oracle(b, st);
            let got = solve_radius(b, st).unwrap();
            assert!((got - want).abs() <= 1e-11 * want, "beta={b} st={st}: {got} vs {want}");
        }
    }
}

#[test]
fn stationary_equations_hold() {
    for &(b, st, mu) in &[(1.0, 0.5, 3.0), (0.3, 0.2, 10.0), (5.0, 0.8, 0.5)] {
        let p = profile(b, st, mu);
        let r = residual_check(&p, 2000).unwrap();
        for v in [r.nutrient, r.pressure, r.robin, r.curvature] {
            assert!(v <= 1e-9, "{r:?}");
        }
    }
}

#[test]
fn radius_rejects_bad_threshold() {
    assert!(solve_radius(1.0, 1.2).is_err());
    assert!(ModelParams::new(1.0, 0.0, 1.0).unwrap_err().is_validation());
}

#[test]
fn dispersion_matches_series_oracle() {
    let p = profile(1.3, 0.4, 2.5);
    let mut rng = rng(3);
    for _ in 0..200 {
        let n = rng.gen_range(0..=8);
        let s = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-5.0..5.0));
        let ctx = DispersionContext::new(n, &p).unwrap();
        let got = ctx.h(s).unwrap();
        let want = h_oracle(n, s, &p);
        assert!((got - want).norm() <= 1e-11 * want.norm().max(1.0), "n={n} s={s}");
        assert!((ctx.h(s.conj()).unwrap() - got.conj()).norm() <= 1e-13 * got.norm().max(1.0));
    }
}

#[test]
fn translation_zero_for_random_parameters() {
    let mut rng = rng(17);
    for _ in 0..200 {
        let (b, st, mu) = (rng.gen_range(0.1..10.0), rng.gen_range(0.05..0.95), rng.gen_range(0.1..50.0));
        let ctx = DispersionContext::new(1, &profile(b, st, mu)).unwrap();
        let h = ctx.h(C64::new(0.0, 0.0)).unwrap();
        assert!(h.norm() <= 1e-10, "beta={b} st={st} mu={mu}: {h}");
    }
}

#[test]
fn bifurcation_values_zero_the_dispersion_at_origin() {
    let mut rng = rng(23);
    for _ in 0..10 {
        let (b, st) = (rng.gen_range(0.2..5.0), rng.gen_range(0.1..0.9));
        let base = profile(b, st, 1.0);
        for n in 2..=10 {
            let mu_n = mu_bifurcation(n, base.radius, b).unwrap();
            let ctx = DispersionContext::new(n, &base.with_mu(mu_n)).unwrap();
            let h = ctx.h(C64::new(0.0, 0.0)).unwrap();
            assert!(h.norm() <= 1e-9, "n={n}: {h}");
            // independent evaluation agrees
            assert!(h_oracle(n, C64::new(0.0, 0.0), &base.with_mu(mu_n)).norm() <= 1e-9);
        }
    }
}

#[test]
fn real_roots_match_a_sign_change_scan() {
    let p = profile(1.0, 0.5, 3.0);
    for n in [0, 2, 3, 5] {
        let ctx = DispersionContext::new(n, &p).unwrap();
        let right = ctx.real_bound().max(0.0) + 1.0;
        let y = ctx.imag_bound() + 1.0;
        let set = find_roots(&ctx, Rect::new(-20.0, right, -y, y), &ContourOptions::default()).unwrap();
        let mut found: Vec<f64> = set.roots.iter().filter(|z| z.s.im.abs() < 1e-8).map(|z| z.s.re).collect();
        found.sort_by(f64::total_cmp);
        // sign changes of h on the real axis are zeros or poles; poles blow up
        let h = |x: f64| h_oracle(n, C64::new(x, 0.0), &p).re;
        let scanned: Vec<f64> = real_zeros(h, -19.999, right, 200_000)
            .into_iter()
            .filter(|&x| h(x).abs() < 1e-6)
            .collect();
        assert_eq!(found.len(), scanned.len(), "n={n}: {found:?} vs {scanned:?}");
        for (a, b) in found.iter().zip(&scanned) {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "n={n}: {a} vs {b}");
        }
        for z in &set.roots {
            assert!(z.residual <= 1e-10, "n={n} {z:?}");
            assert!(h_oracle(n, z.s, &p).norm() <= 1e-8 * (1.0 + z.s.norm()), "n={n} {z:?}");
        }
    }
}

#[test]
fn complex_roots_come_in_conjugate_pairs() {
    let p = profile(1.0, 0.5, 3.8);
    let ctx = DispersionContext::new(0, &p).unwrap();
    let y = ctx.imag_bound() + 1.0;
    let set = find_roots(&ctx, Rect::new(-20.0, 2.0, -y, y), &ContourOptions::default()).unwrap();
    let complex: Vec<C64> = set.roots.iter().map(|z| z.s).filter(|s| s.im.abs() > 1e-6).collect();
    assert!(!complex.is_empty());
    for s in &complex {
        assert!(complex.iter().any(|t| (t - s.conj()).norm() < 1e-9), "{s}");
    }
    let dom = dominant_root(&ctx, 50.0, &ContourOptions::default()).unwrap();
    assert!(dom.s.im > 0.0);
    assert!((dom.s.re - set.roots[0].s.re).abs() < 1e-12);
}

#[test]
fn translation_zero_is_reported_and_can_be_excluded() {
    let p = profile(1.0, 0.5, 3.0);
    let ctx = DispersionContext::new(1, &p).unwrap();
    let region = Rect::new(-10.0, 1.0, -3.0, 3.0);
    let with = find_roots(&ctx, region, &ContourOptions::default()).unwrap();
    let without = find_roots_excluding_translation(&ctx, region, &ContourOptions::default()).unwrap();
    assert!(with.roots.iter().any(|z| z.s.norm() < 1e-10));
    assert!(without.roots.iter().all(|z| z.s.norm() > 1e-3));
    assert_eq!(with.roots.len(), without.roots.len() + 1);
}

#[test]
fn bifurcation_values_increase() {
    for &(b, st) in &[(1.0, 0.5), (0.3, 0.2), (4.0, 0.8)] {
        let t = bifurcation_table(b, st, 20).unwrap();
        assert!(t.increasing, "{t:?}");
        assert!(t.mu_n.windows(2).all(|w| w[1].1 > w[0].1));
        assert_eq!(t.mu_n.first().unwrap().0, 2);
        assert_eq!(t.mu_n.last().unwrap().0, 20);
    }
}

#[test]
fn threshold_flip() {
    let star = mu_star(1.0, 0.5, &MuStarOptions::default(), &ContourOptions::default()).unwrap();
    assert!(star.mu_star <= star.mu_2 * (1.0 + 1e-12) && star.mu_star < star.mu_1);
    let base = profile(1.0, 0.5, 1.0);
    let below = base.with_mu(0.99 * star.mu_star);
    let above = base.with_mu(1.01 * star.mu_star);
    let opts = ContourOptions::default();
    let mut grows = false;
    for n in [0, 2, 3, 4, 5, 6, 8, 10] {
        let lo = dominant_root(&DispersionContext::new(n, &below).unwrap(), 200.0, &opts).unwrap();
        assert!(lo.s.re < 0.0, "n={n} below: {lo:?}");
        let hi = dominant_root(&DispersionContext::new(n, &above).unwrap(), 200.0, &opts).unwrap();
        grows |= hi.s.re > 0.0;
    }
    assert!(grows);
}

#[test]
fn large_mode_bound() {
    let p = profile(1.0, 0.5, 3.0);
    let rep = large_n_bound_check(&p, &[20, 30, 40], &ContourOptions::default()).unwrap();
    assert!(rep.pass && rep.delta0 > 0.0, "{rep:?}");

    let n = 30;
    let r = p.radius;
    let j = bessel_zeros(n, 1)[0];
    let (lo, hi) = (-1.0 - (j / r).powi(2), -((n * n) as f64) / (3.0 * r * r));
    let ctx = DispersionContext::new(n, &p).unwrap();
    let set = find_roots(&ctx, Rect::new(lo - 5.0, 1.0, -1.0, 1.0), &ContourOptions::default()).unwrap();
    let first = set
        .roots
        .iter()
        .filter(|z| z.s.im.abs() < 1e-8)
        .map(|z| z.s.re)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(lo < first && first < hi, "{lo} < {first} < {hi}");
}

#[test]
fn rejects_zero_mu() {
    let p = profile(1.0, 0.5, 1.0).with_mu(0.0);
    assert!(DispersionContext::new(2, &p).unwrap_err().is_validation());
    assert!(mu_bifurcation(0, 2.0, 1.0).is_err());
}

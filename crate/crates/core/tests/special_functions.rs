mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64 as C64;
use rand::Rng;
use tumorstab::special::*;
use tumorstab::Error;

#[test]
fn bessel_i_matches_power_series() {
    for n in 0..=12 {
        for &x in &[0.05, 0.3, 1.0, 2.5, 7.0, 15.0, 30.0] {
            let want = bessel_i_series(n, x);
            let got = bessel_i_half(n, x).unwrap();
            assert!((got - want).abs() <= 1e-12 * want.abs(), "n={n} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn bessel_i_low_orders_match_closed_forms() {
    for &x in &[0.01, 0.5, 3.0, 20.0] {
        let k = (2.0 / (PI * x)).sqrt();
        let i0 = k * x.sinh();
        let i1 = k * (x.cosh() - x.sinh() / x);
        assert!((bessel_i_half(0, x).unwrap() - i0).abs() <= 1e-13 * i0);
        // I_{3/2} cancels in closed form for small x; compare at the series level there
        let tol = if x < 0.1 { 1e-8 } else { 1e-13 };
        assert!((bessel_i_half(1, x).unwrap() - i1).abs() <= tol * i1, "x={x}");
    }
}

#[test]
fn three_term_recurrence_holds() {
    // I_{ν-1}(x) - I_{ν+1}(x) = (2ν/x) I_ν(x), on the scaled functions
    for n in 1..=40 {
        let nu = n as f64 + 0.5;
        for &x in &[0.2, 1.0, 5.0, 40.0, 300.0, 2000.0] {
            let lo = bessel_i_half_scaled(n - 1, x).unwrap();
            let mid = bessel_i_half_scaled(n, x).unwrap();
            let hi = bessel_i_half_scaled(n + 1, x).unwrap();
            let res = (lo - hi - 2.0 * nu / x * mid).abs() / lo.abs().max(hi.abs());
            assert!(res <= 1e-11, "n={n} x={x}: {res:e}");
        }
    }
}

#[test]
fn unscaled_overflow_is_reported() {
    assert!(matches!(bessel_i_half(3, 800.0), Err(Error::Overflow { .. })));
    assert!(bessel_i_half_scaled(3, 800.0).unwrap().is_finite());
}

#[test]
fn ratio_matches_series_in_the_complex_plane() {
    let mut rng = rng(11);
    for _ in 0..400 {
        let n = rng.gen_range(0..=12);
        let u = C64::from_polar(rng.gen_range(0.0..60.0), rng.gen_range(-PI..PI));
        let want = ratio_series(n, u);
        match ratio(n, u) {
            Ok(got) => assert!((got - want).norm() <= 1e-11 * want.norm(), "n={n} u={u}: {got} vs {want}"),
            Err(Error::PoleProximity { .. }) => {}
            Err(e) => panic!("n={n} u={u}: {e}"),
        }
    }
}

#[test]
fn ratio_poles_sit_at_bessel_zeros() {
    // residue 2 at u = -j², so (u + j²) P̃ → 2
    for n in [0, 3, 8] {
        for &j in &bessel_zeros(n, 3) {
            let u = C64::new(-j * j + 1e-5, 0.0);
            let r = ratio(n, u).unwrap();
            assert!(((u + j * j) * r - 2.0).norm() < 1e-4, "n={n} j={j}");
        }
    }
}

#[test]
fn ratio_near_pole_is_refused() {
    let j = bessel_zeros(2, 1)[0];
    let e = ratio(2, C64::new(-j * j, 1e-14)).unwrap_err();
    assert!(matches!(e, Error::PoleProximity { n: 2, m: 1, .. }), "{e}");
}

#[test]
fn zeros_are_zeros_of_spherical_bessel() {
    for n in [0, 1, 2, 5, 10, 30] {
        let zs = bessel_zeros(n, 6);
        assert_eq!(zs.len(), 6);
        for w in zs.windows(2) {
            assert!(w[1] - w[0] > PI * 0.99, "n={n} spacing {w:?}");
        }
        for &z in &zs {
            let left = spherical_jn(n, z * (1.0 - 1e-9));
            let right = spherical_jn(n, z * (1.0 + 1e-9));
            assert!(left * right < 0.0, "n={n} z={z}: {left} {right}");
        }
    }
    // n = 0: the zeros are mπ
    for (m, z) in bessel_zeros(0, 5).iter().enumerate() {
        assert!((z - (m + 1) as f64 * PI).abs() < 1e-12);
    }
}

#[test]
fn no_zero_is_skipped() {
    // count sign changes of the oracle up to the tenth zero
    for n in [1, 4, 12] {
        let zs = bessel_zeros(n, 10);
        let top = zs[9] + 0.5;
        let oracle = real_zeros(|x| spherical_jn(n, x), 0.5, top, 20000);
        assert_eq!(oracle.len(), 10, "n={n}");
        for (a, b) in oracle.iter().zip(&zs) {
            assert!((a - b).abs() < 1e-9 * b, "n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn p0_and_derivative_closed_forms() {
    for &xi in &[0.5, 1.0, 2.0, 4.0, 10.0] {
        assert!((p0(xi) - p0_closed(xi)).abs() <= 1e-13 * p0_closed(xi));
        assert!((p0(xi) - ratio_series(0, C64::new(xi * xi, 0.0)).re).abs() <= 1e-13);
        let d = p1_prime(xi).unwrap();
        let h = 1e-5;
        let fd = (ratio_real(1, xi + h).unwrap() - ratio_real(1, xi - h).unwrap()) / (2.0 * h);
        assert!((d - fd).abs() < 1e-8, "xi={xi}");
        assert!((d - p1_prime_closed(xi)).abs() < 1e-9 * d.abs().max(1.0), "xi={xi}");
    }
}

#[test]
fn harmonics_low_orders() {
    let c = |t: f64| t.cos();
    for &(t, p) in &[(0.3, 0.1), (1.2, 2.0), (2.8, -1.0)] {
        let y10 = (3.0 / (4.0 * PI)).sqrt() * c(t);
        let y20 = (5.0 / (16.0 * PI)).sqrt() * (3.0 * c(t) * c(t) - 1.0);
        let y11 = -(3.0 / (8.0 * PI)).sqrt() * f64::sin(t) * C64::from_polar(1.0, p);
        assert!((ylm(1, 0, t, p) - y10).norm() < 1e-14);
        assert!((ylm(2, 0, t, p) - y20).norm() < 1e-14);
        assert!((ylm(1, 1, t, p) - y11).norm() < 1e-14);
        assert!((ylm(1, -1, t, p) + y11.conj()).norm() < 1e-14);
    }
}

#[test]
fn projection_recovers_coefficients() {
    let band = 6;
    let grid = SphereGrid::new(band);
    let mut rng = rng(5);
    let mut c = ModeCoefficients::zeros(band);
    for n in 0..=band {
        c.set(n, 0, C64::new(rng.gen_range(-1.0..1.0), 0.0));
        for m in 1..=n as i64 {
            let v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            c.set(n, m, v);
            c.set(n, -m, sign * v.conj());
        }
    }
    let samples = synthesize(&c, &grid).unwrap();
    let back = project(&samples, &grid, band).unwrap();
    for (a, b) in back.data.iter().zip(&c.data) {
        assert!((a - b).norm() < 1e-12);
    }
    // quadrature exactness: ∫ Y_{2,0}² = 1
    let s = grid.sample(|t, p| ylm(2, 0, t, p).re);
    assert!((project(&s, &grid, 2).unwrap().get(2, 0).re - 1.0).abs() < 1e-13);
}

#[test]
fn gauss_legendre_weights() {
    let (x, w) = gauss_legendre(8);
    assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    // exact for x^14
    let i: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
    assert!((i - 2.0 / 15.0).abs() < 1e-14);
}

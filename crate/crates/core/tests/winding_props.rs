mod common;

use std::f64::consts::PI;

use common::*;
use expsum::{backlund_bound, Complex64, count_zeros, decompose, phase_change, Error, Rectangle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_rect(rng: &mut ChaCha8Rng, x: (f64, f64), y: (f64, f64)) -> Rectangle {
    let (a, b) = (rng.random_range(x.0..x.1), rng.random_range(x.0..x.1));
    let (c, d) = (rng.random_range(y.0..y.1), rng.random_range(y.0..y.1));
    Rectangle::new(a.min(b), a.max(b) + 1e-3, c.min(d), c.max(d) + 1e-3).unwrap()
}

#[test]
fn count_matches_polynomial_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for case in 0..500 {
        let (f, delta, poly) = random_commensurable_poly(&mut rng);
        let roots: Vec<_> = durand_kerner(&poly).into_iter().map(|u| (u, 1)).collect();
        let xs: Vec<f64> = roots.iter().map(|(u, _)| u.norm().ln() / delta).collect();
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0;
        let rect = random_rect(&mut rng, (lo, hi), (-20.0, 20.0));
        let expected = lattice_from_roots(&roots, delta, rect.y_lo, rect.y_hi)
            .into_iter()
            .filter(|(z, _)| z.re >= rect.x_lo && z.re < rect.x_hi)
            .count();
        let got = count_zeros(&f, &rect).unwrap();
        assert_eq!(got.count, expected, "case {case}: {f} on {rect:?}");
    }
}

#[test]
fn edge_phases_sum_to_whole_turns() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let mut checked = 0;
    while checked < 200 {
        let n = rng.random_range(1..=5);
        let f = random_sum(&mut rng, n, 0.0);
        let d = decompose(&f).unwrap();
        let (x_lo, x_hi) = d.spanning_contour();
        let y = rng.random_range(-50.0..50.0);
        let rect = Rectangle::new(x_lo, x_hi, y, y + rng.random_range(1.0..30.0)).unwrap();
        let total: Result<f64, Error> = rect.edges().iter().map(|&(a, b)| phase_change(&f, a, b)).sum();
        let Ok(total) = total else { continue };
        let turns = total / (2.0 * PI);
        assert!((turns - turns.round()).abs() <= 1e-6, "{f}: {turns}");
        assert_eq!(turns.round() as usize, count_zeros(&f, &rect).unwrap().count);
        checked += 1;
    }
}

#[test]
fn counts_add_over_splits() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..200 {
        let n = rng.random_range(1..=5);
        let f = random_sum(&mut rng, n, 0.0);
        let d = decompose(&f).unwrap();
        let (x_lo, x_hi) = d.spanning_contour();
        let rect = random_rect(&mut rng, (x_lo, x_hi), (-40.0, 40.0));
        let whole = count_zeros(&f, &rect).unwrap().count;
        let t: f64 = rng.random_range(0.05..0.95);
        let (a, b) = if rng.random_bool(0.5) {
            let xm = rect.x_lo + t * rect.width();
            (Rectangle { x_hi: xm, ..rect }, Rectangle { x_lo: xm, ..rect })
        } else {
            let ym = rect.y_lo + t * rect.height();
            (Rectangle { y_hi: ym, ..rect }, Rectangle { y_lo: ym, ..rect })
        };
        let parts = count_zeros(&f, &a).unwrap().count + count_zeros(&f, &b).unwrap().count;
        assert_eq!(whole, parts, "{f}: {rect:?} split into {a:?} and {b:?}");
    }
}

#[test]
fn enlarging_never_decreases_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..150 {
        let n = rng.random_range(1..=5);
        let f = random_sum(&mut rng, n, 0.0);
        let d = decompose(&f).unwrap();
        let (x_lo, x_hi) = d.spanning_contour();
        let inner = random_rect(&mut rng, (x_lo, x_hi), (-20.0, 20.0));
        let grow = |rng: &mut ChaCha8Rng| rng.random_range(0.0..2.0);
        let outer = Rectangle::new(
            inner.x_lo - grow(&mut rng),
            inner.x_hi + grow(&mut rng),
            inner.y_lo - grow(&mut rng),
            inner.y_hi + grow(&mut rng),
        )
        .unwrap();
        assert!(count_zeros(&f, &outer).unwrap().count >= count_zeros(&f, &inner).unwrap().count);
    }
}

#[test]
fn zero_free_rectangles_count_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for _ in 0..200 {
        let n = rng.random_range(1..=5);
        let f = random_sum(&mut rng, n, 0.0);
        let d = decompose(&f).unwrap();
        for r in &d.regions {
            let lo = if r.x_lo.is_finite() { r.x_lo } else { r.x_hi - 5.0 };
            let hi = if r.x_hi.is_finite() { r.x_hi } else { r.x_lo + 5.0 };
            if hi - lo < 1e-6 {
                continue;
            }
            let pad = 1e-3 * (hi - lo);
            let rect = Rectangle::new(lo + pad, hi - pad, -30.0, 30.0).unwrap();
            assert_eq!(count_zeros(&f, &rect).unwrap().count, 0);
        }
    }
}

#[test]
fn backlund_inequality_on_random_segments() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    let mut evaluated = 0;
    while evaluated < 1000 {
        let n = rng.random_range(1..=5);
        let f = random_sum(&mut rng, n, 0.0);
        let z1 = c(rng.random_range(-3.0..3.0), rng.random_range(-50.0..50.0));
        let dir = Complex64::from_polar(1.0, rng.random_range(-PI..PI));
        let len = rng.random_range(0.1..8.0);
        let radius = len * rng.random_range(1.2..4.0);
        match backlund_bound(&f, z1, z1 + dir * len, radius) {
            Ok(b) => {
                assert!(b.holds(), "{f}: {b:?}");
                evaluated += 1;
            }
            Err(Error::ZeroAtAnchor { .. } | Error::ZeroOnPath { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn backlund_rejects_small_radius() {
    let f = ex2();
    let err = backlund_bound(&f, c(2.0, 0.0), c(2.0, 3.0), 3.0).unwrap_err();
    assert!(matches!(err, Error::InvalidRadius { .. }));
}

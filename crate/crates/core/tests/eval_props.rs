mod common;

use common::*;
use expsum::eval::dominant_index;
use expsum::{eval, eval_logderiv, eval_scaled, Complex64, ExpSum, ExpTerm};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sum_strategy(max_terms: usize, h_lo: f64, h_hi: f64) -> impl Strategy<Value = ExpSum> {
    prop::collection::vec((h_lo..h_hi, -3.2f64..3.2, 1e-3f64..5.0), 1..=max_terms)
        .prop_filter_map("distinct frequencies", |raw| {
            ExpSum::normalized_from(raw.into_iter().map(|(m, a, w)| (Complex64::from_polar(m, a), w))).ok()
        })
}

/// Plain term-by-term sum; fine while every exponent stays below ~700.
fn naive(f: &ExpSum, z: Complex64) -> (Complex64, f64) {
    let terms: Vec<Complex64> = f.terms().iter().map(|t| t.coeff * (t.freq * z).exp()).collect();
    let big = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    (terms.iter().sum(), big)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn scaled_matches_unscaled(f in sum_strategy(6, 0.1, 10.0), x in -50.0f64..50.0, y in -100.0f64..100.0) {
        let z = c(x, y);
        let direct = eval(&f, z);
        let scaled = eval_scaled(&f, z).to_complex();
        prop_assert!((scaled - direct).norm() <= 1e-10 * direct.norm());
        let (plain, big) = naive(&f, z);
        if plain.norm() > 1e-4 * big {
            prop_assert!((direct - plain).norm() <= 1e-10 * plain.norm());
        }
    }

    #[test]
    fn dominant_index_maximizes_exponent(f in sum_strategy(6, 0.1, 10.0), x in -50.0f64..50.0) {
        let k = dominant_index(&f, x);
        let e = |j: usize| f.freq(j) * x + f.term(j).coeff.norm().ln();
        let best = (0..f.len()).map(e).fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(e(k), best);
        prop_assert!((0..k).all(|j| e(j) < best));
        prop_assert_eq!(eval_scaled(&f, c(x, 0.0)).dominant_index, k);
    }

    #[test]
    fn normalize_preserves_values(
        raw in prop::collection::vec((0.1f64..10.0, -3.2f64..3.2, -5.0f64..5.0), 2..=6),
        x in -20.0f64..20.0,
        y in -20.0f64..20.0,
    ) {
        let terms: Vec<ExpTerm> = raw.iter().map(|&(m, a, w)| ExpTerm::new(Complex64::from_polar(m, a), w)).collect();
        let Ok(g) = ExpSum::new(terms) else { return Ok(()) };
        let norm = g.normalize().unwrap();
        prop_assert!(norm.sum.is_normalized());
        let z = c(x, y);
        let rebuilt = norm.prefactor * (norm.shift * z).exp() * eval(&norm.sum, z);
        let (plain, big) = naive(&g, z);
        prop_assert!((rebuilt - plain).norm() <= 1e-12 * big.max(plain.norm()) * 10.0);
    }
}

#[test]
fn logderiv_matches_finite_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 1000 {
        let n = rng.random_range(1..=6);
        let f = random_sum(&mut rng, n, 0.0);
        let z = c(rng.random_range(-5.0..5.0), rng.random_range(-50.0..50.0));
        let (v, big) = naive(&f, z);
        if v.norm() < 1e-2 * big {
            continue;
        }
        let h = 1e-6;
        let fd = (eval(&f, z + h) - eval(&f, z - h)) / (2.0 * h) / eval(&f, z);
        let ld = eval_logderiv(&f, z).unwrap();
        assert!((ld - fd).norm() <= 1e-5 * ld.norm().max(1.0), "{f} at {z}: {ld} vs {fd}");
        checked += 1;
    }
}

#[test]
fn logderiv_far_right_tends_to_top_frequency() {
    let v = eval_logderiv(&ex2(), c(10.0, 0.0)).unwrap();
    // f'/f = (−5e^z + 2e^{2z}) / (6 − 5e^z + e^{2z}) evaluated directly
    let e = 10f64.exp();
    let expected = (-5.0 * e + 2.0 * e * e) / (6.0 - 5.0 * e + e * e);
    assert!((v.re - expected).abs() < 1e-6 && v.im.abs() < 1e-12);
}

#[test]
fn evaluation_survives_huge_exponents() {
    let f = ex1();
    let v = eval_scaled(&f, c(2000.0, 0.3));
    // |1 + e^z + e^{2z}| ≈ e^{4000}
    assert!((v.logmod - 4000.0).abs() < 1e-9);
    assert!((v.phase - 0.6).abs() < 1e-9);
    assert_eq!(v.dominant_index, 2);
}

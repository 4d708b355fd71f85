mod common;

use common::*;
use expsum::density::all_zeros;
use expsum::strips::{dominance_margin, theorem_a_check, DecompositionReport};
use expsum::{decompose, ExpSum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// `m_k(x)` straight from the definition, in plain floating point.
fn margin_oracle(f: &ExpSum, k: usize, x: f64) -> f64 {
    let own = f.term(k).coeff.norm() * (f.freq(k) * x).exp();
    let rest: f64 = (0..f.len()).filter(|&j| j != k).map(|j| f.term(j).coeff.norm() * (f.freq(j) * x).exp()).sum();
    own.ln() - rest.ln()
}

#[test]
fn regions_and_strips_are_complementary() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..300 {
        let n = rng.random_range(1..=6);
        let f = random_sum(&mut rng, n, 0.0);
        let d = decompose(&f).unwrap();
        for r in &d.regions {
            let lo = if r.x_lo.is_finite() { r.x_lo } else { r.x_hi.min(0.0) - 20.0 };
            let hi = if r.x_hi.is_finite() { r.x_hi } else { r.x_lo.max(0.0) + 20.0 };
            for i in 1..20 {
                let x = lo + (hi - lo) * i as f64 / 20.0;
                assert!(margin_oracle(&f, r.dominant, x) > 0.0, "{f}: region {r:?} at {x}");
            }
        }
        for s in &d.strips {
            for i in 1..20 {
                let x = s.x_lo + s.width() * i as f64 / 20.0;
                for k in 0..f.len() {
                    assert!(margin_oracle(&f, k, x) < 1e-10, "{f}: strip {s:?} at {x}, k = {k}");
                }
            }
        }
    }
}

#[test]
fn boundary_residuals_are_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..300 {
        let n = rng.random_range(1..=6);
        let f = random_sum(&mut rng, n, 0.0);
        let d = decompose(&f).unwrap();
        for r in &d.regions {
            for x in [r.x_lo, r.x_hi].into_iter().filter(|x| x.is_finite()) {
                assert!(dominance_margin(&f, r.dominant, x).abs() <= 1e-10, "{f}: {r:?}");
            }
        }
    }
}

#[test]
fn region_and_line_counts_are_bounded() {
    (0..10_000u64).into_par_iter().for_each(|case| {
        let mut rng = ChaCha8Rng::seed_from_u64(23_000_000 + case);
        let n = rng.random_range(1..=8);
        let f = random_sum(&mut rng, n, 0.0);
        let d = decompose(&f).unwrap();
        assert!(d.regions.len() >= 2 && d.regions.len() <= n + 1);
        assert_eq!(d.strips.len(), d.regions.len() - 1);
        assert!(d.boundary_line_count() <= 2 * n);
        assert!(d.to_report().validate().is_ok());
    });
}

#[test]
fn report_round_trips_through_json() {
    let d = decompose(&ex2()).unwrap();
    let text = serde_json::to_string(&d.to_report()).unwrap();
    let back: DecompositionReport = serde_json::from_str(&text).unwrap();
    back.validate().unwrap();
    assert_eq!(back, d.to_report());
}

#[test]
fn zeros_lie_in_strips() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..40 {
        let n = rng.random_range(1..=4);
        let f = random_sum(&mut rng, n, 0.0);
        let d = decompose(&f).unwrap();
        for z in all_zeros(&f, -30.0, 30.0).unwrap() {
            let s = &d.strips[z.strip_index];
            assert!(s.contains(z.z.re, 1e-9), "{f}: zero {} outside strip {s:?}", z.z);
        }
    }
}

#[test]
fn zero_real_parts_satisfy_membership_test() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let mut sums = vec![irrational()];
    // random real frequencies are independent over ℚ with probability one
    for _ in 0..10 {
        let n = rng.random_range(2..=4);
        sums.push(random_sum(&mut rng, n, 0.0));
    }
    for f in sums {
        let d = decompose(&f).unwrap();
        for z in all_zeros(&f, 0.0, 60.0).unwrap() {
            let s = &d.strips[z.strip_index];
            if s.width() < 1e-6 {
                continue;
            }
            let check = theorem_a_check(&f, s.x_lo + 1e-9, s.x_hi - 1e-9).unwrap();
            assert!(check.holds, "{f}: zero {} in strip {s:?} fails: {:?}", z.z, check.witness);
        }
    }
}

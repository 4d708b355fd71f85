//! Shared fixtures and independent oracles for the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use expsum::{Complex64, ExpSum};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 1 + e^z + e^{2z}
pub fn ex1() -> ExpSum {
    ExpSum::normalized_real(&[(1.0, 1.0), (1.0, 2.0)]).unwrap()
}

/// (6 − 5e^z + e^{2z}) / 6
pub fn ex2() -> ExpSum {
    ExpSum::normalized_real(&[(-5.0 / 6.0, 1.0), (1.0 / 6.0, 2.0)]).unwrap()
}

/// 1 + e^z + e^{√2 z}
pub fn irrational() -> ExpSum {
    ExpSum::normalized_real(&[(1.0, 1.0), (1.0, 2f64.sqrt())]).unwrap()
}

fn random_coeff(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(rng.random_range(0.2..5.0), rng.random_range(-PI..PI))
}

/// Normalized sum with `n` terms, frequencies in (0, 5] at least `min_gap`
/// apart, coefficient moduli in [0.2, 5].
pub fn random_sum(rng: &mut ChaCha8Rng, n: usize, min_gap: f64) -> ExpSum {
    loop {
        let mut w: Vec<f64> = (0..n).map(|_| 5.0 * (1.0 - rng.random::<f64>())).collect();
        w.sort_by(f64::total_cmp);
        let ok = w[0] >= min_gap && w.windows(2).all(|p| p[1] - p[0] >= min_gap);
        if !ok {
            continue;
        }
        let pairs: Vec<(Complex64, f64)> = w.iter().map(|&wi| (random_coeff(rng), wi)).collect();
        return ExpSum::normalized_from(pairs).unwrap();
    }
}

/// Normalized sum with frequencies `p_j δ`, `p_n ≤ 12`.
pub fn random_commensurable(rng: &mut ChaCha8Rng) -> ExpSum {
    random_commensurable_poly(rng).0
}

/// As [`random_commensurable`], also returning `δ` and the polynomial
/// `1 + Σ H_j u^{p_j}` (coefficients in increasing degree).
pub fn random_commensurable_poly(rng: &mut ChaCha8Rng) -> (ExpSum, f64, Vec<Complex64>) {
    let top: usize = rng.random_range(1..=12);
    let mut ps: Vec<usize> = (1..top).filter(|_| rng.random_bool(0.3)).collect();
    ps.push(top);
    let delta = rng.random_range(0.5..1.5);
    let mut poly = vec![c(0.0, 0.0); top + 1];
    poly[0] = c(1.0, 0.0);
    let pairs: Vec<(Complex64, f64)> = ps
        .iter()
        .map(|&p| {
            let h = random_coeff(rng);
            poly[p] = h;
            (h, p as f64 * delta)
        })
        .collect();
    (ExpSum::normalized_from(pairs).unwrap(), delta, poly)
}

/// Coefficients of `Π (u − r)` in increasing degree.
pub fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut p = vec![c(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![c(0.0, 0.0); p.len() + 1];
        for (i, &a) in p.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        p = next;
    }
    p
}

/// `p(e^{δz}) / p(0)` as a normalized sum.
pub fn sum_from_poly(p: &[Complex64], delta: f64) -> ExpSum {
    let c0 = p[0];
    let pairs: Vec<(Complex64, f64)> = p
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, a)| a.norm() > 1e-14 * c0.norm())
        .map(|(i, a)| (a / c0, i as f64 * delta))
        .collect();
    ExpSum::normalized_from(pairs).unwrap()
}

/// A sum with one double zero: `(u − a)² Π (u − b_i)` with `u = e^{δz}`.
/// Returns the sum, `δ` and `u`-roots with multiplicities.
pub fn double_root_sum(rng: &mut ChaCha8Rng) -> (ExpSum, f64, Vec<(Complex64, usize)>) {
    let pick = |rng: &mut ChaCha8Rng| Complex64::from_polar(rng.random_range(0.3..3.0), rng.random_range(-PI..PI));
    let a = pick(rng);
    let extra = rng.random_range(0..=3);
    let mut roots = vec![a, a];
    let mut out = vec![(a, 2)];
    for _ in 0..extra {
        let b = pick(rng);
        roots.push(b);
        out.push((b, 1));
    }
    let delta = rng.random_range(0.5..1.5);
    (sum_from_poly(&poly_from_roots(&roots), delta), delta, out)
}

/// Durand–Kerner iteration for all roots of `Σ a_i u^i`.
pub fn durand_kerner(a: &[Complex64]) -> Vec<Complex64> {
    let d = a.len() - 1;
    let lead = a[d];
    let monic: Vec<Complex64> = a.iter().map(|x| x / lead).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(c(0.0, 0.0), |acc, &x| acc * z + x);
    let mut z: Vec<Complex64> = (0..d).map(|k| c(0.4, 0.9).powu(k as u32)).collect();
    for _ in 0..5000 {
        let mut moved: f64 = 0.0;
        for k in 0..d {
            let mut den = c(1.0, 0.0);
            for j in 0..d {
                if j != k {
                    den *= z[k] - z[j];
                }
            }
            let step = eval(z[k]) / den;
            z[k] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Zeros of `f(z) = Σ a_i e^{iδz}` from the roots `u` of the polynomial:
/// `z = (ln|u| + i(arg u + 2πm)) / δ` with `Im z ∈ [y_lo, y_hi)`.
pub fn lattice_from_roots(roots: &[(Complex64, usize)], delta: f64, y_lo: f64, y_hi: f64) -> Vec<(Complex64, usize)> {
    let mut out = Vec::new();
    for &(u, m) in roots {
        let x = u.norm().ln() / delta;
        let th = u.arg();
        let k0 = ((y_lo * delta - th) / (2.0 * PI)).floor() as i64 - 1;
        let k1 = ((y_hi * delta - th) / (2.0 * PI)).ceil() as i64 + 1;
        for k in k0..=k1 {
            let y = (th + 2.0 * PI * k as f64) / delta;
            if y >= y_lo && y < y_hi {
                out.push((c(x, y), m));
            }
        }
    }
    out.sort_by(|a, b| a.0.im.total_cmp(&b.0.im).then(a.0.re.total_cmp(&b.0.re)));
    out
}

/// Geometric grid with `count` points on `[lo, hi]`.
pub fn geometric(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64)).collect()
}

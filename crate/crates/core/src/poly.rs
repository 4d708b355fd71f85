//! Polynomial roots by Aberth–Ehrlich simultaneous iteration, and the rational
//! reconstruction used to detect commensurable frequencies.

use std::f64::consts::PI;

use num_complex::Complex64;

pub const ABERTH_MAX_ITER: usize = 500;
/// Roots closer than this (relative to `max(1, |u|)`) are merged into one
/// multiple root. Double roots in double precision are only resolved to about
/// √ε, so anything much tighter would split them.
pub const CLUSTER_RADIUS: f64 = 1e-5;

/// `p(z) / p′(z)`, evaluated through the reversed polynomial when `|z| > 1`.
fn newton_ratio(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let d = coeffs.len() - 1;
    if z.norm() <= 1.0 {
        let mut p = coeffs[d];
        let mut dp = Complex64::new(0.0, 0.0);
        for c in coeffs[..d].iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        p / dp
    } else {
        // p(z) = z^d q(1/z) with q the reversed polynomial
        let w = z.inv();
        let mut q = coeffs[0];
        let mut dq = Complex64::new(0.0, 0.0);
        for c in coeffs[1..].iter() {
            dq = dq * w + q;
            q = q * w + c;
        }
        z / (Complex64::new(d as f64, 0.0) - w * dq / q)
    }
}

/// All roots of `Σ coeffs[i] u^i`. The leading coefficient must be nonzero.
pub fn aberth_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let d = coeffs.len().saturating_sub(1);
    if d == 0 {
        return Vec::new();
    }
    let lead = coeffs[d];
    let cauchy = 1.0 + coeffs[..d].iter().map(|c| (c / lead).norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(cauchy, 2.0 * PI * k as f64 / d as f64 + 0.4))
        .collect();
    for _ in 0..ABERTH_MAX_ITER {
        let mut worst: f64 = 0.0;
        for k in 0..d {
            let ratio = newton_ratio(coeffs, z[k]);
            if !ratio.is_finite() {
                continue;
            }
            let mut repulsion = Complex64::new(0.0, 0.0);
            for j in 0..d {
                if j != k {
                    repulsion += (z[k] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                worst = worst.max(step.norm() / z[k].norm().max(1e-300));
            }
        }
        if worst < 1e-15 {
            break;
        }
    }
    z
}

/// Roots with multiplicities: Aberth, then clustering within
/// [`CLUSTER_RADIUS`]. A cluster of size `m` is represented by its centroid,
/// refined by Newton on the `(m−1)`-th derivative.
pub fn roots_with_multiplicity(coeffs: &[Complex64]) -> Vec<(Complex64, usize)> {
    let roots = aberth_roots(coeffs);
    let mut used = vec![false; roots.len()];
    let mut out = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut members = vec![roots[i]];
        let mut grew = true;
        while grew {
            grew = false;
            for j in 0..roots.len() {
                if used[j] {
                    continue;
                }
                if members
                    .iter()
                    .any(|m| (m - roots[j]).norm() <= CLUSTER_RADIUS * m.norm().max(1.0))
                {
                    used[j] = true;
                    members.push(roots[j]);
                    grew = true;
                }
            }
        }
        let m = members.len();
        let centroid = members.iter().sum::<Complex64>() / m as f64;
        out.push((polish(coeffs, centroid, m), m));
    }
    out
}

/// Coefficients of the `order`-th derivative.
fn derivative(coeffs: &[Complex64], order: usize) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    for _ in 0..order {
        c = c.iter().enumerate().skip(1).map(|(i, a)| a * i as f64).collect();
    }
    c
}

/// Newton on `p^{(m−1)}`, where a root of multiplicity `m` is simple.
fn polish(coeffs: &[Complex64], z0: Complex64, m: usize) -> Complex64 {
    let d = derivative(coeffs, m - 1);
    if d.len() < 2 {
        return z0;
    }
    let mut z = z0;
    for _ in 0..8 {
        let step = newton_ratio(&d, z);
        if !step.is_finite() {
            // landed exactly on the root
            break;
        }
        if step.norm() > 1e-3 * z0.norm().max(1.0) {
            return z0;
        }
        z -= step;
        if step.norm() <= 4e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Best rational approximation `p/q` of `x > 0` with `q ≤ max_den` and
/// `|x − p/q| ≤ tol·max(1, x)`, via continued-fraction convergents.
pub fn rational_approx(x: f64, max_den: u64, tol: f64) -> Option<(u64, u64)> {
    if !(x > 0.0) || !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e15 {
            break;
        }
        let a = a as u64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den {
            return None;
        }
        if (x - p2 as f64 / q2 as f64).abs() <= tol * x.max(1.0) {
            return Some((p2, q2));
        }
        let frac = r - a as f64;
        if frac <= 0.0 {
            return None;
        }
        r = 1.0 / frac;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

//! Small one-dimensional search helpers.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Locates the sign change of `pred` between `a` and `b` by bisection.
///
/// `pred(a) != pred(b)` is assumed. Stops when the bracket is narrower than
/// `tol` or cannot be split further in floating point.
pub(crate) fn bisect<P: Fn(f64) -> bool>(pred: P, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let pa = pred(a);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        if pred(mid) == pa {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Golden-section search for the maximum of a unimodal function on `[a, b]`.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(g: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    if gc >= gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| x * x > 2.0, 0.0, 2.0, 1e-14);
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 1.0, -2.0, 5.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
        assert!((v - 1.0).abs() < 1e-15);
    }
}

//! Zero localization.
//!
//! [`find_zeros`] subdivides a strip window on winding counts until every box
//! holds a single simple zero (then polished by Newton) or cannot be split any
//! further (then reported as one multiple zero). [`oracle_zeros_commensurable`]
//! computes the same set exactly when all frequencies are integer multiples of
//! a common step, through the substitution `u = e^{δz}`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{eval_scaled, newton, relative_logmod};
use crate::poly::{gcd, rational_approx, roots_with_multiplicity};
use crate::strips::{decompose, StripDecomposition};
use crate::sum::ExpSum;
use crate::winding::{count_exact, count_zeros, Rectangle};

/// Boxes narrower than this are not split again.
pub const MIN_BOX_DIAMETER: f64 = 1e-8;
pub const NEWTON_MAX_ITER: usize = 50;
/// Largest accepted `|f(z)|` relative to the dominant term at `z`.
pub const MAX_RELATIVE_RESIDUAL: f64 = 1e-9;
/// Fractions tried, in order, when splitting a box. Several are needed
/// because the first choice may run through a zero.
const SPLIT_FRACTIONS: [f64; 7] = [0.5, 0.381_966, 0.618_034, 0.3, 0.7, 0.45, 0.55];
/// Rational reconstruction of `w_j / w_1`.
pub const COMMENSURABLE_TOL: f64 = 1e-12;
pub const COMMENSURABLE_MAX_DEN: u64 = 64;
/// Degree cap for the oracle polynomial.
pub const ORACLE_MAX_DEGREE: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroMethod {
    Newton,
    BoxLimit,
    Oracle,
}

impl ZeroMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ZeroMethod::Newton => "newton",
            ZeroMethod::BoxLimit => "box-limit",
            ZeroMethod::Oracle => "oracle",
        }
    }
}

/// A localized zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub z: Complex64,
    pub multiplicity: usize,
    pub strip_index: usize,
    /// `ln|f(z)|`.
    pub residual_logmod: f64,
    pub method: ZeroMethod,
}

impl ZeroRecord {
    /// `|f(z)|` divided by the modulus of the dominant term at `z`.
    pub fn relative_residual(&self, f: &ExpSum) -> f64 {
        relative_logmod(f, self.z).exp()
    }
}

fn record(f: &ExpSum, z: Complex64, multiplicity: usize, strip_index: usize, method: ZeroMethod) -> ZeroRecord {
    ZeroRecord { z, multiplicity, strip_index, residual_logmod: eval_scaled(f, z).logmod, method }
}

/// Sorts by imaginary part, then real part.
pub fn sort_records(records: &mut [ZeroRecord]) {
    records.sort_by(|a, b| a.z.im.total_cmp(&b.z.im).then(a.z.re.total_cmp(&b.z.re)));
}

/// All zeros of `f` in critical strip `strip_index` with `Im z ∈ [y_lo, y_hi)`
/// (a zero exactly on `y_lo` is included, one on `y_hi` is not).
pub fn find_zeros(
    f: &ExpSum,
    decomposition: &StripDecomposition,
    strip_index: usize,
    y_lo: f64,
    y_hi: f64,
) -> Result<Vec<ZeroRecord>> {
    if !(y_lo < y_hi) {
        return Err(Error::InvalidInput(format!("empty window [{y_lo}, {y_hi}]")));
    }
    if strip_index >= decomposition.strips.len() {
        return Err(Error::InvalidInput(format!(
            "strip index {strip_index} out of range ({} strips)",
            decomposition.strips.len()
        )));
    }
    let (x_lo, x_hi) = decomposition.strip_contour(strip_index);
    find_zeros_in_rect(f, &Rectangle::new(x_lo, x_hi, y_lo, y_hi)?, strip_index)
}

/// All zeros of `f` in `rect`, each tagged with `strip_index`.
pub fn find_zeros_in_rect(f: &ExpSum, rect: &Rectangle, strip_index: usize) -> Result<Vec<ZeroRecord>> {
    let root = count_zeros(f, rect)?;
    let mut out = locate(f, &root.effective, root.count, strip_index)?;
    sort_records(&mut out);
    Ok(out)
}

fn locate(f: &ExpSum, rect: &Rectangle, count: usize, strip: usize) -> Result<Vec<ZeroRecord>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if count == 1 {
        if let Some(z) = newton_in_box(f, rect) {
            return Ok(vec![record(f, z, 1, strip, ZeroMethod::Newton)]);
        }
    }
    if rect.diameter() < MIN_BOX_DIAMETER {
        return Ok(vec![box_limit(f, rect, count, strip)]);
    }
    match split(f, rect, count)? {
        Some(((a, ca), (b, cb))) => {
            let (ra, rb) = rayon::join(|| locate(f, &a, ca, strip), || locate(f, &b, cb, strip));
            let mut out = ra?;
            out.extend(rb?);
            Ok(out)
        }
        None => Ok(vec![box_limit(f, rect, count, strip)]),
    }
}

fn inside_closed(rect: &Rectangle, z: Complex64, pad: f64) -> bool {
    z.re >= rect.x_lo - pad && z.re <= rect.x_hi + pad && z.im >= rect.y_lo - pad && z.im <= rect.y_hi + pad
}

fn newton_in_box(f: &ExpSum, rect: &Rectangle) -> Option<Complex64> {
    let out = newton(f, rect.center(), NEWTON_MAX_ITER);
    let ok = out.converged
        && inside_closed(rect, out.z, 0.0)
        && relative_logmod(f, out.z) <= MAX_RELATIVE_RESIDUAL.ln();
    ok.then_some(out.z)
}

/// One record for an unsplittable box holding `count` zeros. A zero of
/// multiplicity `m` is a simple zero of `f^{(m−1)}`, which is where the
/// position is polished.
fn box_limit(f: &ExpSum, rect: &Rectangle, count: usize, strip: usize) -> ZeroRecord {
    let center = rect.center();
    let pad = rect.diameter().max(MIN_BOX_DIAMETER);
    let polished = f
        .derivative(count as u32 - 1)
        .ok()
        .map(|g| newton(&g, center, NEWTON_MAX_ITER))
        .filter(|o| o.converged && inside_closed(rect, o.z, pad))
        .map(|o| o.z);
    let z = polished.unwrap_or(center);
    record(f, z, count, strip, ZeroMethod::BoxLimit)
}

type Child = (Rectangle, usize);

/// Splits the longer side of `rect` at the first fraction whose two halves
/// have certified counts adding up to `count`.
fn split(f: &ExpSum, rect: &Rectangle, count: usize) -> Result<Option<(Child, Child)>> {
    let vertical_cut = rect.width() >= rect.height();
    for frac in SPLIT_FRACTIONS {
        let (a, b) = if vertical_cut {
            let xm = rect.x_lo + frac * rect.width();
            (
                Rectangle { x_hi: xm, ..*rect },
                Rectangle { x_lo: xm, ..*rect },
            )
        } else {
            let ym = rect.y_lo + frac * rect.height();
            (
                Rectangle { y_hi: ym, ..*rect },
                Rectangle { y_lo: ym, ..*rect },
            )
        };
        let (ra, rb) = rayon::join(|| count_exact(f, &a), || count_exact(f, &b));
        match (ra, rb) {
            (Ok(ca), Ok(cb)) if ca.count + cb.count == count => return Ok(Some(((a, ca.count), (b, cb.count)))),
            (Ok(_), Ok(_)) => continue,
            (Err(Error::ZeroOnPath { .. } | Error::NoConvergence { .. }), _)
            | (_, Err(Error::ZeroOnPath { .. } | Error::NoConvergence { .. })) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Ok(None)
}

/// Common step `δ` and integer exponents `p_j` with `w_j = p_j δ`,
/// `gcd(p_j) = 1`. Fails with [`Error::NotCommensurable`] when some ratio
/// `w_j / w_1` has no rational approximation with denominator ≤ 64.
pub fn commensurable_base(f: &ExpSum) -> Result<(f64, Vec<u64>)> {
    if !f.is_normalized() {
        return Err(Error::InvalidInput("oracle requires a normalized sum".into()));
    }
    let w1 = f.freq(1);
    let mut fracs = vec![(0u64, 1u64)];
    for j in 1..f.len() {
        let ratio = f.freq(j) / w1;
        let pq = rational_approx(ratio, COMMENSURABLE_MAX_DEN, COMMENSURABLE_TOL)
            .ok_or_else(|| Error::NotCommensurable(format!("w_{j}/w_1 = {ratio} has no small rational form")))?;
        fracs.push(pq);
    }
    let lcm = fracs.iter().try_fold(1u64, |acc, &(_, q)| acc.checked_mul(q / gcd(acc, q)));
    let lcm = lcm.ok_or_else(|| Error::NotCommensurable("denominator overflow".into()))?;
    let mut exps: Vec<u64> = fracs.iter().map(|&(p, q)| p * (lcm / q)).collect();
    let g = exps.iter().fold(0, |acc, &e| gcd(acc, e));
    exps.iter_mut().for_each(|e| *e /= g);
    let degree = *exps.last().unwrap();
    if degree > ORACLE_MAX_DEGREE {
        return Err(Error::NotCommensurable(format!("polynomial degree {degree} exceeds {ORACLE_MAX_DEGREE}")));
    }
    // least-squares step over all frequencies
    let num: f64 = (1..f.len()).map(|j| f.freq(j) * exps[j] as f64).sum();
    let den: f64 = exps.iter().map(|&e| (e * e) as f64).sum();
    Ok((num / den, exps))
}

/// Exact zero set for commensurable frequencies, `Im z ∈ [y_lo, y_hi]`.
pub fn oracle_zeros_commensurable(f: &ExpSum, y_lo: f64, y_hi: f64) -> Result<Vec<ZeroRecord>> {
    if !(y_lo <= y_hi) {
        return Err(Error::InvalidInput(format!("empty window [{y_lo}, {y_hi}]")));
    }
    let (delta, exps) = commensurable_base(f)?;
    let degree = *exps.last().unwrap() as usize;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); degree + 1];
    for (t, &e) in f.terms().iter().zip(&exps) {
        coeffs[e as usize] += t.coeff;
    }
    let decomposition = decompose(f)?;
    let mut out = Vec::new();
    for (u, m) in roots_with_multiplicity(&coeffs) {
        if u.norm() == 0.0 {
            continue;
        }
        let x = u.norm().ln() / delta;
        let theta = u.arg();
        let k_lo = ((y_lo * delta - theta) / (2.0 * PI)).ceil() as i64;
        let k_hi = ((y_hi * delta - theta) / (2.0 * PI)).floor() as i64;
        let strip = nearest_strip(&decomposition, x);
        for k in k_lo..=k_hi {
            let y = (theta + 2.0 * PI * k as f64) / delta;
            if y < y_lo || y > y_hi {
                continue;
            }
            out.push(record(f, Complex64::new(x, y), m, strip, ZeroMethod::Oracle));
        }
    }
    sort_records(&mut out);
    Ok(out)
}

fn nearest_strip(d: &StripDecomposition, x: f64) -> usize {
    if let Some(i) = d.strip_containing(x, 1e-9) {
        return i;
    }
    d.strips
        .iter()
        .enumerate()
        .map(|(i, s)| (i, (s.x_lo - x).max(x - s.x_hi)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Writes the zero list as CSV: `re, im, multiplicity, strip_index,
/// residual_logmod, method`.
pub fn write_zeros_csv<W: Write>(records: &[ZeroRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
    w.write_record(["re", "im", "multiplicity", "strip_index", "residual_logmod", "method"]).map_err(io)?;
    for r in records {
        w.write_record([
            format!("{:.17e}", r.z.re),
            format!("{:.17e}", r.z.im),
            r.multiplicity.to_string(),
            r.strip_index.to_string(),
            format!("{:.17e}", r.residual_logmod),
            r.method.as_str().to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    Ok(())
}

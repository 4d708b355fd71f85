//! Argument-principle zero counting on axis-aligned rectangles.
//!
//! The phase of f is tracked along each edge by adaptive bisection. A
//! sub-segment with midpoint `zm` and half-length `h` is accepted only when
//!
//! ```text
//! |f′(zm)|·h + ½·max|f″|·h² < |f(zm)|
//! ```
//!
//! which confines the image of the sub-segment to a disc around `f(zm)` that
//! misses the origin. Each accepted half then turns by less than π/2, so the
//! sum of wrapped increments is the exact continuous change of argument.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{frame, newton, wrap_phase, Frame};
use crate::search::golden_max;
use crate::sum::ExpSum;

/// Samples whose relative modulus `|f| / |dominant term|` falls below this are
/// treated as sitting on a zero.
pub const ZERO_ON_PATH_REL: f64 = 1e-12;
/// Largest admissible distance of `total phase / 2π` from an integer.
pub const INTEGRALITY_TOL: f64 = 1e-6;
pub const MAX_SEGMENT_SAMPLES: usize = 1 << 26;
pub const MAX_PERTURBATIONS: usize = 32;
/// Zeros closer than this to an edge are attributed by the bottom/left rule.
pub const EDGE_ATTRIBUTION_TOL: f64 = 1e-9;
/// Base edge displacement; scaled by `(1 + |coordinate|)`.
pub const PERTURBATION_SCALE: f64 = 1e-7;
pub const CIRCLE_SAMPLES: usize = 4096;

/// Closed rectangle `[x_lo, x_hi] × [y_lo, y_hi]`, traversed positively:
/// bottom left→right, right side up, top right→left, left side down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Rectangle {
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Result<Self> {
        if !(x_lo < x_hi && y_lo < y_hi) || ![x_lo, x_hi, y_lo, y_hi].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "degenerate rectangle [{x_lo}, {x_hi}] × [{y_lo}, {y_hi}]"
            )));
        }
        Ok(Rectangle { x_lo, x_hi, y_lo, y_hi })
    }

    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn height(&self) -> f64 {
        self.y_hi - self.y_lo
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x_lo + self.x_hi), 0.5 * (self.y_lo + self.y_hi))
    }

    /// The four edges in traversal order.
    pub fn edges(&self) -> [(Complex64, Complex64); 4] {
        let bl = Complex64::new(self.x_lo, self.y_lo);
        let br = Complex64::new(self.x_hi, self.y_lo);
        let tr = Complex64::new(self.x_hi, self.y_hi);
        let tl = Complex64::new(self.x_lo, self.y_hi);
        [(bl, br), (br, tr), (tr, tl), (tl, bl)]
    }

    /// Membership under the counting convention: bottom and left edges are
    /// in, top and right edges are out (each within `tol`).
    pub fn contains_attributed(&self, z: Complex64, tol: f64) -> bool {
        z.re >= self.x_lo - tol && z.re < self.x_hi - tol && z.im >= self.y_lo - tol && z.im < self.y_hi - tol
    }

    fn fingerprint(&self) -> u64 {
        // FNV-1a over the bit patterns
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for v in [self.x_lo, self.x_hi, self.y_lo, self.y_hi] {
            for b in v.to_bits().to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}

/// Outcome of a rectangle count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub count: usize,
    /// Smallest `ln(|f| / |dominant term|)` seen on the contour.
    pub min_boundary_logmod: f64,
    pub perturbations_applied: usize,
    pub segments_evaluated: usize,
    /// The contour actually integrated (differs from the request only after
    /// boundary perturbation).
    pub effective: Rectangle,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SegmentTrace {
    pub phase: f64,
    pub min_rel_logmod: f64,
    pub evaluations: usize,
}

fn checked_frame(f: &ExpSum, z: Complex64) -> Result<Frame> {
    let fr = frame(f, z);
    if !(fr.s.norm() >= ZERO_ON_PATH_REL) {
        return Err(Error::ZeroOnPath { z });
    }
    Ok(fr)
}

/// `max |f″| / D` over `Re z ∈ [xa, xb]`, relative to the scale `e^{base_log}`.
fn second_derivative_bound(f: &ExpSum, xa: f64, xb: f64, base_log: f64) -> f64 {
    let mut acc = 0.0;
    for (j, t) in f.terms().iter().enumerate() {
        let w = t.freq;
        if w == 0.0 {
            continue;
        }
        let e = (w * xa).max(w * xb) + f.log_abs(j) - base_log;
        acc += w * w * e.min(700.0).exp();
    }
    acc
}

pub(crate) fn trace_segment(f: &ExpSum, a: Complex64, b: Complex64, safety: f64) -> Result<SegmentTrace> {
    if a == b {
        return Ok(SegmentTrace { phase: 0.0, min_rel_logmod: f64::INFINITY, evaluations: 0 });
    }
    let d = b - a;
    let len = d.norm();
    let fa = checked_frame(f, a)?;
    let fb = checked_frame(f, b)?;
    let mut evaluations = 2;
    let mut min_rel = fa.rel_logmod().min(fb.rel_logmod());
    let mut total = 0.0;
    let mut stack = vec![(0.0f64, 1.0f64, fa, fb)];
    while let Some((t0, t1, f0, f1)) = stack.pop() {
        let tm = 0.5 * (t0 + t1);
        let zm = a + d * tm;
        let fm = checked_frame(f, zm)?;
        evaluations += 1;
        min_rel = min_rel.min(fm.rel_logmod());
        let half = 0.5 * (t1 - t0) * len;
        let (za, zb) = (a + d * t0, a + d * t1);
        let curvature = second_derivative_bound(f, za.re, zb.re, fm.base_log);
        let drift = fm.ds.norm() * half + 0.5 * curvature * half * half;
        if safety * drift < fm.s.norm() {
            total += wrap_phase(fm.phase() - f0.phase()) + wrap_phase(f1.phase() - fm.phase());
            continue;
        }
        if half < 1e-15 * (1.0 + zm.norm()) {
            return Err(Error::ZeroOnPath { z: zm });
        }
        if evaluations > MAX_SEGMENT_SAMPLES {
            return Err(Error::NoConvergence { points: evaluations });
        }
        stack.push((tm, t1, fm, f1));
        stack.push((t0, tm, f0, fm));
    }
    Ok(SegmentTrace { phase: total, min_rel_logmod: min_rel, evaluations })
}

/// Continuous change of `arg f` along the straight segment `a → b`.
pub fn phase_change(f: &ExpSum, a: Complex64, b: Complex64) -> Result<f64> {
    trace_segment(f, a, b, 1.0).map(|t| t.phase)
}

/// Counts zeros inside `rect` without touching its edges; a zero on the
/// contour surfaces as [`Error::ZeroOnPath`].
pub(crate) fn count_exact(f: &ExpSum, rect: &Rectangle) -> Result<WindingResult> {
    let edges = rect.edges();
    let mut safety = 1.0;
    for _ in 0..4 {
        let ((e0, e1), (e2, e3)) = rayon::join(
            || (trace_segment(f, edges[0].0, edges[0].1, safety), trace_segment(f, edges[1].0, edges[1].1, safety)),
            || (trace_segment(f, edges[2].0, edges[2].1, safety), trace_segment(f, edges[3].0, edges[3].1, safety)),
        );
        let traces = [e0?, e1?, e2?, e3?];
        let total: f64 = traces.iter().map(|t| t.phase).sum();
        let turns = total / (2.0 * PI);
        let rounded = turns.round();
        if (turns - rounded).abs() <= INTEGRALITY_TOL && rounded >= 0.0 {
            return Ok(WindingResult {
                count: rounded as usize,
                min_boundary_logmod: traces.iter().map(|t| t.min_rel_logmod).fold(f64::INFINITY, f64::min),
                perturbations_applied: 0,
                segments_evaluated: traces.iter().map(|t| t.evaluations).sum(),
                effective: *rect,
            });
        }
        safety *= 4.0;
    }
    Err(Error::NoConvergence { points: 0 })
}

/// Number of zeros of `f` in `rect`, counted with multiplicity.
///
/// Zeros on (or within [`EDGE_ATTRIBUTION_TOL`] of) the bottom or left edge
/// are counted, those on the top or right edge are not. When the contour runs
/// into a zero, the offending edge is moved by a small deterministic amount
/// chosen so that this attribution is preserved, and the count is retried.
pub fn count_zeros(f: &ExpSum, rect: &Rectangle) -> Result<WindingResult> {
    let original = *rect;
    let mut current = *rect;
    let mut rng = ChaCha8Rng::seed_from_u64(original.fingerprint());
    for attempt in 0..=MAX_PERTURBATIONS {
        match count_exact(f, &current) {
            Ok(mut res) => {
                res.perturbations_applied = attempt;
                return Ok(res);
            }
            Err(Error::ZeroOnPath { z }) if attempt < MAX_PERTURBATIONS => {
                let zero = locate_zero(f, z);
                let u: f64 = 1.0 + rng.random::<f64>();
                let scale = u * 1.5f64.powi(attempt as i32);
                current = perturb(&original, &current, zero, scale)?;
            }
            Err(Error::ZeroOnPath { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Err(Error::PerturbationExhausted { attempts: MAX_PERTURBATIONS })
}

fn locate_zero(f: &ExpSum, z: Complex64) -> Complex64 {
    let out = newton(f, z, 50);
    if out.converged && (out.z - z).norm() < 1e-4 * (1.0 + z.norm()) {
        out.z
    } else {
        z
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Lower,
    Upper,
}

/// Moves one bound away from a zero at coordinate `c`, keeping the zero on the
/// side the attribution rule (applied to the original bound `b0`) puts it.
fn shift_bound(side: Side, b0: f64, b: f64, c: f64, delta: f64) -> f64 {
    let inside = match side {
        Side::Lower => c >= b0 - EDGE_ATTRIBUTION_TOL,
        Side::Upper => c < b0 - EDGE_ATTRIBUTION_TOL,
    };
    match (side, inside) {
        (Side::Lower, true) | (Side::Upper, false) => b.min(c) - delta,
        (Side::Lower, false) | (Side::Upper, true) => b.max(c) + delta,
    }
}

fn perturb(original: &Rectangle, current: &Rectangle, zero: Complex64, scale: f64) -> Result<Rectangle> {
    let mut next = *current;
    let reach = |b: f64, delta: f64| (1e-6 * (1.0 + b.abs())).max(4.0 * delta);
    let in_span = |c: f64, lo: f64, hi: f64, pad: f64| c >= lo - pad && c <= hi + pad;

    let dx = |b: f64| PERTURBATION_SCALE * (1.0 + b.abs()) * scale;
    let mut moved = false;
    let bounds = [
        (Side::Lower, true, original.x_lo, current.x_lo),
        (Side::Upper, true, original.x_hi, current.x_hi),
        (Side::Lower, false, original.y_lo, current.y_lo),
        (Side::Upper, false, original.y_hi, current.y_hi),
    ];
    let mut nearest = (f64::INFINITY, 0usize);
    for (i, &(side, is_x, b0, b)) in bounds.iter().enumerate() {
        let (c, other, lo, hi) = if is_x {
            (zero.re, zero.im, current.y_lo, current.y_hi)
        } else {
            (zero.im, zero.re, current.x_lo, current.x_hi)
        };
        let delta = dx(b);
        let dist = (c - b).abs();
        if dist < nearest.0 && in_span(other, lo, hi, reach(b, delta)) {
            nearest = (dist, i);
        }
        if dist <= reach(b, delta) && in_span(other, lo, hi, reach(b, delta)) {
            let nb = shift_bound(side, b0, b, c, delta);
            set_bound(&mut next, i, nb);
            moved = true;
        }
    }
    if !moved {
        let i = if nearest.0.is_finite() { nearest.1 } else { 0 };
        let (side, is_x, b0, b) = bounds[i];
        let c = if is_x { zero.re } else { zero.im };
        set_bound(&mut next, i, shift_bound(side, b0, b, c, dx(b)));
    }
    Rectangle::new(next.x_lo, next.x_hi, next.y_lo, next.y_hi)
        .map_err(|_| Error::PerturbationExhausted { attempts: MAX_PERTURBATIONS })
}

fn set_bound(r: &mut Rectangle, i: usize, v: f64) {
    match i {
        0 => r.x_lo = v,
        1 => r.x_hi = v,
        2 => r.y_lo = v,
        _ => r.y_hi = v,
    }
}

/// Both sides of Backlund's inequality for the segment `[z1, z2]`:
///
/// ```text
/// |Re (1/2πi) ∫ f′/f dz|  ≤  (max_{|ζ|≤R} ln|f(z1+ζ)| − ln|f(z1)|) / (2 ln(R/T)) + 1/2
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BacklundBound {
    pub z1: Complex64,
    pub z2: Complex64,
    pub radius: f64,
    /// `T = |z2 − z1|`
    pub length: f64,
    pub max_logmod: f64,
    pub anchor_logmod: f64,
    pub bound: f64,
    pub lhs: f64,
}

impl BacklundBound {
    pub fn holds(&self) -> bool {
        self.lhs <= self.bound + 1e-9
    }
}

/// `max ln|f|` over the disc `|z − center| ≤ radius`, taken on the circle
/// (maximum modulus) by sampling plus golden-section refinement.
pub fn disc_max_logmod(f: &ExpSum, center: Complex64, radius: f64) -> f64 {
    let at = |theta: f64| frame(f, center + Complex64::from_polar(radius, theta)).logmod();
    let step = 2.0 * PI / CIRCLE_SAMPLES as f64;
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..CIRCLE_SAMPLES {
        let v = at(i as f64 * step);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let theta = best_i as f64 * step;
    let (_, refined) = golden_max(at, theta - step, theta + step, 1e-12);
    best.max(refined)
}

/// Evaluates Backlund's bound for the segment `z1 → z2` with disc radius `R`.
pub fn backlund_bound(f: &ExpSum, z1: Complex64, z2: Complex64, radius: f64) -> Result<BacklundBound> {
    let length = (z2 - z1).norm();
    if !(length > 0.0) || !(radius > length) {
        return Err(Error::InvalidRadius { radius, length });
    }
    let anchor = frame(f, z1);
    if !(anchor.s.norm() >= ZERO_ON_PATH_REL) {
        return Err(Error::ZeroAtAnchor { z: z1 });
    }
    let anchor_logmod = anchor.logmod();
    let max_logmod = disc_max_logmod(f, z1, radius);
    let bound = (max_logmod - anchor_logmod) / (2.0 * (radius / length).ln()) + 0.5;
    let lhs = phase_change(f, z1, z2)?.abs() / (2.0 * PI);
    Ok(BacklundBound { z1, z2, radius, length, max_logmod, anchor_logmod, bound, lhs })
}

/// A-priori ceiling on the Backlund bound for a horizontal segment of length
/// `length` anchored at abscissa `anchor_x` inside the zero-free region of
/// term `dominant`, with `R = 2·length`:
///
/// ```text
/// (ln(Σ_l |H_l| e^{w_l (x + R)}) − ln(|H_k| e^{w_k x} − Σ_{l≠k} |H_l| e^{w_l x})) / (2 ln 2) + 1/2
/// ```
///
/// It does not depend on the height of the segment. Returns `None` when term
/// `dominant` does not dominate at `anchor_x`.
pub fn midline_bound_ceiling(f: &ExpSum, anchor_x: f64, dominant: usize, length: f64) -> Option<f64> {
    let k = dominant;
    let own = f.freq(k) * anchor_x + f.log_abs(k);
    let rest: f64 = (0..f.len())
        .filter(|&l| l != k)
        .map(|l| (f.freq(l) * anchor_x + f.log_abs(l) - own).exp())
        .sum();
    if !(rest < 1.0) {
        return None;
    }
    let lower = own + (1.0 - rest).ln();
    let reach = anchor_x + 2.0 * length;
    let exps: Vec<f64> = (0..f.len()).map(|l| f.freq(l) * reach + f.log_abs(l)).collect();
    let top = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let upper = top + exps.iter().map(|e| (e - top).exp()).sum::<f64>().ln();
    Some((upper - lower) / (2.0 * 2f64.ln()) + 0.5)
}

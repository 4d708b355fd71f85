//! Zero-free regions and critical strips.
//!
//! For a normalized sum, term `k` dominates at abscissa `x` when
//! `|H_k| e^{w_k x} > Σ_{j≠k} |H_j| e^{w_j x}`. The vertical strips where some
//! term dominates carry no zeros; the closed strips between consecutive such
//! regions are the critical strips, and every zero lives in one of them.
//!
//! Everything here works with the dominance margin
//! `m_k(x) = (w_k x + ln|H_k|) − ln Σ_{j≠k} |H_j| e^{w_j x}`, which is positive
//! exactly where term `k` dominates. As a linear function minus a log-sum-exp
//! it is concave in `x`, so each term dominates on at most one interval.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::{bisect, golden_max};
use crate::sum::ExpSum;

/// Absolute tolerance for boundary-line abscissae.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Dominance intervals narrower than this are treated as tangential contacts.
pub const MIN_REGION_WIDTH: f64 = 1e-10;
/// Grid step of the initial bracketing scan.
pub const SCAN_STEP: f64 = 0.01;
const MAX_SCAN_POINTS: usize = 200_000;
/// Margin `ln 4` (dominant term at least four times the rest) used to place
/// contour lines inside unbounded regions.
const UNBOUNDED_MIDLINE_MARGIN: f64 = 1.386_294_361_119_890_6;

/// A maximal open vertical strip `x_lo < Re z < x_hi` where term `dominant`
/// dominates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroFreeRegion {
    pub x_lo: f64,
    pub x_hi: f64,
    pub dominant: usize,
    /// Abscissa used for contour edges inside this region: the midpoint when
    /// bounded, otherwise the point where the margin reaches `ln 4`.
    pub midline: f64,
}

/// The closed strip `x_lo ≤ Re z ≤ x_hi` between the regions dominated by
/// `left_dominant` and `right_dominant`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalStrip {
    pub x_lo: f64,
    pub x_hi: f64,
    pub left_dominant: usize,
    pub right_dominant: usize,
}

impl CriticalStrip {
    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.x_lo - tol && x <= self.x_hi + tol
    }
}

/// Alternating regions and strips, left to right; `strips[i]` sits between
/// `regions[i]` and `regions[i + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StripDecomposition {
    pub regions: Vec<ZeroFreeRegion>,
    pub strips: Vec<CriticalStrip>,
}

impl StripDecomposition {
    pub fn boundary_line_count(&self) -> usize {
        2 * self.strips.len()
    }

    /// Leftmost strip whose closure, widened by `tol`, contains `x`.
    pub fn strip_containing(&self, x: f64, tol: f64) -> Option<usize> {
        self.strips.iter().position(|s| s.contains(x, tol))
    }

    /// Abscissae of the vertical contour edges enclosing strip `index`.
    pub fn strip_contour(&self, index: usize) -> (f64, f64) {
        (self.regions[index].midline, self.regions[index + 1].midline)
    }

    /// Abscissae of the vertical contour edges enclosing every strip.
    pub fn spanning_contour(&self) -> (f64, f64) {
        (self.regions[0].midline, self.regions[self.regions.len() - 1].midline)
    }

    pub fn to_report(&self) -> DecompositionReport {
        DecompositionReport {
            regions: self
                .regions
                .iter()
                .map(|r| RegionEntry {
                    x_lo: ReportBound::from(r.x_lo),
                    x_hi: ReportBound::from(r.x_hi),
                    dominant: r.dominant,
                })
                .collect(),
            strips: self
                .strips
                .iter()
                .map(|s| StripEntry { x_lo: s.x_lo, x_hi: s.x_hi, j: s.left_dominant, k: s.right_dominant })
                .collect(),
        }
    }
}

/// JSON form of a decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub regions: Vec<RegionEntry>,
    pub strips: Vec<StripEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionEntry {
    pub x_lo: ReportBound,
    pub x_hi: ReportBound,
    pub dominant: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripEntry {
    pub x_lo: f64,
    pub x_hi: f64,
    pub j: usize,
    pub k: usize,
}

/// A finite number, or the strings `"-inf"` / `"+inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportBound {
    Finite(f64),
    Infinite(String),
}

impl From<f64> for ReportBound {
    fn from(x: f64) -> Self {
        if x == f64::NEG_INFINITY {
            ReportBound::Infinite("-inf".into())
        } else if x == f64::INFINITY {
            ReportBound::Infinite("+inf".into())
        } else {
            ReportBound::Finite(x)
        }
    }
}

impl ReportBound {
    pub fn value(&self) -> Option<f64> {
        match self {
            ReportBound::Finite(x) => Some(*x),
            ReportBound::Infinite(s) if s == "-inf" => Some(f64::NEG_INFINITY),
            ReportBound::Infinite(s) if s == "+inf" => Some(f64::INFINITY),
            ReportBound::Infinite(_) => None,
        }
    }
}

impl DecompositionReport {
    /// Structural checks on a (possibly re-ingested) report.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidInput(format!("decomposition report: {msg}")));
        if self.regions.len() < 2 {
            return bad("fewer than two regions");
        }
        if self.strips.len() + 1 != self.regions.len() {
            return bad("strip count must be region count minus one");
        }
        let mut bounds = Vec::with_capacity(self.regions.len());
        for r in &self.regions {
            match (r.x_lo.value(), r.x_hi.value()) {
                (Some(lo), Some(hi)) if lo < hi => bounds.push((lo, hi)),
                _ => return bad("region bounds malformed or empty"),
            }
        }
        if bounds[0].0 != f64::NEG_INFINITY || bounds[bounds.len() - 1].1 != f64::INFINITY {
            return bad("outer regions must be unbounded");
        }
        for (i, s) in self.strips.iter().enumerate() {
            if !(s.x_lo <= s.x_hi) || s.j == s.k {
                return bad("strip malformed");
            }
            if s.x_lo != bounds[i].1 || s.x_hi != bounds[i + 1].0 {
                return bad("regions and strips do not tile the real line");
            }
            if s.j != self.regions[i].dominant || s.k != self.regions[i + 1].dominant {
                return bad("strip dominants disagree with flanking regions");
            }
        }
        Ok(())
    }
}

/// `m_k(x)`: positive iff term `k` strictly dominates the others at `x`.
pub fn dominance_margin(f: &ExpSum, k: usize, x: f64) -> f64 {
    let own = f.freq(k) * x + f.log_abs(k);
    let mut top = f64::NEG_INFINITY;
    for j in (0..f.len()).filter(|&j| j != k) {
        top = top.max(f.freq(j) * x + f.log_abs(j));
    }
    if top == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let mut acc = 0.0;
    for j in (0..f.len()).filter(|&j| j != k) {
        acc += (f.freq(j) * x + f.log_abs(j) - top).exp();
    }
    own - (top + acc.ln())
}

/// Abscissae outside which the first (left) or last (right) term provably
/// dominates: each other term is below `1/(n+1)` of the extreme one.
pub fn scan_bracket(f: &ExpSum) -> (f64, f64) {
    let n = f.n();
    let ln_terms = (f.len() as f64).ln();
    let mut left = f64::INFINITY;
    for j in 1..=n {
        let x = (-ln_terms - (f.log_abs(j) - f.log_abs(0))) / (f.freq(j) - f.freq(0));
        left = left.min(x);
    }
    let mut right = f64::NEG_INFINITY;
    for j in 0..n {
        let x = (f.log_abs(j) - f.log_abs(n) + ln_terms) / (f.freq(n) - f.freq(j));
        right = right.max(x);
    }
    (left - 1.0, right + 1.0)
}

/// Maximal open intervals on which term `k` dominates, left to right.
///
/// Endpoints are located by bisection to [`BOUNDARY_TOL`]; intervals
/// narrower than [`MIN_REGION_WIDTH`] are dropped.
pub fn dominance_intervals(f: &ExpSum, k: usize) -> Vec<(f64, f64)> {
    let n = f.n();
    let (xl, xr) = scan_bracket(f);
    let steps = (((xr - xl) / SCAN_STEP).ceil() as usize).clamp(1, MAX_SCAN_POINTS);
    let h = (xr - xl) / steps as f64;
    let at = |i: usize| if i == steps { xr } else { xl + i as f64 * h };
    let positive = |x: f64| dominance_margin(f, k, x) > 0.0;

    let mut intervals = Vec::new();
    let mut run_start: Option<usize> = None;
    let mut prev = false;
    for i in 0..=steps {
        let p = positive(at(i));
        if p && !prev {
            run_start = Some(i);
        }
        if !p && prev {
            let s = run_start.take().unwrap();
            intervals.push((lower_end(k, s, &at, &positive), bisect(positive, at(i - 1), at(i), BOUNDARY_TOL)));
        }
        prev = p;
    }
    if let Some(s) = run_start {
        let hi = if k == n { f64::INFINITY } else { xr };
        intervals.push((lower_end(k, s, &at, &positive), hi));
    }

    // Concavity: a region narrower than the grid shows up as a positive
    // maximum between grid points.
    if intervals.is_empty() && k != 0 && k != n {
        let (xm, vm) = golden_max(|x| dominance_margin(f, k, x), xl, xr, 1e-13);
        if vm > 0.0 {
            let lo = bisect(positive, xl, xm, BOUNDARY_TOL);
            let hi = bisect(positive, xm, xr, BOUNDARY_TOL);
            intervals.push((lo, hi));
        }
    }

    intervals.retain(|&(lo, hi)| hi - lo >= MIN_REGION_WIDTH);
    intervals
}

fn lower_end<A, P>(k: usize, start: usize, at: &A, positive: &P) -> f64
where
    A: Fn(usize) -> f64,
    P: Fn(f64) -> bool,
{
    if start == 0 {
        if k == 0 {
            f64::NEG_INFINITY
        } else {
            at(0)
        }
    } else {
        bisect(positive, at(start - 1), at(start), BOUNDARY_TOL)
    }
}

/// Places a contour abscissa inside a region.
fn region_midline(f: &ExpSum, lo: f64, hi: f64, k: usize) -> f64 {
    if lo.is_finite() && hi.is_finite() {
        return 0.5 * (lo + hi);
    }
    let target = |x: f64| dominance_margin(f, k, x) >= UNBOUNDED_MIDLINE_MARGIN;
    // margins grow monotonically away from the boundary in unbounded regions
    let (edge, dir) = if lo.is_finite() { (lo, 1.0) } else { (hi, -1.0) };
    let mut d = 0.5;
    while !target(edge + dir * d) && d < 1e6 {
        d *= 2.0;
    }
    bisect(target, edge, edge + dir * d, 1e-9)
}

/// Full left-to-right decomposition of a normalized sum.
pub fn decompose(f: &ExpSum) -> Result<StripDecomposition> {
    if !f.is_normalized() {
        return Err(Error::InvalidInput("decompose needs a normalized sum".into()));
    }
    let mut regions: Vec<ZeroFreeRegion> = (0..f.len())
        .flat_map(|k| {
            dominance_intervals(f, k).into_iter().map(move |(x_lo, x_hi)| ZeroFreeRegion {
                x_lo,
                x_hi,
                dominant: k,
                midline: 0.0,
            })
        })
        .collect();
    regions.sort_by(|a, b| a.x_lo.total_cmp(&b.x_lo));

    // Bisection noise can make touching regions overlap by an ulp or two.
    for i in 1..regions.len() {
        if regions[i].x_lo < regions[i - 1].x_hi {
            let m = 0.5 * (regions[i].x_lo + regions[i - 1].x_hi);
            regions[i].x_lo = m;
            regions[i - 1].x_hi = m;
        }
    }
    for r in regions.iter_mut() {
        r.midline = region_midline(f, r.x_lo, r.x_hi, r.dominant);
    }

    let first = regions.first().map(|r| (r.dominant, r.x_lo));
    let last = regions.last().map(|r| (r.dominant, r.x_hi));
    if first != Some((0, f64::NEG_INFINITY)) || last != Some((f.n(), f64::INFINITY)) {
        return Err(Error::InvalidInput(
            "dominance scan did not find both unbounded regions".into(),
        ));
    }

    let strips = regions
        .windows(2)
        .map(|w| CriticalStrip {
            x_lo: w[0].x_hi,
            x_hi: w[1].x_lo,
            left_dominant: w[0].dominant,
            right_dominant: w[1].dominant,
        })
        .collect();
    Ok(StripDecomposition { regions, strips })
}

/// Outcome of the real-part membership test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremACheck {
    pub holds: bool,
    /// First violating abscissa and the index of the violated inequality
    /// (0 for `1 ≤ Σ|H_j| e^{w_j σ}`, k for the k-th reverse inequality).
    pub witness: Option<(f64, usize)>,
}

// Inequality k fails exactly where m_k > 0; the slack absorbs rounding at
// boundary lines.
const MEMBERSHIP_SLACK: f64 = 1e-13;

fn first_violation(f: &ExpSum, sigma: f64) -> Option<usize> {
    (0..f.len()).find(|&k| dominance_margin(f, k, sigma) > MEMBERSHIP_SLACK)
}

/// Checks whether the `n+1` real-part inequalities hold on all of
/// `(sigma0, sigma1)`. For frequencies independent over ℚ this decides whether
/// the interval lies in the closure of the zeros' real parts; independence is
/// the caller's assertion and is not checked.
pub fn theorem_a_check(f: &ExpSum, sigma0: f64, sigma1: f64) -> Result<TheoremACheck> {
    if !(sigma0 < sigma1) {
        return Err(Error::InvalidInput(format!(
            "need sigma0 < sigma1, got ({sigma0}, {sigma1})"
        )));
    }
    let width = sigma1 - sigma0;
    let mut cells = 64usize;
    let mut clean_levels = 0;
    loop {
        let h = width / cells as f64;
        for i in 1..cells {
            let s = sigma0 + i as f64 * h;
            if let Some(k) = first_violation(f, s) {
                return Ok(TheoremACheck { holds: false, witness: Some((s, k)) });
            }
        }
        clean_levels += 1;
        if (clean_levels >= 2 && cells >= 1024) || h < 1e-9 {
            break;
        }
        cells *= 2;
    }
    // Each m_k is concave, so its maximum over the interval settles the
    // question even for violations narrower than the grid.
    for k in 0..f.len() {
        let (s, v) = golden_max(|x| dominance_margin(f, k, x), sigma0, sigma1, 1e-12 * width.max(1.0));
        if v > MEMBERSHIP_SLACK && s > sigma0 && s < sigma1 {
            return Ok(TheoremACheck { holds: false, witness: Some((s, k)) });
        }
    }
    Ok(TheoremACheck { holds: true, witness: None })
}

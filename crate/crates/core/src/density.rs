//! Counting-law experiments.
//!
//! Counts come from [`count_zeros`] on rectangles `[x_lo, x_hi] × [y0, y0 + r]`.
//! For an increasing list of heights the rectangle is cut into horizontal
//! bands that are counted independently and accumulated; the half-open edge
//! attribution makes the bands add up exactly to the full rectangle.

use std::f64::consts::{E, PI};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strips::{decompose, StripDecomposition};
use crate::sum::ExpSum;
use crate::winding::{count_zeros, Rectangle};
use crate::zeros::{find_zeros, ZeroRecord};

/// Slack on Langer's bound.
pub const LANGER_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensitySample {
    pub r: f64,
    pub count: usize,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub strip_index: usize,
    pub y0: f64,
    pub slope_expected: f64,
    pub samples: Vec<DensitySample>,
    pub max_abs_deviation: f64,
    pub langer_max_deviation: f64,
    pub langer_n: usize,
}

impl DensityReport {
    /// Least-squares slope of `count` against `r` over `r ∈ [r_min, r_max]`.
    pub fn fitted_slope(&self, r_min: f64, r_max: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .samples
            .iter()
            .filter(|s| s.r >= r_min && s.r <= r_max)
            .map(|s| (s.r, s.count as f64))
            .collect();
        fitted_slope(&pts)
    }

    /// Largest `|deviation|` over samples with `r ≤ r_max`.
    pub fn running_max(&self, r_max: f64) -> f64 {
        self.samples.iter().filter(|s| s.r <= r_max).map(|s| s.deviation.abs()).fold(0.0, f64::max)
    }

    /// Per-sample CSV: `r, count, expected, deviation`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
        w.write_record(["r", "count", "expected", "deviation"]).map_err(io)?;
        for s in &self.samples {
            w.write_record([
                format!("{:.17e}", s.r),
                s.count.to_string(),
                format!("{:.17e}", self.slope_expected * s.r),
                format!("{:.17e}", s.deviation),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
        Ok(())
    }
}

/// Ordinary least-squares slope through `(x, y)` points.
pub fn fitted_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn check_r_values(r_values: &[f64]) -> Result<()> {
    if r_values.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::InvalidInput("r values must be finite and non-negative".into()));
    }
    if r_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("r values must be strictly increasing".into()));
    }
    Ok(())
}

/// Zero counts in `[x_lo, x_hi] × [y0, y0 + r]` for each `r` (increasing).
pub fn cumulative_counts(f: &ExpSum, x_lo: f64, x_hi: f64, y0: f64, r_values: &[f64]) -> Result<Vec<usize>> {
    check_r_values(r_values)?;
    let mut edges = vec![0.0];
    edges.extend(r_values.iter().copied().filter(|&r| r > 0.0));
    let bands: Vec<usize> = edges
        .par_windows(2)
        .map(|w| Rectangle::new(x_lo, x_hi, y0 + w[0], y0 + w[1]).and_then(|rect| count_zeros(f, &rect)))
        .map(|res| res.map(|w| w.count))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(r_values.len());
    let mut acc = 0;
    let mut it = bands.into_iter();
    for &r in r_values {
        if r > 0.0 {
            acc += it.next().unwrap_or(0);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Langer's bound `|n(r) − w_n r / 2π| ≤ n` over one rectangle spanning all
/// critical strips. Returns the largest deviation and whether the bound held
/// (with [`LANGER_SLACK`]).
pub fn langer_check(f: &ExpSum, r_values: &[f64], y0: f64) -> Result<(f64, bool)> {
    let d = decompose(f)?;
    langer_with(f, &d, r_values, y0)
}

fn langer_with(f: &ExpSum, d: &StripDecomposition, r_values: &[f64], y0: f64) -> Result<(f64, bool)> {
    let (x_lo, x_hi) = d.spanning_contour();
    let counts = cumulative_counts(f, x_lo, x_hi, y0, r_values)?;
    let slope = f.max_freq() / (2.0 * PI);
    let max_dev = r_values
        .iter()
        .zip(&counts)
        .map(|(r, &c)| (c as f64 - slope * r).abs())
        .fold(0.0, f64::max);
    Ok((max_dev, max_dev <= f.n() as f64 + LANGER_SLACK))
}

/// Counts in critical strip `strip_index` against the expected slope
/// `|w_j − w_k| / 2π`, plus Langer's deviation for the same heights.
pub fn strip_density(f: &ExpSum, strip_index: usize, r_values: &[f64], y0: f64) -> Result<DensityReport> {
    let d = decompose(f)?;
    let strip = d
        .strips
        .get(strip_index)
        .ok_or_else(|| Error::InvalidInput(format!("strip index {strip_index} out of range")))?;
    let slope = (f.freq(strip.right_dominant) - f.freq(strip.left_dominant)).abs() / (2.0 * PI);
    let (x_lo, x_hi) = d.strip_contour(strip_index);
    let counts = cumulative_counts(f, x_lo, x_hi, y0, r_values)?;
    let samples: Vec<DensitySample> = r_values
        .iter()
        .zip(counts)
        .map(|(&r, count)| DensitySample { r, count, deviation: count as f64 - slope * r })
        .collect();
    let max_abs_deviation = samples.iter().map(|s| s.deviation.abs()).fold(0.0, f64::max);
    let (langer_max_deviation, _) = langer_with(f, &d, r_values, y0)?;
    Ok(DensityReport {
        strip_index,
        y0,
        slope_expected: slope,
        samples,
        max_abs_deviation,
        langer_max_deviation,
        langer_n: f.n(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandCount {
    pub r: f64,
    /// Zeros with `Im z ∈ [r, r + band)`.
    pub upper: usize,
    /// Zeros with `Im z ∈ [−r − band, −r)`.
    pub lower: usize,
}

/// Zero counts in horizontal bands of height `band` above `r` and below `−r`.
pub fn unit_band_counts(f: &ExpSum, strip_index: usize, r_values: &[f64], band: f64) -> Result<Vec<BandCount>> {
    if !(band > 0.0) {
        return Err(Error::InvalidInput(format!("band must be positive, got {band}")));
    }
    let d = decompose(f)?;
    if strip_index >= d.strips.len() {
        return Err(Error::InvalidInput(format!("strip index {strip_index} out of range")));
    }
    let (x_lo, x_hi) = d.strip_contour(strip_index);
    r_values
        .par_iter()
        .map(|&r| {
            let up = count_zeros(f, &Rectangle::new(x_lo, x_hi, r, r + band)?)?;
            let down = count_zeros(f, &Rectangle::new(x_lo, x_hi, -r - band, -r)?)?;
            Ok(BandCount { r, upper: up.count, lower: down.count })
        })
        .collect()
}

/// Every zero with `Im z ∈ [y_lo, y_hi)` across all critical strips.
pub fn all_zeros(f: &ExpSum, y_lo: f64, y_hi: f64) -> Result<Vec<ZeroRecord>> {
    let d = decompose(f)?;
    let per_strip: Vec<Vec<ZeroRecord>> = (0..d.strips.len())
        .into_par_iter()
        .map(|i| find_zeros(f, &d, i, y_lo, y_hi))
        .collect::<Result<_>>()?;
    let mut out: Vec<ZeroRecord> = per_strip.into_iter().flatten().collect();
    crate::zeros::sort_records(&mut out);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Empirical distribution of real parts of zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPartClosure {
    pub y_horizon: f64,
    pub zero_count: usize,
    pub histogram: Vec<HistogramBin>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    /// Largest gap between consecutive sorted real parts.
    pub max_gap: Option<f64>,
}

/// Real parts of all zeros with `|Im z| ≤ y_horizon`.
pub fn real_part_closure(f: &ExpSum, y_horizon: f64, bins: usize) -> Result<RealPartClosure> {
    if !(y_horizon > 0.0) {
        return Err(Error::InvalidInput(format!("horizon must be positive, got {y_horizon}")));
    }
    // top edge nudged up so that Im z = y_horizon is included
    let top = y_horizon + 1e-9 * (1.0 + y_horizon);
    let zeros = all_zeros(f, -y_horizon, top)?;
    let mut re: Vec<f64> = zeros.iter().map(|z| z.z.re).collect();
    re.sort_by(f64::total_cmp);
    Ok(summarize_real_parts(y_horizon, &re, zeros.iter().map(|z| z.multiplicity).sum(), bins))
}

fn summarize_real_parts(y_horizon: f64, sorted: &[f64], zero_count: usize, bins: usize) -> RealPartClosure {
    let (min, max) = (sorted.first().copied(), sorted.last().copied());
    let max_gap = (sorted.len() >= 2).then(|| sorted.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max));
    let mut histogram = Vec::new();
    if let (Some(lo), Some(hi)) = (min, max) {
        if bins > 0 {
            let width = (hi - lo) / bins as f64;
            histogram = (0..bins)
                .map(|i| HistogramBin { lo: lo + i as f64 * width, hi: lo + (i + 1) as f64 * width, count: 0 })
                .collect();
            for &x in sorted {
                let i = if width > 0.0 { (((x - lo) / width) as usize).min(bins - 1) } else { 0 };
                histogram[i].count += 1;
            }
        }
    }
    RealPartClosure { y_horizon, zero_count, histogram, min, max, max_gap }
}

/// `r(|z|) = 1 / ((1 + |z|) ln²(e + |z|))`.
pub fn disc_radius(modulus: f64) -> f64 {
    1.0 / ((1.0 + modulus) * (E + modulus).ln().powi(2))
}

/// `3 ∫_H^∞ n̂(t) / ((1 + t)² ln²(e + t)) dt` with `n̂(t) = (w_n/π) t + n`.
///
/// With `v = 1 / ln(e + t)` the integrand becomes
/// `3 n̂(t) (e + t) / (1 + t)²` on `v ∈ (0, 1/ln(e + H)]`, which is bounded and
/// tends to `3 w_n / π` as `v → 0`.
pub fn disc_tail_bound(f: &ExpSum, horizon: f64) -> f64 {
    let slope = f.max_freq() / PI;
    let n = f.n() as f64;
    let g = |v: f64| {
        if v <= 1.0 / 700.0 {
            return 3.0 * slope;
        }
        let t = (1.0 / v).exp() - E;
        3.0 * (slope * t + n) * (E + t) / (1.0 + t).powi(2)
    };
    let v_hi = 1.0 / (E + horizon.max(0.0)).ln();
    adaptive_simpson(&g, 0.0, v_hi, 1e-12, 40)
}

fn adaptive_simpson<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (g(lm), g(rm));
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        rec(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fm, fb) = (g(a), g(0.5 * (a + b)), g(b));
    rec(g, a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, depth)
}

/// Parameters of [`disc_experiment`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscOptions {
    pub modulus_horizon: f64,
    pub line_samples: usize,
    /// Discs with index `≥ cutoff_index` (ordered by modulus) enter the
    /// measure estimate.
    pub cutoff_index: usize,
    /// Only discs with `|z_n| > hit_modulus` count as line hits.
    pub hit_modulus: f64,
    pub seed: u64,
}

impl DiscOptions {
    pub fn new(modulus_horizon: f64) -> Self {
        DiscOptions { modulus_horizon, line_samples: 64, cutoff_index: 100, hit_modulus: 100.0, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineHits {
    pub c: f64,
    /// Discs with `|z_n| > hit_modulus` met by `Re z = c`.
    pub hits: usize,
    /// Of those, discs in the last decade of modulus.
    pub late_hits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscExperiment {
    pub modulus_horizon: f64,
    /// Zeros with `|z| ≤ modulus_horizon`, counted with multiplicity.
    pub zeros_enumerated: usize,
    pub radii_partial_sum: f64,
    pub analytic_tail_bound: f64,
    /// Σ r_n over the last decade of modulus.
    pub decade_increment: f64,
    /// Tail bound at a tenth of the horizon.
    pub decade_tail_bound: f64,
    pub lines_tested: usize,
    /// Lines meeting a disc in the last decade of modulus.
    pub lines_hitting_infinitely: usize,
    pub line_hits: Vec<LineHits>,
    /// `2 Σ_{n ≥ cutoff} r_n` over enumerated zeros plus twice the tail
    /// bound: an upper bound on the length of `C_ε ∩ ℝ`.
    pub measure_estimate_epsilon: f64,
    pub cutoff_index: usize,
}

/// Zeros with `|z| ≤ horizon`, repeated by multiplicity and ordered by modulus.
pub fn zeros_by_modulus(f: &ExpSum, horizon: f64) -> Result<Vec<ZeroRecord>> {
    let top = horizon + 1e-9 * (1.0 + horizon);
    let mut zs: Vec<ZeroRecord> = all_zeros(f, -horizon, top)?
        .into_iter()
        .filter(|z| z.z.norm() <= horizon)
        .flat_map(|z| std::iter::repeat_n(z, z.multiplicity))
        .collect();
    zs.sort_by(|a, b| a.z.norm().total_cmp(&b.z.norm()).then(a.z.im.total_cmp(&b.z.im)));
    Ok(zs)
}

/// Number of discs `|z − z_n| < r_n` with `|z_n| > min_modulus` met by the
/// line `Re z = c`.
pub fn line_disc_hits(zeros: &[ZeroRecord], c: f64, min_modulus: f64) -> usize {
    zeros
        .iter()
        .filter(|z| z.z.norm() > min_modulus && (z.z.re - c).abs() < disc_radius(z.z.norm()))
        .count()
}

/// The disc-avoidance experiment: discs `D_n` of radius `r_n` around the
/// zeros, their summed radii, and how often random vertical lines meet them.
pub fn disc_experiment(f: &ExpSum, opts: &DiscOptions) -> Result<DiscExperiment> {
    if !(opts.modulus_horizon > 0.0) {
        return Err(Error::InvalidInput(format!("modulus horizon must be positive, got {}", opts.modulus_horizon)));
    }
    let h = opts.modulus_horizon;
    let zeros = zeros_by_modulus(f, h)?;
    let radii: Vec<f64> = zeros.iter().map(|z| disc_radius(z.z.norm())).collect();
    let radii_partial_sum: f64 = radii.iter().sum();
    let analytic_tail_bound = disc_tail_bound(f, h);
    let decade_increment: f64 = zeros
        .iter()
        .zip(&radii)
        .filter(|(z, _)| z.z.norm() > h / 10.0)
        .map(|(_, r)| r)
        .sum();
    let decade_tail_bound = disc_tail_bound(f, h / 10.0);

    let d = decompose(f)?;
    let (span_lo, span_hi) = (d.strips[0].x_lo, d.strips[d.strips.len() - 1].x_hi);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let line_hits: Vec<LineHits> = (0..opts.line_samples)
        .map(|_| {
            let c = if span_hi > span_lo { rng.random_range(span_lo..span_hi) } else { span_lo };
            LineHits {
                c,
                hits: line_disc_hits(&zeros, c, opts.hit_modulus),
                late_hits: line_disc_hits(&zeros, c, opts.hit_modulus.max(h / 10.0)),
            }
        })
        .collect();
    let lines_hitting_infinitely = line_hits.iter().filter(|l| l.late_hits > 0).count();
    let measure_estimate_epsilon = 2.0 * radii.iter().skip(opts.cutoff_index).sum::<f64>() + 2.0 * analytic_tail_bound;
    Ok(DiscExperiment {
        modulus_horizon: h,
        zeros_enumerated: zeros.len(),
        radii_partial_sum,
        analytic_tail_bound,
        decade_increment,
        decade_tail_bound,
        lines_tested: opts.line_samples,
        lines_hitting_infinitely,
        line_hits,
        measure_estimate_epsilon,
        cutoff_index: opts.cutoff_index,
    })
}

/// `count` heights between `lo` and `hi`, geometrically spaced with each
/// point jittered by up to a quarter step (in log scale). The endpoints are
/// kept exact.
pub fn default_r_grid(lo: f64, hi: f64, count: usize, seed: u64) -> Vec<f64> {
    if count == 0 || !(lo > 0.0) || !(hi > lo) {
        return Vec::new();
    }
    if count == 1 {
        return vec![lo];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = (hi / lo).ln() / (count - 1) as f64;
    (0..count)
        .map(|i| {
            let jitter = if i == 0 || i + 1 == count { 0.0 } else { rng.random_range(-0.25..0.25) * step };
            lo * (i as f64 * step + jitter).exp()
        })
        .collect()
}

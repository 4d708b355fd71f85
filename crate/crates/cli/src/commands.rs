use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use expsum::density::{default_r_grid, langer_check, DiscOptions, LANGER_SLACK};
use expsum::strips::DecompositionReport;
use expsum::winding::Rectangle;
use expsum::zeros::{write_zeros_csv, MAX_RELATIVE_RESIDUAL};
use expsum::{
    backlund_bound, count_zeros, decompose, disc_experiment, find_zeros, strip_density, Complex64, DensityReport,
    ExpSum, StripDecomposition, ZeroRecord,
};
use serde::Serialize;

use crate::args::{Command, Common, Window};
use crate::svg;
use crate::Failure;

pub fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Analyze { common } => analyze(&common),
        Command::Count { common, window, strip, x_lo, x_hi } => count(&common, window, strip, x_lo.zip(x_hi)),
        Command::Zeros { common, window, strip } => zeros(&common, window, strip),
        Command::Density { common, strip, r_grid, r_min, r_max, r_count, y0 } => {
            let grid = match r_grid {
                Some(g) => g,
                None => default_r_grid(r_min, r_max, r_count, common.seed),
            };
            density(&common, strip, &grid, y0)
        }
        Command::Backlund { common, z1, z2, radius } => backlund(&common, &z1, &z2, radius),
        Command::Disc { common, horizon, lines, cutoff, hit_modulus } => {
            let opts = DiscOptions { modulus_horizon: horizon, line_samples: lines, cutoff_index: cutoff, hit_modulus, seed: common.seed };
            disc(&common, &opts)
        }
        Command::Report { common, window } => report(&common, window),
        Command::Validate { input } => validate(&input),
    }
}

fn load(common: &Common) -> Result<ExpSum, Failure> {
    let text = fs::read_to_string(&common.problem)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", common.problem.display())))?;
    let sum = ExpSum::from_problem_json(&text)?;
    Ok(if sum.is_normalized() { sum } else { sum.normalize()?.sum })
}

fn check_window(w: Window) -> Result<(), Failure> {
    if !(w.y_lo < w.y_hi) {
        return Err(Failure::input(format!("need y-lo < y-hi, got [{}, {}]", w.y_lo, w.y_hi)));
    }
    Ok(())
}

fn strip_index(d: &StripDecomposition, strip: Option<usize>) -> Result<Option<usize>, Failure> {
    match strip {
        Some(i) if i >= d.strips.len() => {
            Err(Failure::input(format!("strip {i} does not exist ({} strips)", d.strips.len())))
        }
        s => Ok(s),
    }
}

fn write(out: &Path, name: &str, contents: &[u8]) -> Result<(), Failure> {
    fs::create_dir_all(out).map_err(|e| Failure::input(format!("cannot create {}: {e}", out.display())))?;
    let path = out.join(name);
    fs::write(&path, contents).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::input(e.to_string()))?;
    text.push('\n');
    write(out, name, text.as_bytes())
}

/// JSON unless another format was asked for.
fn wants_json(c: &Common) -> bool {
    c.json || !(c.csv || c.svg)
}

fn analyze(common: &Common) -> Result<(), Failure> {
    let f = load(common)?;
    let d = decompose(&f)?;
    let report = d.to_report();
    report.validate().map_err(|e| Failure::invariant(format!("decomposition failed validation: {e}")))?;
    println!("{f}");
    for r in &d.regions {
        println!("region  ({:.10}, {:.10})  dominant {}", r.x_lo, r.x_hi, r.dominant);
    }
    for (i, s) in d.strips.iter().enumerate() {
        println!("strip {i} [{:.10}, {:.10}]  between {} and {}", s.x_lo, s.x_hi, s.left_dominant, s.right_dominant);
    }
    if wants_json(common) {
        write_json(&common.out, "decomposition.json", &report)?;
    }
    if common.svg {
        write(&common.out, "strips.svg", svg::strip_diagram(&d, None).as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CountOutput {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
    count: usize,
    perturbations_applied: usize,
    effective: Rectangle,
}

fn count(common: &Common, w: Window, strip: Option<usize>, xs: Option<(f64, f64)>) -> Result<(), Failure> {
    check_window(w)?;
    let f = load(common)?;
    let (x_lo, x_hi) = match (xs, strip) {
        (Some(xs), _) => xs,
        (None, s) => {
            let d = decompose(&f)?;
            match strip_index(&d, s)? {
                Some(i) => d.strip_contour(i),
                None => d.spanning_contour(),
            }
        }
    };
    let rect = Rectangle::new(x_lo, x_hi, w.y_lo, w.y_hi)?;
    let res = count_zeros(&f, &rect)?;
    println!("{}", res.count);
    if wants_json(common) {
        let out = CountOutput {
            x_lo,
            x_hi,
            y_lo: w.y_lo,
            y_hi: w.y_hi,
            count: res.count,
            perturbations_applied: res.perturbations_applied,
            effective: res.effective,
        };
        write_json(&common.out, "count.json", &out)?;
    }
    Ok(())
}

fn collect_zeros(f: &ExpSum, d: &StripDecomposition, w: Window, strip: Option<usize>) -> Result<Vec<ZeroRecord>, Failure> {
    let indices: Vec<usize> = match strip {
        Some(i) => vec![i],
        None => (0..d.strips.len()).collect(),
    };
    let mut all = Vec::new();
    for i in indices {
        all.extend(find_zeros(f, d, i, w.y_lo, w.y_hi)?);
    }
    expsum::zeros::sort_records(&mut all);
    Ok(all)
}

fn check_zeros(f: &ExpSum, d: &StripDecomposition, zs: &[ZeroRecord]) -> Result<(), Failure> {
    for z in zs {
        let strip = &d.strips[z.strip_index];
        if z.relative_residual(f) > MAX_RELATIVE_RESIDUAL || !strip.contains(z.z.re, 1e-9) {
            return Err(Failure::invariant(format!("zero record fails verification: {z:?}")));
        }
    }
    Ok(())
}

fn zeros(common: &Common, w: Window, strip: Option<usize>) -> Result<(), Failure> {
    check_window(w)?;
    let f = load(common)?;
    let d = decompose(&f)?;
    let strip = strip_index(&d, strip)?;
    let zs = collect_zeros(&f, &d, w, strip)?;
    println!("{} zeros ({} with multiplicity)", zs.len(), zs.iter().map(|z| z.multiplicity).sum::<usize>());
    if common.csv || !(common.json || common.svg) {
        let mut buf = Vec::new();
        write_zeros_csv(&zs, &mut buf)?;
        write(&common.out, "zeros.csv", &buf)?;
    }
    if common.json {
        write_json(&common.out, "zeros.json", &zs)?;
    }
    if common.svg {
        let overlay = svg::Overlay { y_lo: w.y_lo, y_hi: w.y_hi, zeros: &zs };
        write(&common.out, "zeros.svg", svg::strip_diagram(&d, Some(overlay)).as_bytes())?;
    }
    check_zeros(&f, &d, &zs)
}

#[derive(Serialize)]
struct LangerSummary {
    n: usize,
    max_deviation: f64,
    pass: bool,
}

#[derive(Serialize)]
struct DensityOutput {
    r_values: Vec<f64>,
    y0: f64,
    strips: Vec<DensityReport>,
    langer: LangerSummary,
}

fn density(common: &Common, strip: Option<usize>, grid: &[f64], y0: f64) -> Result<(), Failure> {
    let f = load(common)?;
    let d = decompose(&f)?;
    let indices: Vec<usize> = match strip_index(&d, strip)? {
        Some(i) => vec![i],
        None => (0..d.strips.len()).collect(),
    };
    let reports = indices.iter().map(|&i| strip_density(&f, i, grid, y0)).collect::<expsum::Result<Vec<_>>>()?;
    let (max_deviation, pass) = langer_check(&f, grid, y0)?;
    for r in &reports {
        let slope = r.fitted_slope(100.0, f64::INFINITY);
        println!(
            "strip {}: expected slope {:.6}, fitted {}, max |deviation| {:.3}",
            r.strip_index,
            r.slope_expected,
            slope.map_or("n/a".to_string(), |s| format!("{s:.6}")),
            r.max_abs_deviation
        );
    }
    println!("langer: max deviation {max_deviation:.3} against n = {} ({})", f.n(), if pass { "ok" } else { "FAILED" });
    if wants_json(common) {
        let out = DensityOutput {
            r_values: grid.to_vec(),
            y0,
            strips: reports.clone(),
            langer: LangerSummary { n: f.n(), max_deviation, pass },
        };
        write_json(&common.out, "density.json", &out)?;
    }
    if common.csv {
        for r in &reports {
            let mut buf = Vec::new();
            r.write_csv(&mut buf)?;
            write(&common.out, &format!("density_strip{}.csv", r.strip_index), &buf)?;
        }
    }
    if !pass {
        let slope = f.max_freq() / (2.0 * PI);
        let (x_lo, x_hi) = d.spanning_contour();
        let counts = expsum::density::cumulative_counts(&f, x_lo, x_hi, y0, grid)?;
        let worst = grid
            .iter()
            .zip(&counts)
            .find(|(r, &c)| (c as f64 - slope * **r).abs() > f.n() as f64 + LANGER_SLACK)
            .map(|(r, c)| format!("r = {r}, n(r) = {c}, expected {:.6}", slope * r))
            .unwrap_or_default();
        return Err(Failure::invariant(format!("Langer bound violated: {worst}")));
    }
    Ok(())
}

fn point(v: &[f64], name: &str) -> Result<Complex64, Failure> {
    match v {
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err(Failure::input(format!("{name} must be given as re,im"))),
    }
}

fn backlund(common: &Common, z1: &[f64], z2: &[f64], radius: f64) -> Result<(), Failure> {
    let f = load(common)?;
    let b = backlund_bound(&f, point(z1, "z1")?, point(z2, "z2")?, radius)?;
    println!("lhs {:.12}  bound {:.12}  ({})", b.lhs, b.bound, if b.holds() { "holds" } else { "VIOLATED" });
    if wants_json(common) {
        write_json(&common.out, "backlund.json", &b)?;
    }
    if !b.holds() {
        return Err(Failure::invariant(format!("Backlund bound violated: {b:?}")));
    }
    Ok(())
}

fn disc(common: &Common, opts: &DiscOptions) -> Result<(), Failure> {
    let f = load(common)?;
    let exp = disc_experiment(&f, opts)?;
    println!(
        "{} zeros, sum r_n = {:.9}, tail bound {:.9}, {} of {} lines meet late discs",
        exp.zeros_enumerated, exp.radii_partial_sum, exp.analytic_tail_bound, exp.lines_hitting_infinitely, exp.lines_tested
    );
    if wants_json(common) {
        write_json(&common.out, "disc.json", &exp)?;
    }
    if exp.decade_increment > exp.decade_tail_bound {
        return Err(Failure::invariant(format!(
            "last-decade increment {} exceeds tail bound {}",
            exp.decade_increment, exp.decade_tail_bound
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct StripSummary {
    index: usize,
    x_lo: f64,
    x_hi: f64,
    left_dominant: usize,
    right_dominant: usize,
    zeros_in_window: usize,
    expected_density: f64,
}

#[derive(Serialize)]
struct FullReport {
    problem: expsum::sum::ProblemFile,
    decomposition: DecompositionReport,
    window: (f64, f64),
    strips: Vec<StripSummary>,
    total_zeros: usize,
    spanning_count: usize,
    zeros: Vec<ZeroRecord>,
}

fn report(common: &Common, w: Window) -> Result<(), Failure> {
    check_window(w)?;
    let f = load(common)?;
    let d = decompose(&f)?;
    let zs = collect_zeros(&f, &d, w, None)?;
    let (x_lo, x_hi) = d.spanning_contour();
    let spanning = count_zeros(&f, &Rectangle::new(x_lo, x_hi, w.y_lo, w.y_hi)?)?.count;
    let total: usize = zs.iter().map(|z| z.multiplicity).sum();
    let strips = d
        .strips
        .iter()
        .enumerate()
        .map(|(i, s)| StripSummary {
            index: i,
            x_lo: s.x_lo,
            x_hi: s.x_hi,
            left_dominant: s.left_dominant,
            right_dominant: s.right_dominant,
            zeros_in_window: zs.iter().filter(|z| z.strip_index == i).map(|z| z.multiplicity).sum(),
            expected_density: (f.freq(s.right_dominant) - f.freq(s.left_dominant)).abs() / (2.0 * PI),
        })
        .collect();
    let out = FullReport {
        problem: f.to_problem(),
        decomposition: d.to_report(),
        window: (w.y_lo, w.y_hi),
        strips,
        total_zeros: total,
        spanning_count: spanning,
        zeros: zs.clone(),
    };
    println!("{total} zeros in window, spanning count {spanning}");
    write_json(&common.out, "report.json", &out)?;
    if common.svg {
        let overlay = svg::Overlay { y_lo: w.y_lo, y_hi: w.y_hi, zeros: &zs };
        write(&common.out, "report.svg", svg::strip_diagram(&d, Some(overlay)).as_bytes())?;
    }
    check_zeros(&f, &d, &zs)?;
    if total != spanning {
        return Err(Failure::invariant(format!("strip zeros ({total}) differ from spanning count ({spanning})")));
    }
    Ok(())
}

fn validate(input: &Path) -> Result<(), Failure> {
    let text =
        fs::read_to_string(input).map_err(|e| Failure::input(format!("cannot read {}: {e}", input.display())))?;
    let report: DecompositionReport =
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("not a decomposition report: {e}")))?;
    report.validate().map_err(|e| Failure::invariant(e.to_string()))?;
    println!("ok: {} regions, {} strips", report.regions.len(), report.strips.len());
    Ok(())
}

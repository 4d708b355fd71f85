//! Strip diagrams.

use std::fmt::Write;

use expsum::{StripDecomposition, ZeroRecord};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const PAD: f64 = 40.0;

/// Zeros to draw over the diagram, and the vertical window they come from.
pub struct Overlay<'a> {
    pub y_lo: f64,
    pub y_hi: f64,
    pub zeros: &'a [ZeroRecord],
}

fn x_range(d: &StripDecomposition) -> (f64, f64) {
    let finite: Vec<f64> = d
        .regions
        .iter()
        .flat_map(|r| [r.x_lo, r.x_hi])
        .filter(|x| x.is_finite())
        .collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let margin = 0.15 * (hi - lo).max(1.0);
    (lo - margin, hi + margin)
}

pub fn strip_diagram(d: &StripDecomposition, overlay: Option<Overlay>) -> String {
    let (x_lo, x_hi) = x_range(d);
    let (y_lo, y_hi) = overlay.as_ref().map_or((-1.0, 1.0), |o| (o.y_lo, o.y_hi));
    let sx = |x: f64| PAD + (x.clamp(x_lo, x_hi) - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * PAD);
    let sy = |y: f64| HEIGHT - PAD - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * PAD);
    let (top, bottom) = (PAD, HEIGHT - PAD);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    for r in &d.regions {
        let (a, b) = (sx(r.x_lo), sx(r.x_hi));
        let _ = writeln!(
            s,
            r##"<rect x="{a:.2}" y="{top}" width="{:.2}" height="{:.2}" fill="#e8f0fa"/>"##,
            b - a,
            bottom - top
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">k={}</text>"#,
            0.5 * (a + b),
            top + 14.0,
            r.dominant
        );
    }
    for st in &d.strips {
        let (a, b) = (sx(st.x_lo), sx(st.x_hi));
        let _ = writeln!(
            s,
            r##"<rect x="{a:.2}" y="{top}" width="{:.2}" height="{:.2}" fill="#f4c7a1"/>"##,
            (b - a).max(1.0),
            bottom - top
        );
    }
    let mut lines: Vec<f64> = d.strips.iter().flat_map(|st| [st.x_lo, st.x_hi]).collect();
    lines.dedup();
    for (i, x) in lines.iter().enumerate() {
        let px = sx(*x);
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{top}" x2="{px:.2}" y2="{bottom}" stroke="black"/>"#);
        let label_y = bottom + 14.0 + 12.0 * (i % 2) as f64;
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{label_y:.2}" text-anchor="middle">{x:.4}</text>"#);
    }
    if let Some(o) = overlay {
        for z in o.zeros {
            let r = 2.0 + z.multiplicity as f64;
            let _ = writeln!(
                s,
                r##"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="#b00020"/>"##,
                sx(z.z.re),
                sy(z.z.im)
            );
        }
        let _ = writeln!(s, r#"<text x="4" y="{bottom:.2}">{y_lo}</text>"#);
        let _ = writeln!(s, r#"<text x="4" y="{:.2}">{y_hi}</text>"#, top + 10.0);
    }
    s.push_str("</svg>\n");
    s
}

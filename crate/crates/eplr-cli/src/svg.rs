//! Minimal hand-written SVG log-log plots: one data polyline and two
//! dotted reference-slope guides, mirroring the convergence figures.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 480.0;
const ML: f64 = 72.0;
const MR: f64 = 24.0;
const MT: f64 = 36.0;
const MB: f64 = 56.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn x(&self, lx: f64) -> f64 {
        ML + (lx - self.x0) / (self.x1 - self.x0) * (W - ML - MR)
    }

    fn y(&self, ly: f64) -> f64 {
        // Larger values sit higher on the canvas.
        H - MB - (ly - self.y0) / (self.y1 - self.y0) * (H - MT - MB)
    }
}

/// Renders |error| against N on log-log axes with dotted guides of slopes
/// -alpha and -(alpha-1).
pub fn loglog_plot(points: &[(f64, f64)], alpha: u32, title: &str) -> String {
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (x0, x1) = bounds(&lx);
    let (y0, y1) = bounds(&ly);
    let f = Frame { x0, x1, y0: y0 - 0.5, y1: y1 + 1.5 };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>",
        W - ML - MR,
        H - MT - MB
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{}</text>",
        W / 2.0,
        MT - 12.0,
        title
    );

    // Axis ticks: x at integer log2(N), y at decades.
    let log2e = std::f64::consts::LOG2_E;
    let k_lo = (x0 * log2e).ceil() as i64;
    let k_hi = (x1 * log2e).floor() as i64;
    for k in k_lo..=k_hi {
        let xx = f.x(k as f64 / log2e);
        let _ = writeln!(
            svg,
            "<text x=\"{xx:.1}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{k}</text>",
            H - MB + 16.0
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">log2(N)</text>",
        W / 2.0,
        H - 14.0
    );
    let ln10 = std::f64::consts::LN_10;
    let e_lo = (f.y0 / ln10).ceil() as i64;
    let e_hi = (f.y1 / ln10).floor() as i64;
    for e in e_lo..=e_hi {
        let yy = f.y(e as f64 * ln10);
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{yy:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e{e}</text>",
            ML - 6.0
        );
    }

    // Reference guides through the first data point, lifted slightly.
    for (i, slope) in [-(alpha as f64), -(alpha as f64 - 1.0)].into_iter().enumerate() {
        let anchor = ly[0] + 1.0 + i as f64 * 0.4;
        let ya = anchor;
        let yb = anchor + slope * (x1 - x0);
        let _ = writeln!(
            svg,
            "<line class=\"guide\" x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#888\" stroke-dasharray=\"5 4\"/>",
            f.x(x0),
            f.y(ya),
            f.x(x1),
            f.y(yb)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#666\">N^{slope}</text>",
            f.x(x1) - 52.0,
            f.y(yb) - 5.0
        );
    }

    // The data polyline.
    let pts: Vec<String> =
        lx.iter().zip(&ly).map(|(&a, &b)| format!("{:.2},{:.2}", f.x(a), f.y(b))).collect();
    let _ = writeln!(
        svg,
        "<polyline class=\"data\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.8\" points=\"{}\"/>",
        pts.join(" ")
    );
    for (a, b) in lx.iter().zip(&ly) {
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.6\" fill=\"#1f77b4\"/>",
            f.x(*a),
            f.y(*b)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}

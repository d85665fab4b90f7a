//! Self-contained SVG plots: a density histogram with the limiting normal
//! curve and truth line, and a chain trace with a burn-in marker.

use std::fmt::Write as _;

use crate::diagnostics::LimitingNormal;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;
/// Sample points on the analytic density curve.
pub const CURVE_POINTS: usize = 512;
/// Traces longer than this are thinned by a fixed stride.
const MAX_TRACE_POINTS: usize = 4000;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, frame: &Frame, xlabel: &str, ylabel: &str) {
    let (l, r) = (MARGIN_L, WIDTH - MARGIN_R);
    let (t, b) = (MARGIN_T, HEIGHT - MARGIN_B);
    let _ = writeln!(
        out,
        r#"<path d="M{l:.1},{t:.1} L{l:.1},{b:.1} L{r:.1},{b:.1}" stroke="black" fill="none"/>"#
    );
    for i in 0..=4 {
        let x = frame.x0 + (frame.x1 - frame.x0) * i as f64 / 4.0;
        let px = frame.px(x);
        let _ = writeln!(
            out,
            r#"<line x1="{px:.1}" y1="{b:.1}" x2="{px:.1}" y2="{:.1}" stroke="black"/><text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            b + 4.0,
            b + 16.0,
            tick(x)
        );
        let y = frame.y0 + (frame.y1 - frame.y0) * i as f64 / 4.0;
        let py = frame.py(y);
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{py:.1}" x2="{l:.1}" y2="{py:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            l - 4.0,
            l - 6.0,
            py + 4.0,
            tick(y)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Density histogram of `samples` overlaid with `reference` and a vertical
/// line at `truth`.
pub fn histogram_svg(
    samples: &[f64],
    reference: &LimitingNormal,
    truth: f64,
    bins: usize,
    title: &str,
) -> String {
    let bins = bins.max(1);
    let smin = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let smax = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (smin, smax) = if smin < smax {
        (smin, smax)
    } else {
        (smin - reference.sd(), smin + reference.sd())
    };
    let width = (smax - smin) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let i = (((x - smin) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let total = samples.len().max(1) as f64;
    let densities: Vec<f64> = counts.iter().map(|&c| c as f64 / (total * width)).collect();

    let four_sd = 4.0 * reference.sd();
    let x0 = smin.min(reference.center - four_sd).min(truth);
    let x1 = smax.max(reference.center + four_sd).max(truth);
    let pad = 0.02 * (x1 - x0);
    let peak = densities
        .iter()
        .copied()
        .fold(reference.pdf(reference.center), f64::max);
    let frame = Frame {
        x0: x0 - pad,
        x1: x1 + pad,
        y0: 0.0,
        y1: 1.05 * peak,
    };

    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &frame, "theta", "density");
    for (i, d) in densities.iter().enumerate() {
        let left = frame.px(smin + i as f64 * width);
        let right = frame.px(smin + (i + 1) as f64 * width);
        let top = frame.py(*d);
        let _ = writeln!(
            out,
            r##"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="#b0b0b0" stroke="#808080" stroke-width="0.5"/>"##,
            (right - left).max(0.0),
            (frame.py(0.0) - top).max(0.0)
        );
    }
    let mut path = String::new();
    for i in 0..CURVE_POINTS {
        let x = frame.x0 + (frame.x1 - frame.x0) * i as f64 / (CURVE_POINTS - 1) as f64;
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(path, "{cmd}{:.2},{:.2} ", frame.px(x), frame.py(reference.pdf(x)));
    }
    let _ = writeln!(
        out,
        r#"<path d="{}" stroke="blue" stroke-width="1.5" fill="none"/>"#,
        path.trim_end()
    );
    let tx = frame.px(truth);
    let _ = writeln!(
        out,
        r#"<line x1="{tx:.2}" y1="{:.1}" x2="{tx:.2}" y2="{:.1}" stroke="red" stroke-width="1.5"/>"#,
        MARGIN_T,
        HEIGHT - MARGIN_B
    );
    out.push_str("</svg>\n");
    out
}

/// Trace of the chain with a vertical marker at the end of burn-in.
pub fn trace_svg(samples: &[f64], burn_in: usize, title: &str) -> String {
    let n = samples.len().max(2);
    let ymin = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let ymax = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (ymin, ymax) = if ymin < ymax {
        (ymin, ymax)
    } else {
        (ymin - 1.0, ymin + 1.0)
    };
    let pad = 0.05 * (ymax - ymin);
    let frame = Frame {
        x0: 1.0,
        x1: n as f64,
        y0: ymin - pad,
        y1: ymax + pad,
    };
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &frame, "iteration", "theta");
    let stride = samples.len().div_ceil(MAX_TRACE_POINTS).max(1);
    let mut path = String::new();
    for (i, (t, y)) in samples.iter().enumerate().step_by(stride).enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(path, "{cmd}{:.2},{:.2} ", frame.px((t + 1) as f64), frame.py(*y));
    }
    let _ = writeln!(
        out,
        r#"<path d="{}" stroke="black" stroke-width="0.6" fill="none"/>"#,
        path.trim_end()
    );
    let bx = frame.px(burn_in as f64);
    let _ = writeln!(
        out,
        r#"<line x1="{bx:.2}" y1="{:.1}" x2="{bx:.2}" y2="{:.1}" stroke="blue" stroke-width="1.5"/>"#,
        MARGIN_T,
        HEIGHT - MARGIN_B
    );
    out.push_str("</svg>\n");
    out
}

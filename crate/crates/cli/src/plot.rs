//! Scatter plot with a least-squares line, as a standalone SVG document.
//! Output depends only on the inputs, so plots can be diffed.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    if span > 0.0 {
        (lo - 0.05 * span, hi + 0.05 * span)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

fn fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

fn num(v: f64) -> String {
    format!("{v:.2}")
}

/// Renders `points` (already on the plotted scale) with axis labels and
/// the correlation in the title. Panics if `points` is empty.
pub fn scatter_svg(points: &[(f64, f64)], x_label: &str, y_label: &str, r: f64) -> String {
    assert!(!points.is_empty(), "nothing to plot");
    let (b0, b1) = fit(points);
    let (x0, x1) = range(points.iter().map(|p| p.0));
    let line_y = [b0 + b1 * x0, b0 + b1 * x1];
    let (y0, y1) = range(points.iter().map(|p| p.1).chain(line_y));
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, "<!-- isospec {} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let (ax, ay) = (LEFT, H - BOTTOM);
    let _ = writeln!(
        s,
        r#"<path d="M{ax} {} V{ay} H{}" stroke="black" fill="none"/>"#,
        TOP,
        W - RIGHT
    );
    let mut ticks = String::new();
    for i in 0..TICKS {
        let t = i as f64 / (TICKS - 1) as f64;
        let xv = x0 + t * (x1 - x0);
        let yv = y0 + t * (y1 - y0);
        let (tx, ty) = (px(xv), py(yv));
        let _ = write!(ticks, "M{tx:.2} {ay} v5 M{ax} {ty:.2} h-5 ");
        let _ = writeln!(s, r#"<text x="{tx:.2}" y="{}" text-anchor="middle">{}</text>"#, ay + 18.0, num(xv));
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, ax - 8.0, ty + 4.0, num(yv));
    }
    let _ = writeln!(s, r#"<path d="{}" stroke="black" fill="none"/>"#, ticks.trim_end());
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        H - 16.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(20 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (TOP + H - BOTTOM) / 2.0,
        escape(y_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">r = {r:.3} (n = {})</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        points.len()
    );
    let _ = writeln!(s, r#"<g fill="steelblue" fill-opacity="0.8">"#);
    for &(x, y) in points {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5"/>"#, px(x), py(y));
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="firebrick" stroke-width="1.5"/>"#,
        px(x0),
        py(line_y[0]),
        px(x1),
        py(line_y[1])
    );
    s.push_str("</svg>\n");
    s
}

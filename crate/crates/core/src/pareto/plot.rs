use std::fmt::Write;

use super::ParetoAnalysis;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Static SVG scatter of all points with the front, the smoothed curve and
/// the selected point highlighted. Both axes share one scale.
pub fn render_svg(analysis: &ParetoAnalysis, title: &str) -> String {
    let xs = analysis.points.iter().map(|p| p.accuracy);
    let ys = analysis.points.iter().map(|p| p.stability);
    let lo = xs.clone().chain(ys.clone()).fold(f64::INFINITY, f64::min);
    let hi = xs.chain(ys).fold(f64::NEG_INFINITY, f64::max);
    let pad = ((hi - lo) * 0.05).max(1e-9);
    let (lo, hi) = (lo - pad, hi + pad);
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let side = plot_w.min(plot_h);
    let sx = |v: f64| MARGIN + (v - lo) / (hi - lo) * side;
    let sy = |v: f64| MARGIN + side - (v - lo) / (hi - lo) * side;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        MARGIN / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{side}" height="{side}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let v = lo + (hi - lo) * f64::from(i) / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{v:.3}</text>"#,
            sx(v),
            MARGIN + side + 16.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.3}</text>"#,
            MARGIN - 6.0,
            sy(v) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">accuracy</text>"#,
        MARGIN + side / 2.0,
        MARGIN + side + 36.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">stability</text>"#,
        MARGIN + side / 2.0,
        MARGIN + side / 2.0
    );

    if analysis.curve.samples.len() >= 2 {
        let path: Vec<String> = analysis
            .curve
            .samples
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#,
            path.join(" ")
        );
    }
    for p in &analysis.points {
        let on_front = analysis.front.iter().any(|q| q.label == p.label);
        let selected = analysis.selection.point.label == p.label;
        let (fill, r) = match (selected, on_front) {
            (true, _) => ("crimson", 6.0),
            (false, true) => ("black", 4.0),
            _ => ("gray", 3.0),
        };
        let (x, y) = (sx(p.accuracy), sy(p.stability));
        let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{fill}"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" fill="{fill}">{}</text>"#,
            x + 6.0,
            y - 6.0,
            escape(&p.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

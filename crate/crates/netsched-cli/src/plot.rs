//! Minimal SVG line charts for cumulative-cost and norm curves.
//!
//! Static result plots only: fixed canvas, linear axes, one polyline
//! per series, extreme tick labels.  No external renderer.

use std::path::Path;

use anyhow::{Context, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 60.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Renders the series (shared x = sample index) into an SVG file.
pub fn line_chart(path: &Path, title: &str, y_label: &str, series: &[Vec<f64>]) -> Result<()> {
    let x_max = series.iter().map(Vec::len).max().unwrap_or(1).max(2) - 1;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &v in s {
            y_min = y_min.min(v);
            y_max = y_max.max(v);
        }
    }
    if !y_min.is_finite() || !y_max.is_finite() {
        (y_min, y_max) = (0.0, 1.0);
    }
    if (y_max - y_min).abs() < 1e-300 {
        y_max = y_min + 1.0;
    }

    let sx = |t: f64| MARGIN + t / x_max as f64 * (WIDTH - 2.0 * MARGIN);
    let sy = |v: f64| HEIGHT - MARGIN - (v - y_min) / (y_max - y_min) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"16\">{title}</text>\n",
        WIDTH / 2.0
    ));
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN,
    ));
    // Extreme tick labels.
    svg.push_str(&format!(
        "<text x=\"{m}\" y=\"{by}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\">0</text>\n\
         <text x=\"{r}\" y=\"{by}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\">{x_max}</text>\n\
         <text x=\"{lx}\" y=\"{b}\" text-anchor=\"end\" font-family=\"sans-serif\" \
         font-size=\"12\">{y_min:.3e}</text>\n\
         <text x=\"{lx}\" y=\"{ty}\" text-anchor=\"end\" font-family=\"sans-serif\" \
         font-size=\"12\">{y_max:.3e}</text>\n\
         <text x=\"20\" y=\"{mid}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\" transform=\"rotate(-90 20 {mid})\">{y_label}</text>\n\
         <text x=\"{cx}\" y=\"{bot}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\">t</text>\n",
        m = MARGIN,
        by = HEIGHT - MARGIN + 20.0,
        r = WIDTH - MARGIN,
        lx = MARGIN - 8.0,
        b = HEIGHT - MARGIN,
        ty = MARGIN + 4.0,
        mid = HEIGHT / 2.0,
        cx = WIDTH / 2.0,
        bot = HEIGHT - 20.0,
    ));
    for (idx, s) in series.iter().enumerate() {
        if s.is_empty() {
            continue;
        }
        let color = PALETTE[idx % PALETTE.len()];
        let points: Vec<String> = s
            .iter()
            .enumerate()
            .map(|(t, &v)| format!("{:.2},{:.2}", sx(t as f64), sy(v)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1\" \
             stroke-opacity=\"0.6\" points=\"{}\"/>\n",
            points.join(" ")
        ));
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg).with_context(|| format!("cannot write {}", path.display()))
}

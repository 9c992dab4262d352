//! Static SVG charts: delta heatmaps and metric-versus-share line charts.

use std::fmt::Write as _;

use crate::experiments::heatmap::HeatmapSweep;
use crate::experiments::sweep::FractionSweep;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 70.0;

/// Green for negative, red for positive, white at zero; intensity scales
/// with `value / max_abs`.
pub fn diverging_color(value: f64, max_abs: f64) -> String {
    let t = if max_abs > 0.0 {
        (value / max_abs).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    let fade = |s: f64| (255.0 * (1.0 - s)).round() as u8;
    let (r, g, b) = if t < 0.0 {
        (fade(-t), fade(-t * 0.45), fade(-t))
    } else {
        (255, fade(t), fade(t))
    };
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn axes(s: &mut String, x_label: &str, y_label: &str, x_range: (f64, f64), y_range: (f64, f64)) {
    let (x0, y0, x1, y1) = (MARGIN, H - MARGIN, W - MARGIN, MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" stroke="black" fill="none"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let x = x0 + f * (x1 - x0);
        let y = y0 - f * (y0 - y1);
        let xv = x_range.0 + f * (x_range.1 - x_range.0);
        let yv = y_range.0 + f * (y_range.1 - y_range.0);
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            y0 + 16.0,
            tick(xv)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            y + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        H - 24.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn tick(v: f64) -> String {
    if v.abs() >= 1e5 || (v != 0.0 && v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{}", (v * 100.0).round() / 100.0)
    }
}

/// Heatmap of a delta metric (`pick` selects TSE or TSFC change) over link 2
/// length (x) and free-flow speed (y).
pub fn heatmap_svg(
    sweep: &HeatmapSweep,
    title: &str,
    pick: impl Fn(&crate::experiments::heatmap::HeatmapPoint) -> f64,
) -> String {
    let mut s = open(title);
    let values: Vec<f64> = sweep.points.iter().map(&pick).collect();
    let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let nl = sweep.lengths.len();
    let nu = sweep.speeds.len();
    let cw = (W - 2.0 * MARGIN) / nl as f64;
    let ch = (H - 2.0 * MARGIN) / nu as f64;
    for i in 0..nl {
        for j in 0..nu {
            let v = values[i * nu + j];
            let x = MARGIN + i as f64 * cw;
            let y = H - MARGIN - (j + 1) as f64 * ch;
            let _ = writeln!(
                s,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                cw + 0.05,
                ch + 0.05,
                diverging_color(v, max_abs)
            );
        }
    }
    axes(
        &mut s,
        "link 2 length (mi)",
        "link 2 free-flow speed (mi/h)",
        (sweep.lengths[0], sweep.lengths[nl - 1]),
        (sweep.speeds[0], sweep.speeds[nu - 1]),
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="44" text-anchor="middle">color range +/- {}</text>"#,
        W / 2.0,
        tick(max_abs)
    );
    s.push_str("</svg>\n");
    s
}

/// Line chart of one metric against eco-routing share, one line per sweep.
pub fn fraction_chart_svg(
    sweeps: &[&FractionSweep],
    title: &str,
    y_label: &str,
    pick: impl Fn(&crate::experiments::sweep::FractionPoint) -> f64,
) -> String {
    let mut s = open(title);
    let all: Vec<f64> = sweeps
        .iter()
        .flat_map(|sw| sw.points.iter().map(&pick))
        .collect();
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo.is_finite() && hi > lo {
        (lo, hi)
    } else if lo.is_finite() {
        (lo - 1.0, lo + 1.0)
    } else {
        (0.0, 1.0)
    };
    let colors = ["#1b7837", "#c51b7d", "#2166ac"];
    for (k, sw) in sweeps.iter().enumerate() {
        let mut d = String::new();
        for (i, p) in sw.points.iter().enumerate() {
            let x = MARGIN + p.fraction * (W - 2.0 * MARGIN);
            let y = H - MARGIN - (pick(p) - lo) / (hi - lo) * (H - 2.0 * MARGIN);
            let _ = write!(d, "{}{x:.2} {y:.2} ", if i == 0 { "M" } else { "L" });
        }
        let color = colors[k % colors.len()];
        let _ = writeln!(
            s,
            r#"<path d="{}" stroke="{color}" stroke-width="2" fill="none"/>"#,
            d.trim_end()
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{} routing</text>"#,
            W - MARGIN - 110.0,
            MARGIN + 16.0 * (k as f64 + 1.0),
            sw.eco_class
        );
    }
    axes(
        &mut s,
        "eco-routing share of demand",
        y_label,
        (0.0, 1.0),
        (lo, hi),
    );
    s.push_str("</svg>\n");
    s
}

//! Self-contained SVG of MSE against `J`, one panel per `(K, M)`, log-scale MSE axis.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use coph_core::TrialStats;

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 280.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 48.0;
const LEGEND_H: f64 = 22.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders `rows` as an SVG document; identical rows give identical output.
pub fn render_svg(rows: &[TrialStats]) -> String {
    let mut panels: BTreeMap<(usize, usize), Vec<&TrialStats>> = BTreeMap::new();
    let mut schemes: Vec<&str> = Vec::new();
    for r in rows {
        panels.entry((r.bins, r.hashes)).or_default().push(r);
        if !schemes.contains(&r.scheme.as_str()) {
            schemes.push(&r.scheme);
        }
    }
    let n = panels.len().max(1) as f64;
    let width = n * (PANEL_W + MARGIN_L + MARGIN_R);
    let height = PANEL_H + MARGIN_T + MARGIN_B + LEGEND_H * schemes.len() as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, ((bins, hashes), pts)) in panels.iter().enumerate() {
        let x0 = i as f64 * (PANEL_W + MARGIN_L + MARGIN_R) + MARGIN_L;
        panel(&mut svg, x0, *bins, *hashes, pts, &schemes);
    }
    for (s, name) in schemes.iter().enumerate() {
        let y = PANEL_H + MARGIN_T + MARGIN_B + LEGEND_H * s as f64 + 6.0;
        let color = COLORS[s % COLORS.len()];
        let _ = writeln!(
            svg,
            r#"<line x1="{x1}" y1="{y}" x2="{x2}" y2="{y}" stroke="{color}" stroke-width="2"/><circle cx="{cx}" cy="{y}" r="3" fill="{color}"/><text x="{tx}" y="{ty}">{name}</text>"#,
            x1 = MARGIN_L,
            x2 = MARGIN_L + 30.0,
            cx = MARGIN_L + 15.0,
            tx = MARGIN_L + 38.0,
            ty = y + 4.0,
            name = escape(name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn panel(svg: &mut String, x0: f64, bins: usize, hashes: usize, pts: &[&TrialStats], schemes: &[&str]) {
    let positive: Vec<f64> = pts.iter().map(|r| r.mse).filter(|m| *m > 0.0).collect();
    let (lo, hi) = if positive.is_empty() {
        (-6.0, 0.0)
    } else {
        let lo = positive.iter().copied().fold(f64::INFINITY, f64::min).log10().floor();
        let hi = positive
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
            .log10()
            .ceil();
        (lo, if hi > lo { hi } else { lo + 1.0 })
    };
    let (jmin, jmax) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| {
        (a.min(r.j_true), b.max(r.j_true))
    });
    let (jmin, jmax) = if jmax > jmin {
        (jmin, jmax)
    } else {
        (jmin - 0.05, jmin + 0.05)
    };
    let px = |j: f64| x0 + (j - jmin) / (jmax - jmin) * PANEL_W;
    let py = |m: f64| {
        let v = if m > 0.0 { m.log10().clamp(lo, hi) } else { lo };
        MARGIN_T + (hi - v) / (hi - lo) * PANEL_H
    };
    let _ = writeln!(
        svg,
        r##"<rect x="{x0}" y="{MARGIN_T}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#444"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-weight="bold">K = {bins}, M = {hashes}</text>"#,
        x0 + PANEL_W / 2.0,
        MARGIN_T - 12.0
    );
    for decade in lo as i32..=hi as i32 {
        let y = py(10f64.powi(decade));
        let _ = writeln!(
            svg,
            r##"<line x1="{x0}" y1="{y}" x2="{}" y2="{y}" stroke="#ddd"/><text x="{}" y="{}" text-anchor="end">1e{decade}</text>"##,
            x0 + PANEL_W,
            x0 - 6.0,
            y + 4.0
        );
    }
    for t in 0..=4 {
        let j = jmin + (jmax - jmin) * t as f64 / 4.0;
        let x = px(j);
        let _ = writeln!(
            svg,
            r##"<line x1="{x}" y1="{b}" x2="{x}" y2="{tick}" stroke="#444"/><text x="{x}" y="{label}" text-anchor="middle">{j:.2}</text>"##,
            b = MARGIN_T + PANEL_H,
            tick = MARGIN_T + PANEL_H + 5.0,
            label = MARGIN_T + PANEL_H + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">J</text><text transform="translate({},{}) rotate(-90)" text-anchor="middle">MSE</text>"#,
        x0 + PANEL_W / 2.0,
        MARGIN_T + PANEL_H + 36.0,
        x0 - 48.0,
        MARGIN_T + PANEL_H / 2.0
    );
    for (s, name) in schemes.iter().enumerate() {
        let mut series: Vec<&&TrialStats> = pts.iter().filter(|r| r.scheme == *name).collect();
        if series.is_empty() {
            continue;
        }
        series.sort_by(|a, b| a.j_true.total_cmp(&b.j_true));
        let color = COLORS[s % COLORS.len()];
        let path: Vec<String> = series
            .iter()
            .map(|r| format!("{:.2},{:.2}", px(r.j_true), py(r.mse)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        );
        for r in series {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                px(r.j_true),
                py(r.mse)
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(scheme: &str, j: f64, mse: f64, bins: usize) -> TrialStats {
        TrialStats {
            scheme: scheme.into(),
            j_true: j,
            dim: 64,
            union: 24,
            bins,
            hashes: bins,
            n_trials: 10,
            mean: j,
            bias: 0.0,
            variance: mse,
            mse,
            std_error: 0.0,
        }
    }

    #[test]
    fn one_panel_per_bin_setting() {
        let rows = [
            row("reden", 0.2, 1e-3, 4),
            row("reden", 0.5, 2e-3, 4),
            row("coph<x>", 0.2, 5e-4, 8),
        ];
        let svg = render_svg(&rows);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("K = 4, M = 4") && svg.contains("K = 8, M = 8"));
        assert!(svg.contains("coph&lt;x&gt;"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg, render_svg(&rows));
    }

    #[test]
    fn zero_mse_is_drawn_on_the_floor() {
        let svg = render_svg(&[row("minhash", 1.0, 0.0, 4)]);
        assert!(svg.contains("<circle"));
    }
}

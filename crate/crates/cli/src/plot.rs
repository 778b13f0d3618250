//! Minimal SVG bar charts for the comparison output.

use std::fmt::Write as _;

pub struct Bar {
    pub name: String,
    pub values: [Option<f64>; 3],
}

const PANEL_W: f64 = 320.0;
const PANEL_H: f64 = 240.0;
const MARGIN: f64 = 40.0;
const COLORS: [&str; 7] = [
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// One panel per metric, one bar per series. Missing values leave a gap.
pub fn bar_panels(titles: &[&str; 3], bars: &[Bar]) -> String {
    let width = 3.0 * PANEL_W;
    let height = PANEL_H + 2.0 * MARGIN;
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    for (p, title) in titles.iter().enumerate() {
        let x0 = p as f64 * PANEL_W + MARGIN;
        let plot_w = PANEL_W - 1.5 * MARGIN;
        let max = bars.iter().filter_map(|b| b.values[p]).fold(0.0, f64::max);
        writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{title}</text>"#,
            x0 + plot_w / 2.0,
            MARGIN / 2.0
        )
        .unwrap();
        writeln!(
            svg,
            r##"<line x1="{x0}" y1="{y}" x2="{}" y2="{y}" stroke="#000"/>"##,
            x0 + plot_w,
            y = MARGIN + PANEL_H
        )
        .unwrap();
        let slot = plot_w / bars.len().max(1) as f64;
        for (i, bar) in bars.iter().enumerate() {
            let x = x0 + i as f64 * slot + slot * 0.1;
            if let Some(v) = bar.values[p] {
                let h = if max > 0.0 {
                    v / max * (PANEL_H - 20.0)
                } else {
                    0.0
                };
                writeln!(
                    svg,
                    r#"<rect x="{x:.1}" y="{:.1}" width="{:.1}" height="{h:.1}" fill="{}"><title>{} {v:.4}</title></rect>"#,
                    MARGIN + PANEL_H - h,
                    slot * 0.8,
                    COLORS[i % COLORS.len()],
                    bar.name
                )
                .unwrap();
            }
            writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" transform="rotate(45 {:.1} {:.1})">{}</text>"#,
                x,
                MARGIN + PANEL_H + 12.0,
                x,
                MARGIN + PANEL_H + 12.0,
                bar.name
            )
            .unwrap();
        }
    }
    svg.push_str("</svg>\n");
    svg
}

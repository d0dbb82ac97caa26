//! Standalone SVG figures: interval plots and power heatmaps.
//!
//! Output is plain text built with fixed two-decimal coordinates, so equal
//! inputs give byte-identical files. No external resources are referenced.
//!
//! Heatmap colour ramp (linear RGB interpolation between anchors):
//!
//! | power | colour    |
//! |-------|-----------|
//! | 0.0   | `#fff5f0` |
//! | 0.5   | `#fb6a4a` |
//! | 1.0   | `#67000d` |

use std::fmt::Write as _;
use std::path::Path;

use super::tables::write_file;
use crate::analysis::{quantile, IntervalTable, PowerSurface, ScoreGrid};
use crate::Result;

pub const RAMP: [(f64, [u8; 3]); 3] = [
    (0.0, [0xff, 0xf5, 0xf0]),
    (0.5, [0xfb, 0x6a, 0x4a]),
    (1.0, [0x67, 0x00, 0x0d]),
];

const PALETTE: [&str; 16] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#393b79", "#637939", "#8c6d31", "#843c39", "#7b4173", "#3182bd",
];

/// Colour for a power value in [0,1].
pub fn ramp_color(power: f64) -> [u8; 3] {
    let p = if power.is_nan() { 0.0 } else { power.clamp(0.0, 1.0) };
    let (a, b) = if p <= RAMP[1].0 {
        (RAMP[0], RAMP[1])
    } else {
        (RAMP[1], RAMP[2])
    };
    let t = (p - a.0) / (b.0 - a.0);
    std::array::from_fn(|c| (a.1[c] as f64 + t * (b.1[c] as f64 - a.1[c] as f64)).round() as u8)
}

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.left + x * self.width
    }
    fn py(&self, y: f64) -> f64 {
        self.top + self.height * (1.0 - (y - self.y_lo) / (self.y_hi - self.y_lo))
    }
}

fn header(out: &mut String, width: u32, height: u32) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#
    );
}

/// Interval plot: one band per function between the α/2 and 1 − α/2
/// quantiles across the R² grid, with the widest interpretable interval
/// drawn as a red horizontal segment.
pub fn interval_plot_svg(grid: &ScoreGrid, table: &IntervalTable) -> Result<String> {
    let alpha = table.alpha;
    let (mut y_lo, mut y_hi) = table.y_range;
    if y_hi - y_lo <= 0.0 {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    let pad = 0.04 * (y_hi - y_lo);
    let frame = Frame {
        left: 70.0,
        top: 40.0,
        width: 480.0,
        height: 400.0,
        y_lo: y_lo - pad,
        y_hi: y_hi + pad,
    };

    let mut out = String::new();
    header(&mut out, 760, 500);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{} (alpha = {})</text>"#,
        frame.px(0.5),
        escape(&grid.statistic.key()),
        alpha
    );
    axes(&mut out, &frame, "R² (property of interest)", "statistic value");

    for (f, id) in grid.functions.iter().enumerate() {
        let color = PALETTE[f % PALETTE.len()];
        let mut upper = Vec::with_capacity(grid.num_levels());
        let mut lower = Vec::with_capacity(grid.num_levels());
        for (l, &x) in grid.x_grid.iter().enumerate() {
            let cell = &grid.scores[f][l];
            upper.push((frame.px(x), frame.py(quantile(cell, 1.0 - alpha / 2.0)?)));
            lower.push((frame.px(x), frame.py(quantile(cell, alpha / 2.0)?)));
        }
        let points: Vec<String> = upper
            .iter()
            .chain(lower.iter().rev())
            .map(|(x, y)| format!("{x:.2},{y:.2}"))
            .collect();
        let _ = writeln!(
            out,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.35" stroke="{color}" stroke-width="1"><title>{}</title></polygon>"#,
            points.join(" "),
            escape(id)
        );
        let ly = 50.0 + 16.0 * f as f64;
        let _ = writeln!(
            out,
            r#"<rect x="575" y="{:.2}" width="12" height="10" fill="{color}" fill-opacity="0.6"/>"#,
            ly - 9.0
        );
        let _ = writeln!(out, r#"<text x="593" y="{ly:.2}">{}</text>"#, escape(id));
    }

    let widest = &table.interpretable[table.widest];
    let _ = writeln!(
        out,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="red" stroke-width="3"><title>widest interpretable interval [{}, {}] at y = {}</title></line>"#,
        frame.px(widest.interval.lo),
        frame.py(widest.y),
        frame.px(widest.interval.hi),
        frame.py(widest.y),
        widest.interval.lo,
        widest.interval.hi,
        widest.y
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}">worst-case width {:.3}, average width {:.3}</text>"#,
        frame.left,
        frame.top + frame.height + 45.0,
        table.worst_case_width,
        table.average_case_width
    );
    out.push_str("</svg>\n");
    Ok(out)
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let (l, t, w, h) = (frame.left, frame.top, frame.width, frame.height);
    let _ = writeln!(
        out,
        r#"<rect x="{l:.2}" y="{t:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let x = i as f64 / 4.0;
        let px = frame.px(x);
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            t + h,
            t + h + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{x:.2}</text>"#,
            t + h + 18.0
        );
    }
    for i in 0..=4 {
        let y = frame.y_lo + (frame.y_hi - frame.y_lo) * i as f64 / 4.0;
        let py = frame.py(y);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{l:.2}" y2="{py:.2}" stroke="black"/>"#,
            l - 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{y:.3}</text>"#,
            l - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        l + w / 2.0,
        t + h + 34.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        t + h / 2.0,
        t + h / 2.0,
        escape(y_label)
    );
}

/// Lower-triangular power heatmap: x₁ horizontal, x₀ vertical (increasing
/// upward), one cell per grid pair with x₁ ≥ x₀.
pub fn power_heatmap_svg(surface: &PowerSurface, title: &str) -> String {
    let m = surface.x_grid.len().max(1);
    let size = 400.0;
    let cell = size / m as f64;
    let (left, top) = (70.0, 40.0);

    let mut out = String::new();
    header(&mut out, 620, 500);
    let avg = surface.average_power().map_or("n/a".to_string(), |p| format!("{p:.3}"));
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{} (test level {}, average power {avg})</text>"#,
        left + size / 2.0,
        escape(title),
        surface.alpha
    );
    for (r, row) in surface.rows.iter().enumerate() {
        let y = top + size - (r + 1) as f64 * cell;
        let offset = surface.x_grid.iter().position(|&x| x == row.x0).unwrap_or(r);
        for (k, &(x1, p)) in row.power.iter().enumerate() {
            let x = left + (offset + k) as f64 * cell;
            let _ = writeln!(
                out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{cell:.2}" height="{cell:.2}" fill="{}"><title>x0={} x1={} power={}</title></rect>"#,
                hex(ramp_color(p)),
                row.x0,
                x1,
                p
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<rect x="{left:.2}" y="{top:.2}" width="{size:.2}" height="{size:.2}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let v = i as f64 / 4.0;
        let px = left + v * size;
        let py = top + size - v * size;
        let _ = writeln!(
            out,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{v:.2}</text>"#,
            top + size + 18.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"#,
            left - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">x1 (alternative R²)</text>"#,
        left + size / 2.0,
        top + size + 36.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">x0 (null R²)</text>"#,
        top + size / 2.0,
        top + size / 2.0
    );

    // legend
    let (lx, steps) = (510.0, 20);
    let step_h = 200.0 / steps as f64;
    for s in 0..steps {
        let p = (s as f64 + 0.5) / steps as f64;
        let y = top + 200.0 - (s + 1) as f64 * step_h;
        let _ = writeln!(
            out,
            r#"<rect x="{lx:.2}" y="{y:.2}" width="20.00" height="{step_h:.2}" fill="{}"/>"#,
            hex(ramp_color(p))
        );
    }
    for (v, label) in [(0.0, "0"), (0.5, "0.5"), (1.0, "1")] {
        let y = top + 200.0 - v * 200.0;
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{label}</text>"#, lx + 26.0, y + 4.0);
    }
    let _ = writeln!(out, r#"<text x="{lx:.2}" y="{:.2}">power</text>"#, top - 8.0);
    out.push_str("</svg>\n");
    out
}

pub fn render_interval_plot(grid: &ScoreGrid, table: &IntervalTable, out_svg: &Path) -> Result<()> {
    write_file(out_svg, &interval_plot_svg(grid, table)?)
}

pub fn render_power_heatmap(surface: &PowerSurface, title: &str, out_svg: &Path) -> Result<()> {
    write_file(out_svg, &power_heatmap_svg(surface, title))
}

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::ResultRow;
use crate::error::{Error, Result};

pub const ACCURACY_COLOR: &str = "#808080";
pub const SOFT_COLOR: &str = "#1f77b4";
pub const HARD_COLOR: &str = "#ff7f0e";

/// Pixel height of the value range [0, 1].
pub const PLOT_HEIGHT: f64 = 300.0;

const BAR_WIDTH: f64 = 16.0;
const GROUP_GAP: f64 = 20.0;
const LEFT: f64 = 60.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const RIGHT: f64 = 20.0;

pub fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Grouped bar chart with one group of three bars (accuracy, soft, hard)
/// per row. The only `rect` elements are the bars themselves.
pub fn render_svg(rows: &[ResultRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::invalid("nothing to plot"));
    }
    let group_w = 3.0 * BAR_WIDTH + GROUP_GAP;
    let width = LEFT + group_w * rows.len() as f64 + RIGHT;
    let height = TOP + PLOT_HEIGHT + BOTTOM;
    let base = TOP + PLOT_HEIGHT;
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="10">"#
    );

    // Legend.
    for (i, (label, color)) in [("Accuracy", ACCURACY_COLOR), ("Soft voting", SOFT_COLOR), ("Hard voting", HARD_COLOR)]
        .iter()
        .enumerate()
    {
        let x = LEFT + i as f64 * 110.0;
        let _ = writeln!(w, r#"<circle cx="{:.1}" cy="18" r="5" fill="{color}"/>"#, x + 5.0);
        let _ = writeln!(w, r#"<text x="{:.1}" y="22">{label}</text>"#, x + 14.0);
    }

    // Axis and ticks.
    let _ = writeln!(
        w,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{base}" stroke="black"/>"#
    );
    let _ = writeln!(
        w,
        r#"<line x1="{LEFT}" y1="{base}" x2="{:.1}" y2="{base}" stroke="black"/>"#,
        width - RIGHT
    );
    for t in 0..=5 {
        let v = t as f64 / 5.0;
        let y = base - v * PLOT_HEIGHT;
        let _ = writeln!(w, r#"<line x1="{:.1}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#, LEFT - 4.0);
        let _ = writeln!(
            w,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{v:.1}</text>"#,
            LEFT - 6.0,
            y + 3.0
        );
    }

    for (g, r) in rows.iter().enumerate() {
        let x0 = LEFT + GROUP_GAP / 2.0 + g as f64 * group_w;
        for (b, (value, color)) in [
            (r.accuracy, ACCURACY_COLOR),
            (r.soft_voting, SOFT_COLOR),
            (r.hard_voting, HARD_COLOR),
        ]
        .into_iter()
        .enumerate()
        {
            let v = value.clamp(0.0, 1.0);
            let h = v * PLOT_HEIGHT;
            let x = x0 + b as f64 * BAR_WIDTH;
            let _ = writeln!(
                w,
                r#"<rect x="{x:.2}" y="{:.2}" width="{BAR_WIDTH}" height="{h:.2}" fill="{color}"/>"#,
                base - h
            );
            let _ = writeln!(
                w,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="7">{value:.2}</text>"#,
                x + BAR_WIDTH / 2.0,
                base - h - 3.0
            );
        }
        let cx = x0 + 1.5 * BAR_WIDTH;
        let _ = writeln!(
            w,
            r#"<text x="{cx:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
            base + 14.0,
            xml_escape(&r.descriptor)
        );
        let _ = writeln!(
            w,
            r#"<text x="{cx:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
            base + 26.0,
            xml_escape(&r.classifier)
        );
        let _ = writeln!(
            w,
            r#"<text x="{cx:.2}" y="{:.1}" text-anchor="middle">n={}</text>"#,
            base + 38.0,
            r.samples
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_svg(path: impl AsRef<Path>, rows: &[ResultRow]) -> Result<()> {
    fs::write(path, render_svg(rows)?)?;
    Ok(())
}

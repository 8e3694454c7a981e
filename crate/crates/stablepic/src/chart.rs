//! Ext chart export: TSV rows and SVG drawings in `(t - s, s)` coordinates.

use std::fmt::Write;

use stablepic_core::resolution::{ExtChart, Resolution};

/// Header line followed by `s<TAB>t<TAB>dim` for every nonzero entry.
pub fn tsv(chart: &ExtChart) -> String {
    let mut out = String::from("s\tt\tdim\n");
    for (s, t, d) in chart.entries() {
        let _ = writeln!(out, "{s}\t{t}\t{d}");
    }
    out
}

/// Multiplications drawn on charts of the unit: `(class, t-degree, dotted)`.
const PRODUCT_LINES: [(&str, i32, bool); 3] = [("h10", 1, false), ("h11", 2, false), ("h12", 4, true)];

const UNIT: f64 = 28.0;
const MARGIN: f64 = 36.0;
const DOT_SPACING: f64 = 6.0;

/// A product line between basis dots: `((s, t, k), (s', t', k'), dotted)`.
pub type ProductLine = ((usize, i32, usize), (usize, i32, usize), bool);

/// Lines for multiplication by `h10`, `h11`, `h12` between basis classes of the window.
/// Resolutions of modules other than the unit carry no products and yield no lines.
pub fn product_lines(res: &Resolution) -> Vec<ProductLine> {
    let mut out = Vec::new();
    for (name, dt, dotted) in PRODUCT_LINES {
        let Ok(h) = res.named_class(name) else { continue };
        for s in 0..res.s_max() {
            for t in res.t_min()..=res.t_max() - dt {
                for k in 0..res.ext_dim(s, t) {
                    let Ok(x) = res.basis_class(s, t, k) else { continue };
                    let Ok(p) = res.yoneda_product(&h, &x) else { continue };
                    for j in p.coeffs.iter_ones() {
                        out.push(((s, t, k), (s + 1, t + dt, j), dotted));
                    }
                }
            }
        }
    }
    out
}

fn visible(chart: &ExtChart, s: usize, t: i32) -> bool {
    (chart.t_min..=chart.t_max).contains(&(t - s as i32))
}

fn position(chart: &ExtChart, s: usize, t: i32, k: usize) -> (f64, f64) {
    let n = chart.dim(s, t).max(1) as f64;
    let x = MARGIN + (t - s as i32 - chart.t_min) as f64 * UNIT + (k as f64 - (n - 1.0) / 2.0) * DOT_SPACING;
    let y = MARGIN + (chart.s_max - s) as f64 * UNIT;
    (x, y)
}

/// Draws one dot per basis class and the given product lines.
pub fn svg(chart: &ExtChart, lines: &[ProductLine]) -> String {
    let width_units = (chart.t_max - chart.t_min).max(1) as f64;
    let width = 2.0 * MARGIN + width_units * UNIT;
    let height = 2.0 * MARGIN + chart.s_max as f64 * UNIT;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(out, r#"<title>Ext over profile ({}) in (t-s, s) coordinates</title>"#, chart.profile);
    let _ = writeln!(out, r##"<g stroke="#ccc" stroke-width="0.5">"##);
    for s in 0..=chart.s_max {
        let y = MARGIN + (chart.s_max - s) as f64 * UNIT;
        let _ = writeln!(out, r#"<line x1="{MARGIN}" y1="{y}" x2="{}" y2="{y}"/>"#, width - MARGIN);
    }
    for u in 0..=(chart.t_max - chart.t_min) {
        let x = MARGIN + u as f64 * UNIT;
        let _ = writeln!(out, r#"<line x1="{x}" y1="{MARGIN}" x2="{x}" y2="{}"/>"#, height - MARGIN);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g font-family="sans-serif" font-size="9" text-anchor="middle">"#);
    for u in (0..=(chart.t_max - chart.t_min)).step_by(2) {
        let x = MARGIN + u as f64 * UNIT;
        let _ = writeln!(out, r#"<text x="{x}" y="{}">{}</text>"#, height - MARGIN + 14.0, u + chart.t_min);
    }
    for s in 0..=chart.s_max {
        let y = MARGIN + (chart.s_max - s) as f64 * UNIT + 3.0;
        let _ = writeln!(out, r#"<text x="{}" y="{y}">{s}</text>"#, MARGIN - 14.0);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r##"<g stroke="#000" stroke-width="1" fill="none">"##);
    for &((s, t, k), (s2, t2, k2), dotted) in lines {
        if !visible(chart, s, t) || !visible(chart, s2, t2) {
            continue;
        }
        let (x1, y1) = position(chart, s, t, k);
        let (x2, y2) = position(chart, s2, t2, k2);
        let dash = if dotted { r#" stroke-dasharray="2,2""# } else { "" };
        let _ = writeln!(out, r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"{dash}/>"#);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r##"<g fill="#000">"##);
    for (s, t, d) in chart.entries() {
        if !visible(chart, s, t) {
            continue;
        }
        for k in 0..d {
            let (x, y) = position(chart, s, t, k);
            let _ = writeln!(out, r#"<circle cx="{x}" cy="{y}" r="2.5"/>"#);
        }
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}

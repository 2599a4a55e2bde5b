//! Minimal SVG line plot of an MTF curve.

use std::fmt::Write as _;

use mtfedge_core::mtf::MtfCurve;

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 50.0;

pub fn mtf_plot(curve: &MtfCurve, mtf50: Option<f64>) -> String {
    let f_max = curve.frequencies().fold(0.5_f64, f64::max);
    let m_max = curve.modulations().fold(1.0_f64, f64::max);
    let x = |f: f64| MARGIN + f / f_max * (W - 2.0 * MARGIN);
    let y = |m: f64| H - MARGIN - m.max(0.0) / m_max * (H - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{x0:.1},{y1:.1} V{y0:.1} H{x1:.1}" fill="none" stroke="black"/>"#,
        x0 = x(0.0),
        x1 = x(f_max),
        y0 = y(0.0),
        y1 = y(m_max),
    );
    let _ = writeln!(
        s,
        r##"<line x1="{:.1}" y1="{y5:.1}" x2="{:.1}" y2="{y5:.1}" stroke="#999" stroke-dasharray="4 4"/>"##,
        x(0.0),
        x(f_max),
        y5 = y(0.5),
    );
    let pts: Vec<String> = curve
        .points
        .iter()
        .map(|p| format!("{:.1},{:.1}", x(p.frequency), y(p.modulation)))
        .collect();
    let _ = writeln!(
        s,
        r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="2"/>"##,
        pts.join(" ")
    );
    if let Some(f) = mtf50 {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.1}" cy="{:.1}" r="4" fill="#d62728"/>"##,
            x(f),
            y(0.5)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="12">MTF50 {f:.4}</text>"#,
            x(f) + 6.0,
            y(0.5) - 6.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">cycles/pixel</text>"#,
        W / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.1}" font-size="12" transform="rotate(-90 14 {:.1})" text-anchor="middle">modulation</text>"#,
        H / 2.0,
        H / 2.0
    );
    s.push_str("</svg>\n");
    s
}

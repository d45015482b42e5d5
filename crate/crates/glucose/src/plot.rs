//! Clarke error grid as a standalone SVG.

use std::fmt::Write as _;

use glucose_core::ega::ega_zone;
use glucose_core::metrics::mmol_to_mgdl;
use glucose_core::Zone;

const SIZE: f64 = 520.0;
const MARGIN: f64 = 50.0;
const MAX_MGDL: f64 = 400.0;

fn sx(v: f64) -> f64 {
    MARGIN + v.clamp(0.0, MAX_MGDL) / MAX_MGDL * (SIZE - 2.0 * MARGIN)
}

fn sy(v: f64) -> f64 {
    SIZE - sx(v)
}

fn colour(z: Zone) -> &'static str {
    match z {
        Zone::A => "#2b8a3e",
        Zone::B => "#1971c2",
        Zone::C => "#e67700",
        Zone::D => "#c2255c",
        Zone::E => "#862e9c",
    }
}

/// Zone boundary segments in mg/dL, (x0, y0, x1, y1).
const LINES: [(f64, f64, f64, f64); 13] = [
    (0.0, 0.0, 400.0, 400.0),
    (0.0, 70.0, 175.0 / 3.0, 70.0),
    (175.0 / 3.0, 70.0, 400.0 / 1.2, 400.0),
    (70.0, 84.0, 70.0, 400.0),
    (0.0, 180.0, 70.0, 180.0),
    (70.0, 180.0, 290.0, 400.0),
    (70.0, 0.0, 70.0, 56.0),
    (70.0, 56.0, 400.0, 320.0),
    (180.0, 70.0, 400.0, 70.0),
    (180.0, 0.0, 180.0, 70.0),
    (240.0, 70.0, 240.0, 180.0),
    (240.0, 180.0, 400.0, 180.0),
    (130.0, 0.0, 180.0, 70.0),
];

/// Renders (reference, estimate) pairs given in mmol/L. Pairs outside the
/// plotted range are clamped to its edge.
pub fn clarke_svg(title: &str, refs: &[f64], preds: &[f64]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        SIZE / 2.0,
        escape(title)
    );
    let (lo, hi) = (sx(0.0), sx(MAX_MGDL));
    let _ = writeln!(
        s,
        r#"<rect x="{lo}" y="{hi_y}" width="{w}" height="{w}" fill="none" stroke="black"/>"#,
        hi_y = sy(MAX_MGDL),
        w = hi - lo
    );
    for tick in (0..=400).step_by(100) {
        let t = f64::from(tick);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{tick}</text>"#,
            sx(t),
            sy(0.0) + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{tick}</text>"#,
            sx(0.0) - 6.0,
            sy(t) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">reference (mg/dL)</text>"#,
        SIZE / 2.0,
        SIZE - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{c}" text-anchor="middle" transform="rotate(-90 14 {c})">estimate (mg/dL)</text>"#,
        c = SIZE / 2.0
    );
    for (x0, y0, x1, y1) in LINES {
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1"/>"#,
            sx(x0),
            sy(y0),
            sx(x1),
            sy(y1)
        );
    }
    for (label, x, y) in [
        ("A", 360.0, 380.0),
        ("B", 380.0, 260.0),
        ("B", 260.0, 380.0),
        ("C", 140.0, 380.0),
        ("C", 160.0, 20.0),
        ("D", 30.0, 120.0),
        ("D", 380.0, 120.0),
        ("E", 30.0, 380.0),
        ("E", 380.0, 20.0),
    ] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="16">{label}</text>"#,
            sx(x),
            sy(y)
        );
    }
    for (&r, &p) in refs.iter().zip(preds) {
        let (rm, pm) = (mmol_to_mgdl(r), mmol_to_mgdl(p));
        let fill = ega_zone(rm, pm).map_or("gray", colour);
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{fill}" fill-opacity="0.7"/>"#,
            sx(rm),
            sy(pm)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

//! Minimal static SVG output: a labeled scatter plot and a line chart.

use std::fmt::Write;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 48.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn span(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x.0) / (self.x.1 - self.x.0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y.0) / (self.y.1 - self.y.0) * (H - 2.0 * PAD)
    }
}

fn header(out: &mut String, title: &str, desc: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, "<desc>{}</desc>", escape(desc));
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
}

/// Points colored by label; isolated vertices drawn as black crosses.
pub fn scatter(points: &[[f64; 2]], labels: &[usize], isolated: &[usize], title: &str, desc: &str) -> String {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let frame = Frame {
        x: span(x0, x1),
        y: span(y0, y1),
    };
    let mut iso = vec![false; points.len()];
    for &i in isolated {
        iso[i] = true;
    }
    let mut out = String::new();
    header(&mut out, title, desc);
    for (i, p) in points.iter().enumerate() {
        let (cx, cy) = (frame.px(p[0]), frame.py(p[1]));
        if iso[i] {
            let _ = writeln!(
                out,
                r#"<path d="M{:.2} {:.2}l6 6m0 -6l-6 6" stroke="black" stroke-width="1.2"/>"#,
                cx - 3.0,
                cy - 3.0
            );
        } else {
            let _ = writeln!(
                out,
                r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="2.5" fill="{}"/>"#,
                PALETTE[labels[i] % PALETTE.len()]
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// One polyline per series with markers, a legend and min/max axis labels.
pub fn line_chart(series: &[Series], title: &str, x_label: &str, y_label: &str, desc: &str) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let frame = Frame {
        x: span(x0, x1),
        y: span(y0.min(0.0), y1.max(1.0)),
    };
    let mut out = String::new();
    header(&mut out, title, desc);
    let (l, r, t, b) = (PAD, W - PAD, PAD, H - PAD);
    let _ = writeln!(
        out,
        r#"<path d="M{l} {t}V{b}H{r}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    let text = |out: &mut String, x: f64, y: f64, anchor: &str, s: &str| {
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{y:.1}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{}</text>"#,
            escape(s)
        );
    };
    text(&mut out, l, b + 16.0, "middle", &format!("{}", frame.x.0));
    text(&mut out, r, b + 16.0, "middle", &format!("{}", frame.x.1));
    text(&mut out, l - 6.0, b, "end", &format!("{}", frame.y.0));
    text(&mut out, l - 6.0, t + 4.0, "end", &format!("{}", frame.y.1));
    text(&mut out, W / 2.0, H - 10.0, "middle", x_label);
    text(&mut out, 14.0, H / 2.0, "middle", y_label);
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let d: Vec<String> = s
            .points
            .iter()
            .enumerate()
            .map(|(j, &(x, y))| {
                format!(
                    "{}{:.2} {:.2}",
                    if j == 0 { "M" } else { "L" },
                    frame.px(x),
                    frame.py(y)
                )
            })
            .collect();
        if !d.is_empty() {
            let _ = writeln!(
                out,
                r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                d.join("")
            );
        }
        for &(x, y) in &s.points {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                frame.px(x),
                frame.py(y)
            );
        }
        let ly = t + 14.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="{color}"/>"#,
            r - 120.0,
            ly - 9.0
        );
        text(&mut out, r - 104.0, ly, "start", &s.name);
    }
    out.push_str("</svg>\n");
    out
}

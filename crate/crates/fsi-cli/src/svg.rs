//! Standalone SVG line plots and heatmaps.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const ML: f64 = 70.0;
const MR: f64 = 20.0;
const MT: f64 = 40.0;
const MB: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            points,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-300 + 1e-12 * hi.abs().max(lo.abs()) {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Line plot; with `log_y` nonpositive values are dropped.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series], log_y: bool) -> String {
    let ty = |y: f64| if log_y { y.log10() } else { y };
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite() && (!log_y || *y > 0.0))
                .map(|&(x, y)| (x, ty(y)))
                .collect()
        })
        .collect();
    let (x0, x1) = range(pts.iter().flatten().map(|p| p.0));
    let (y0, y1) = range(pts.iter().flatten().map(|p| p.1));
    let px = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let py = |y: f64| H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(s, r#"<rect x="{ML}" y="{MT}" width="{}" height="{}" fill="none" stroke="black"/>"#, W - ML - MR, H - MT - MB);
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let ylab = if log_y { format!("1e{yv:.1}") } else { tick(yv) };
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, px(xv), H - MB + 16.0, tick(xv));
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, ML - 6.0, py(yv) + 4.0, ylab);
        let _ = writeln!(s, r##"<line x1="{ML}" x2="{}" y1="{:.1}" y2="{:.1}" stroke="#ddd"/>"##, W - MR, py(yv), py(yv));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (ML + W - MR) / 2.0, H - 12.0, escape(xlabel));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        (MT + H - MB) / 2.0,
        escape(ylabel)
    );
    for (k, (ser, p)) in series.iter().zip(&pts).enumerate() {
        let c = COLORS[k % COLORS.len()];
        if !p.is_empty() {
            let path: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
            if p.len() <= 60 {
                for &(x, y) in p {
                    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{c}"/>"#, px(x), py(y));
                }
            }
        }
        let ly = MT + 16.0 + 16.0 * k as f64;
        let _ = writeln!(s, r#"<line x1="{}" x2="{}" y1="{ly}" y2="{ly}" stroke="{c}" stroke-width="2"/>"#, W - MR - 150.0, W - MR - 130.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, W - MR - 125.0, ly + 4.0, escape(&ser.name));
    }
    s.push_str("</svg>\n");
    s
}

/// Cell heatmap, `values[j * nx + i]` with `j = 0` at the bottom.
pub fn heatmap(title: &str, nx: usize, nz: usize, values: &[f64], aspect: f64) -> String {
    let (lo, hi) = range(values.iter().copied());
    let pw = W - ML - MR - 60.0;
    let ph = (pw / aspect.max(1e-3)).min(H - MT - MB);
    let (cw, ch) = (pw / nx as f64, ph / nz as f64);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    for j in 0..nz {
        for i in 0..nx {
            let v = values.get(j * nx + i).copied().unwrap_or(f64::NAN);
            let f = if v.is_finite() { ((v - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                ML + i as f64 * cw,
                MT + ph - (j + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05,
                color(f)
            );
        }
    }
    let bx = ML + pw + 20.0;
    for k in 0..20 {
        let f = k as f64 / 19.0;
        let _ = writeln!(s, r#"<rect x="{bx}" y="{:.2}" width="16" height="{:.2}" fill="{}"/>"#, MT + ph - (k + 1) as f64 * ph / 20.0, ph / 20.0 + 0.05, color(f));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, bx + 20.0, MT + ph, tick(lo));
    let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, bx + 20.0, MT + 10.0, tick(hi));
    s.push_str("</svg>\n");
    s
}

/// Blue to yellow.
fn color(f: f64) -> String {
    let r = (68.0 + f * (253.0 - 68.0)) as u8;
    let g = (1.0 + f * (231.0 - 1.0)) as u8;
    let b = (84.0 + f * (37.0 - 84.0)) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_plot_is_standalone_svg() {
        let s = line_plot("a < b", "t", "E", &[Series::new("E", vec![(0.0, 1.0), (1.0, 0.5)])], false);
        assert!(s.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(s.trim_end().ends_with("</svg>"));
        assert!(s.contains("a &lt; b"));
        assert_eq!(s.matches("<polyline").count(), 1);
    }

    #[test]
    fn log_plot_drops_nonpositive_and_empty_is_fine() {
        let s = line_plot("k", "it", "r", &[Series::new("r", vec![(0.0, 0.0), (1.0, 1e-3)])], true);
        assert_eq!(s.matches("<circle").count(), 1);
        let e = line_plot("k", "it", "r", &[Series::new("r", vec![])], true);
        assert!(!e.contains("NaN"));
    }

    #[test]
    fn heatmap_has_one_rect_per_cell() {
        let s = heatmap("u", 3, 2, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], 1.5);
        // background + cells + colorbar
        assert_eq!(s.matches("<rect").count(), 1 + 6 + 20);
        assert!(!s.contains("NaN"));
    }
}

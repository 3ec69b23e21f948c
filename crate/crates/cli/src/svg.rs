//! Static SVG histograms and ECDF plots.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Frame {
    x0: f64,
    x1: f64,
    y1: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        LEFT + (v - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - v / self.y1 * (HEIGHT - TOP - BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Roughly five round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn axes(svg: &mut String, f: &Frame, title: &str, xlabel: &str, ylabel: &str) {
    let base = HEIGHT - BOTTOM;
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(
        svg,
        r#"<path d="M{LEFT},{TOP} V{base} H{}" fill="none" stroke="black"/>"#,
        WIDTH - RIGHT
    );
    for t in ticks(f.x0, f.x1) {
        let x = f.x(t);
        let _ = writeln!(svg, r#"<line x1="{x:.1}" y1="{base}" x2="{x:.1}" y2="{}" stroke="black"/>"#, base + 5.0);
        let _ = writeln!(svg, r#"<text x="{x:.1}" y="{}" text-anchor="middle">{}</text>"#, base + 18.0, fmt_tick(t));
    }
    for t in ticks(0.0, f.y1) {
        let y = f.y(t);
        let _ = writeln!(svg, r#"<line x1="{}" y1="{y:.1}" x2="{LEFT}" y2="{y:.1}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, LEFT - 8.0, y + 4.0, fmt_tick(t));
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 10.0, escape(xlabel));
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        HEIGHT / 2.0,
        escape(ylabel)
    );
}

fn fmt_tick(t: f64) -> String {
    let s = format!("{t:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Density-normalized histogram with `bins` equal bins.
pub fn histogram(values: &[f64], bins: usize, title: &str, xlabel: &str) -> String {
    let bins = bins.max(1);
    let (lo, hi) = range(values.iter().copied());
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let i = (((v - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let total = values.len().max(1) as f64;
    let density: Vec<f64> = counts.iter().map(|&c| c as f64 / (total * width)).collect();
    let top = density.iter().copied().fold(0.0, f64::max).max(1e-12) * 1.05;
    let f = Frame { x0: lo, x1: hi, y1: top };
    let mut svg = String::new();
    axes(&mut svg, &f, title, xlabel, "density");
    for (i, d) in density.iter().enumerate() {
        let (xa, xb) = (f.x(lo + i as f64 * width), f.x(lo + (i + 1) as f64 * width));
        let y = f.y(*d);
        let _ = writeln!(
            svg,
            r#"<rect x="{xa:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}" fill-opacity="0.7" stroke="white" stroke-width="0.5"/>"#,
            xb - xa,
            f.y(0.0) - y,
            COLORS[0]
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Overlaid empirical CDFs, one step curve per named series.
pub fn ecdf(series: &[(&str, &[f64])], title: &str, xlabel: &str) -> String {
    let (lo, hi) = range(series.iter().flat_map(|s| s.1.iter().copied()));
    let f = Frame { x0: lo, x1: hi, y1: 1.0 };
    let mut svg = String::new();
    axes(&mut svg, &f, title, xlabel, "F(x)");
    for (k, (name, values)) in series.iter().enumerate() {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len().max(1) as f64;
        let mut d = format!("M{:.2},{:.2}", f.x(lo), f.y(0.0));
        for (i, v) in sorted.iter().enumerate() {
            let _ = write!(d, " H{:.2} V{:.2}", f.x(*v), f.y((i + 1) as f64 / n));
        }
        let _ = write!(d, " H{:.2}", f.x(hi));
        let color = COLORS[k % COLORS.len()];
        let _ = writeln!(svg, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>"#);
        let ly = TOP + 16.0 * (k as f64 + 1.0);
        let _ = writeln!(
            svg,
            r#"<line x1="{0}" y1="{ly}" x2="{1}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{2}" y="{3}">{4}</text>"#,
            LEFT + 10.0,
            LEFT + 30.0,
            LEFT + 36.0,
            ly + 4.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_values() {
        assert_eq!(ticks(0.0, 1.0), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(fmt_tick(0.6000000000000001), "0.6");
        assert_eq!(fmt_tick(-0.0), "0");
    }

    #[test]
    fn well_formed() {
        let h = histogram(&[1.0, 2.0, 2.5, 3.0], 3, "a < b", "x");
        assert!(h.starts_with("<svg") && h.trim_end().ends_with("</svg>"));
        assert_eq!(h.matches("<rect").count(), 4);
        assert!(h.contains("a &lt; b"));
        let e = ecdf(&[("one", &[0.0, 1.0]), ("two", &[0.5])], "t", "x");
        assert_eq!(e.matches("stroke-width=\"1.5\"").count(), 2);
        let empty = histogram(&[], 4, "t", "x");
        assert!(empty.contains("</svg>"));
    }
}

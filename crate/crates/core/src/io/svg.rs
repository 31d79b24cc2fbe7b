//! Minimal line plots emitted as SVG markup.

use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    pub dashed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Circles drawn on top of the series.
    pub markers: Vec<(f64, f64)>,
    /// Written to `<metadata>` and as a visible caption.
    pub scenario_hash: String,
}

const W: f64 = 800.0;
const H: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 70.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn label(v: f64) -> String {
    if v == 0.0 || (1e-3..1e4).contains(&v.abs()) {
        format!("{v:.4}")
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    } else {
        format!("{v:.3e}")
    }
}

pub fn render(plot: &Plot) -> String {
    let all = plot
        .series
        .iter()
        .flat_map(|s| s.points.iter())
        .chain(&plot.markers);
    let (x0, x1) = bounds(all.clone().map(|p| p.0));
    let (mut y0, y1) = bounds(all.map(|p| p.1));
    if y0 > 0.0 {
        y0 = 0.0;
    }
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        "<metadata>scenario-sha256:{}</metadata>",
        plot.scenario_hash
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        W / 2.0,
        escape(&plot.title)
    );
    // axes
    let _ = writeln!(
        out,
        r#"<path d="M{LEFT},{TOP} V{} H{}" fill="none" stroke="black"/>"#,
        TOP + ph,
        LEFT + pw
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            label(xv)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            label(yv)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        H - 32.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&plot.y_label)
    );

    for (k, s) in plot.series.iter().enumerate() {
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let dash = if s.dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            out,
            r#"<polyline class="series" fill="none" stroke="{}" stroke-width="1.2"{dash} points="{}"/>"#,
            s.color,
            pts.join(" ")
        );
        let ly = TOP + 14.0 + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}"{dash}/><text x="{}" y="{}">{}</text>"#,
            W - RIGHT - 180.0,
            W - RIGHT - 150.0,
            s.color,
            W - RIGHT - 145.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    for &(x, y) in plot
        .markers
        .iter()
        .filter(|p| p.0.is_finite() && p.1.is_finite())
    {
        let _ = writeln!(
            out,
            r#"<circle class="peak" cx="{:.2}" cy="{:.2}" r="4" fill="none" stroke="crimson" stroke-width="1.5"/>"#,
            sx(x),
            sy(y)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{LEFT}" y="{}" font-size="10" fill="gray">scenario sha256 {}</text>"#,
        H - 8.0,
        plot.scenario_hash
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embeds_hash_and_markers() {
        let plot = Plot {
            title: "a < b".into(),
            x_label: "t".into(),
            y_label: "I".into(),
            series: vec![Series {
                label: "I".into(),
                points: vec![(0.0, 0.0), (1.0, 2.0), (2.0, f64::NAN)],
                color: "black",
                dashed: false,
            }],
            markers: vec![(1.0, 2.0)],
            scenario_hash: "abc123".into(),
        };
        let svg = render(&plot);
        assert!(svg.contains("<metadata>scenario-sha256:abc123</metadata>"));
        assert_eq!(svg.matches(r#"class="peak""#).count(), 1);
        assert!(svg.contains("a &lt; b"));
        assert!(!svg.contains("NaN"));
    }
}

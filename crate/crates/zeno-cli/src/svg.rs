//! Minimal deterministic SVG line plots: axes, ticks, polyline per series,
//! legend. Every figure is regenerable from its CSV; element order follows
//! series order so re-runs are byte-identical.

use std::fmt::Write as _;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 46.0;
const MARGIN_BOTTOM: f64 = 64.0;

const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

impl Figure {
    pub fn render(&self) -> String {
        let (x_min, x_max) = self.axis_range(|p| p.0, self.log_x);
        let (y_min, y_max) = self.axis_range(|p| p.1, self.log_y);
        let to_x = |v: f64| {
            let t = normalized(v, x_min, x_max, self.log_x);
            MARGIN_LEFT + t * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
        };
        let to_y = |v: f64| {
            let t = normalized(v, y_min, y_max, self.log_y);
            HEIGHT - MARGIN_BOTTOM - t * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
        };

        let mut svg = String::new();
        let _ = write!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = write!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = write!(
            svg,
            r#"<text x="{:.2}" y="24" font-family="monospace" font-size="16" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );

        // Frame.
        let _ = write!(
            svg,
            r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
            HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
        );

        // Ticks and labels.
        for tick in ticks(x_min, x_max, self.log_x) {
            let x = to_x(tick);
            let y0 = HEIGHT - MARGIN_BOTTOM;
            let _ = write!(svg, r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 6.0);
            let _ = write!(
                svg,
                r#"<text x="{x:.2}" y="{:.2}" font-family="monospace" font-size="12" text-anchor="middle">{}</text>"#,
                y0 + 22.0,
                tick_label(tick)
            );
        }
        for tick in ticks(y_min, y_max, self.log_y) {
            let y = to_y(tick);
            let _ = write!(svg, r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}" stroke="black"/>"#, MARGIN_LEFT - 6.0);
            let _ = write!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12" text-anchor="end">{}</text>"#,
                MARGIN_LEFT - 10.0,
                y + 4.0,
                tick_label(tick)
            );
        }
        let _ = write!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="14" text-anchor="middle">{}</text>"#,
            (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
            HEIGHT - 16.0,
            escape(&self.x_label)
        );
        let _ = write!(
            svg,
            r#"<text x="20" y="{:.2}" font-family="monospace" font-size="14" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
            (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
            (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
            escape(&self.y_label)
        );

        // Curves.
        for (i, series) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let mut path = String::new();
            for (k, &(x, y)) in series.points.iter().enumerate() {
                let cmd = if k == 0 { 'M' } else { 'L' };
                let _ = write!(path, "{cmd}{:.2} {:.2}", to_x(x), to_y(y));
            }
            let _ = write!(
                svg,
                r#"<path d="{path}" fill="none" stroke="{color}" stroke-width="1.8"/>"#
            );
            for &(x, y) in &series.points {
                let _ = write!(
                    svg,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.6" fill="{color}"/>"#,
                    to_x(x),
                    to_y(y)
                );
            }
        }

        // Legend.
        for (i, series) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let y = MARGIN_TOP + 16.0 + 18.0 * i as f64;
            let x = MARGIN_LEFT + 14.0;
            let _ = write!(svg, r#"<rect x="{x:.2}" y="{:.2}" width="12" height="12" fill="{color}"/>"#, y - 10.0);
            let _ = write!(
                svg,
                r#"<text x="{:.2}" y="{y:.2}" font-family="monospace" font-size="12">{}</text>"#,
                x + 18.0,
                escape(&series.label)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }

    fn axis_range(&self, pick: impl Fn(&(f64, f64)) -> f64, log: bool) -> (f64, f64) {
        let values: Vec<f64> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(&pick))
            .filter(|v| !log || *v > 0.0)
            .collect();
        assert!(!values.is_empty(), "figure has no plottable points");
        let mut min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let mut max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if min == max {
            min -= 0.5;
            max += 0.5;
        }
        if log {
            (min, max)
        } else {
            let pad = 0.05 * (max - min);
            (min - pad, max + pad)
        }
    }
}

fn normalized(v: f64, min: f64, max: f64, log: bool) -> f64 {
    if log {
        (v.ln() - min.ln()) / (max.ln() - min.ln())
    } else {
        (v - min) / (max - min)
    }
}

fn ticks(min: f64, max: f64, log: bool) -> Vec<f64> {
    if log {
        // Decade ticks, thinned to at most 8.
        let lo = min.log10().floor() as i32;
        let hi = max.log10().ceil() as i32;
        let mut out: Vec<f64> = (lo..=hi)
            .map(|e| 10f64.powi(e))
            .filter(|&v| v >= min * 0.999 && v <= max * 1.001)
            .collect();
        if out.len() < 2 {
            out = vec![min, max];
        }
        out
    } else {
        let span = max - min;
        let raw_step = span / 5.0;
        let mag = 10f64.powf(raw_step.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|&s| span / s <= 6.0)
            .unwrap_or(mag * 10.0);
        let first = (min / step).ceil() * step;
        let mut out = Vec::new();
        let mut v = first;
        while v <= max + step * 1e-9 {
            out.push(v);
            v += step;
        }
        out
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let abs = v.abs();
    if (1e-3..1e4).contains(&abs) {
        let s = format!("{v:.4}");
        let trimmed = s.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    } else {
        format!("{v:.1e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

//! Minimal deterministic SVG line charts.
//!
//! The output is a pure function of the input series: fixed layout, fixed
//! palette, fixed-precision coordinates. Each data series is exactly one
//! `<polyline>` element, so files are easy to assert against in tests.

/// One line on a chart.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// One coordinate frame with its own axes, titles, and legend.
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Log-10 transform both axes (every point must be positive).
    pub log_log: bool,
    pub series: Vec<Series>,
}

const PANEL_W: f64 = 470.0;
const PANEL_H: f64 = 360.0;
const MARGIN_L: f64 = 66.0;
const MARGIN_R: f64 = 18.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 48.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            other => out.push(other),
        }
    }
    out
}

/// Smallest decimal count in 0..=9 that prints `v` distinguishably from its
/// neighbours `step` apart, so tick labels never collide or lie.
fn format_tick(v: f64, step: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let magnitude = v.abs();
    if !(0.001..1e6).contains(&magnitude) {
        return format!("{v:e}");
    }
    for decimals in 0..=9usize {
        let text = format!("{v:.decimals$}");
        let back: f64 = text.parse().expect("fixed-point format round-trips");
        if (back - v).abs() <= step * 1e-9 + magnitude * 1e-12 {
            return text;
        }
    }
    format!("{v:.9}")
}

/// Tick positions for a linear axis: multiples of a 1/2/2.5/5 step.
fn linear_ticks(lo: f64, hi: f64) -> (Vec<f64>, f64) {
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let raw = span / 4.5;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .expect("the candidate list ends above raw");
    let first = (lo / step).ceil();
    let mut ticks = Vec::new();
    let mut k = first;
    while k * step <= hi + 1e-9 * span {
        ticks.push(k * step);
        k += 1.0;
    }
    (ticks, step)
}

/// Tick positions for a log axis: 1/2/5 within each covered decade.
fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let mut ticks = Vec::new();
    let k_lo = lo.log10().floor() as i32;
    let k_hi = hi.log10().ceil() as i32;
    for k in k_lo..=k_hi {
        for m in [1.0, 2.0, 5.0] {
            let v = m * 10f64.powi(k);
            if v >= lo * (1.0 - 1e-12) && v <= hi * (1.0 + 1e-12) {
                ticks.push(v);
            }
        }
    }
    ticks
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn from_values(values: impl Iterator<Item = f64>, log: bool) -> Axis {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            if v.is_finite() && (!log || v > 0.0) {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if !lo.is_finite() || !hi.is_finite() {
            // Empty or fully degenerate data: draw a unit frame.
            return Axis {
                lo: if log { 0.1 } else { 0.0 },
                hi: 1.0,
                log,
            };
        }
        if log {
            let pad = (hi / lo).max(1.001).powf(0.06);
            Axis {
                lo: lo / pad,
                hi: hi * pad,
                log,
            }
        } else {
            let span = (hi - lo).max(hi.abs().max(1.0) * 1e-3);
            Axis {
                lo: lo - 0.05 * span,
                hi: hi + 0.05 * span,
                log,
            }
        }
    }

    fn fraction(&self, v: f64) -> f64 {
        if self.log {
            (v.log10() - self.lo.log10()) / (self.hi.log10() - self.lo.log10())
        } else {
            (v - self.lo) / (self.hi - self.lo)
        }
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            log_ticks(self.lo, self.hi)
                .into_iter()
                .map(|v| (v, format_tick(v, v * 0.01)))
                .collect()
        } else {
            let (ticks, step) = linear_ticks(self.lo, self.hi);
            ticks
                .into_iter()
                .map(|v| (v, format_tick(v, step)))
                .collect()
        }
    }
}

fn render_panel(out: &mut String, panel: &Panel, x_offset: f64) {
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let x_axis = Axis::from_values(
        panel.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)),
        panel.log_log,
    );
    let y_axis = Axis::from_values(
        panel.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)),
        panel.log_log,
    );
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            MARGIN_L + x_axis.fraction(x) * plot_w,
            MARGIN_T + (1.0 - y_axis.fraction(y)) * plot_h,
        )
    };

    out.push_str(&format!("<g transform=\"translate({x_offset:.1},0)\">\n"));
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\" font-weight=\"bold\">{}</text>\n",
        MARGIN_L + plot_w / 2.0,
        escape(&panel.title)
    ));

    // Grid lines and tick labels.
    for (v, label) in x_axis.ticks() {
        let (px, _) = to_px(v, y_axis.lo);
        out.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            MARGIN_T,
            MARGIN_T + plot_h
        ));
        out.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
            MARGIN_T + plot_h + 16.0,
            escape(&label)
        ));
    }
    for (v, label) in y_axis.ticks() {
        let (_, py) = to_px(x_axis.lo, v);
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            MARGIN_L,
            MARGIN_L + plot_w
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n",
            MARGIN_L - 6.0,
            py + 4.0,
            escape(&label)
        ));
    }

    // Axis frame.
    out.push_str(&format!(
        "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{plot_w:.1}\" height=\"{plot_h:.1}\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
        MARGIN_L, MARGIN_T
    ));
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
        MARGIN_L + plot_w / 2.0,
        PANEL_H - 10.0,
        escape(&panel.x_label)
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 {:.1})\">{}</text>\n",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0,
        escape(&panel.y_label)
    ));

    // Data series.
    for (idx, series) in panel.series.iter().enumerate() {
        let colour = PALETTE[idx % PALETTE.len()];
        let mut coords = String::new();
        for &(x, y) in &series.points {
            if panel.log_log && (x <= 0.0 || y <= 0.0) {
                continue;
            }
            let (px, py) = to_px(x, y);
            coords.push_str(&format!("{px:.2},{py:.2} "));
        }
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.8\"/>\n",
            coords.trim_end()
        ));
    }

    // Legend, top-left inside the plot area.
    for (idx, series) in panel.series.iter().enumerate() {
        let colour = PALETTE[idx % PALETTE.len()];
        let y = MARGIN_T + 14.0 + 16.0 * idx as f64;
        out.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"{colour}\" stroke-width=\"2.5\"/>\n",
            MARGIN_L + 8.0,
            MARGIN_L + 30.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\">{}</text>\n",
            MARGIN_L + 35.0,
            y + 4.0,
            escape(&series.label)
        ));
    }
    out.push_str("</g>\n");
}

/// Render the panels side by side into one standalone SVG document.
pub fn render(panels: &[Panel]) -> String {
    let width = PANEL_W * panels.len() as f64;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{PANEL_H:.0}\" viewBox=\"0 0 {width:.0} {PANEL_H:.0}\" font-family=\"sans-serif\">\n"
    ));
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{width:.0}\" height=\"{PANEL_H:.0}\" fill=\"#ffffff\"/>\n"
    ));
    for (idx, panel) in panels.iter().enumerate() {
        render_panel(&mut out, panel, PANEL_W * idx as f64);
    }
    out.push_str("</svg>\n");
    out
}

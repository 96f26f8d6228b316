//! Static SVG rendering of a scan curve. Hand-rolled markup: one plot,
//! axes with ticks, a polyline per series, no interactivity.

use std::fmt::Write as _;

use clap::ValueEnum;
use hom_core::clicksim::ScanPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Series {
    /// Coincidence rate with binomial error bars.
    Coincidences,
    /// Both singles rates.
    Singles,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 78.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 46.0;
const BOTTOM: f64 = 58.0;

struct Frame {
    x0: f64,
    x1: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: (f64, f64), y_max: f64) -> Self {
        let (mut x0, mut x1) = xs;
        if x0 == x1 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        Self { x0, x1, y1: if y_max > 0.0 { y_max * 1.08 } else { 1.0 } }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - y / self.y1 * (HEIGHT - TOP - BOTTOM)
    }
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.into()
    }
}

fn polyline(svg: &mut String, frame: &Frame, pts: &[(f64, f64)], color: &str) {
    let mut path = String::new();
    for (x, y) in pts {
        let _ = write!(path, "{:.2},{:.2} ", frame.px(*x), frame.py(*y));
    }
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
        path.trim_end()
    );
    for (x, y) in pts {
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.2" fill="{color}"/>"#,
            frame.px(*x),
            frame.py(*y)
        );
    }
}

/// Renders the scan as self-contained SVG text.
pub fn render_svg(
    points: &[ScanPoint],
    series: Series,
    title: &str,
    summary: Option<(f64, f64)>,
) -> Result<String, String> {
    if points.is_empty() {
        return Err("nothing to plot: the scan holds no points".into());
    }
    let mut sorted: Vec<&ScanPoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.delta_l_um.partial_cmp(&b.delta_l_um).unwrap());

    let trials = |p: &ScanPoint| p.trials.max(1) as f64;
    let curves: Vec<(Vec<(f64, f64)>, &str, &str)> = match series {
        Series::Coincidences => {
            vec![(
                sorted.iter().map(|p| (p.delta_l_um, p.rate)).collect(),
                "#1f77b4",
                "coincidence rate",
            )]
        }
        Series::Singles => vec![
            (
                sorted.iter().map(|p| (p.delta_l_um, p.singles_d1 as f64 / trials(p))).collect(),
                "#1f77b4",
                "D1 singles rate",
            ),
            (
                sorted.iter().map(|p| (p.delta_l_um, p.singles_d2 as f64 / trials(p))).collect(),
                "#d62728",
                "D2 singles rate",
            ),
        ],
    };

    let x_min = sorted.first().unwrap().delta_l_um;
    let x_max = sorted.last().unwrap().delta_l_um;
    let mut y_max = curves
        .iter()
        .flat_map(|(c, _, _)| c.iter().map(|&(_, y)| y))
        .fold(0.0f64, f64::max);
    if series == Series::Coincidences {
        y_max = y_max.max(
            sorted.iter().map(|p| p.rate + p.rate_stderr).fold(0.0f64, f64::max),
        );
    }
    let frame = Frame::new((x_min, x_max), y_max);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="monospace" font-size="13">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="26" text-anchor="middle" font-size="16">{title}</text>"#,
        WIDTH / 2.0
    );

    // Axes.
    let (ax_y, ax_x0, ax_x1) = (HEIGHT - BOTTOM, LEFT, WIDTH - RIGHT);
    let _ = writeln!(
        svg,
        r#"<line x1="{ax_x0}" y1="{ax_y}" x2="{ax_x1}" y2="{ax_y}" stroke="black"/>"#
    );
    let _ = writeln!(svg, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{ax_y}" stroke="black"/>"#);

    for k in 0..=4 {
        let x = frame.x0 + (frame.x1 - frame.x0) * k as f64 / 4.0;
        let px = frame.px(x);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{ax_y}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            ax_y + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            ax_y + 20.0,
            tick_label(x)
        );
        let y = frame.y1 * k as f64 / 4.0;
        let py = frame.py(y);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/>"#,
            LEFT - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 9.0,
            py + 4.0,
            tick_label(y)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">delay offset (um)</text>"#,
        (LEFT + ax_x1) / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">rate per trial</text>"#,
        (TOP + ax_y) / 2.0,
        (TOP + ax_y) / 2.0
    );

    if series == Series::Coincidences {
        for p in &sorted {
            let px = frame.px(p.delta_l_um);
            let lo = frame.py((p.rate - p.rate_stderr).max(0.0));
            let hi = frame.py(p.rate + p.rate_stderr);
            let _ = writeln!(
                svg,
                r##"<line x1="{px:.2}" y1="{lo:.2}" x2="{px:.2}" y2="{hi:.2}" stroke="#1f77b4" stroke-width="1"/>"##
            );
        }
    }
    for (curve, color, label) in &curves {
        polyline(&mut svg, &frame, curve, color);
        let _ = label;
    }
    if series == Series::Singles {
        for (k, (_, color, label)) in curves.iter().enumerate() {
            let y = TOP + 16.0 * k as f64;
            let _ = writeln!(
                svg,
                r#"<rect x="{:.1}" y="{y:.1}" width="14" height="4" fill="{color}"/><text x="{:.1}" y="{:.1}">{label}</text>"#,
                ax_x1 - 170.0,
                ax_x1 - 150.0,
                y + 6.0
            );
        }
    }
    if let Some((v, s)) = summary {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">V = {v:.4} +/- {s:.4}</text>"#,
            ax_x1 - 4.0,
            TOP - 6.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

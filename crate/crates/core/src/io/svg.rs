//! Standalone SVG line/marker plots. Output depends only on the input
//! values, so identical calls produce identical bytes.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::harness::{Mode, Trajectory};

const PANEL_W: f64 = 520.0;
const PANEL_H: f64 = 360.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 18.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 48.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Line,
    Markers,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub kind: SeriesKind,
    /// Index into the palette; series sharing a color read as one family.
    pub color: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
}

struct Axis {
    lo: f64,
    hi: f64,
    ticks: Vec<f64>,
    log: bool,
}

impl Axis {
    fn linear(lo: f64, hi: f64) -> Self {
        let (lo, hi) = if hi > lo {
            (lo, hi)
        } else {
            let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
            (lo - pad, hi + pad)
        };
        let raw = (hi - lo) / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 2.5, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| *s >= raw)
            .unwrap_or(10.0 * mag);
        let lo = (lo / step).floor() * step;
        let hi = (hi / step).ceil() * step;
        let n = ((hi - lo) / step).round() as usize;
        let ticks = (0..=n).map(|i| lo + i as f64 * step).collect();
        Self {
            lo,
            hi,
            ticks,
            log: false,
        }
    }

    fn log(lo: f64, hi: f64) -> Self {
        let lo = lo.log10().floor();
        let mut hi = hi.log10().ceil();
        if hi <= lo {
            hi = lo + 1.0;
        }
        let ticks = (lo as i32..=hi as i32).map(f64::from).collect();
        Self {
            lo,
            hi,
            ticks,
            log: true,
        }
    }

    fn value(&self, v: f64) -> Option<f64> {
        if self.log {
            (v > 0.0 && v.is_finite()).then(|| v.log10())
        } else {
            v.is_finite().then_some(v)
        }
    }

    fn frac(&self, v: f64) -> Option<f64> {
        self.value(v).map(|u| (u - self.lo) / (self.hi - self.lo))
    }

    fn tick_label(&self, t: f64) -> String {
        if self.log {
            format!("1e{}", t as i32)
        } else {
            short_number(t)
        }
    }
}

fn short_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn data_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

fn render_panel(out: &mut String, panel: &Panel, ox: f64, oy: f64) {
    let pw = PANEL_W - MARGIN_L - MARGIN_R;
    let ph = PANEL_H - MARGIN_T - MARGIN_B;
    let (x0, y0) = (ox + MARGIN_L, oy + MARGIN_T);
    let all = || panel.series.iter().flat_map(|s| s.points.iter().copied());
    let xs = data_range(all().map(|p| p.0).filter(|v| v.is_finite())).unwrap_or((0.0, 1.0));
    let y_ok = |v: f64| {
        if panel.log_y {
            v > 0.0 && v.is_finite()
        } else {
            v.is_finite()
        }
    };
    let ys = data_range(all().map(|p| p.1).filter(|v| y_ok(*v)));
    let x_axis = Axis::linear(xs.0, xs.1);
    let y_axis = match (panel.log_y, ys) {
        (true, Some((lo, hi))) => Axis::log(lo, hi),
        (true, None) => Axis::log(0.1, 1.0),
        (false, Some((lo, hi))) => Axis::linear(lo, hi),
        (false, None) => Axis::linear(0.0, 1.0),
    };
    let px = |x: f64| x_axis.frac(x).map(|f| x0 + f * pw);
    let py = |y: f64| y_axis.frac(y).map(|f| y0 + ph - f * ph);

    let _ = writeln!(
        out,
        r##"<rect x="{x0:.2}" y="{y0:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="#333"/>"##
    );
    for &t in &x_axis.ticks {
        let x = x0 + (t - x_axis.lo) / (x_axis.hi - x_axis.lo) * pw;
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            y0 + ph,
            y0 + ph + 5.0,
            y0 + ph + 18.0,
            x_axis.tick_label(t)
        );
    }
    for &t in &y_axis.ticks {
        let y = y0 + ph - (t - y_axis.lo) / (y_axis.hi - y_axis.lo) * ph;
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="#333"/><line x1="{x0:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            x0 - 5.0,
            x0 + pw,
            x0 - 8.0,
            y + 4.0,
            y_axis.tick_label(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"#,
        x0 + pw / 2.0,
        oy + 22.0,
        escape(&panel.title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        x0 + pw / 2.0,
        y0 + ph + 36.0,
        escape(&panel.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate({:.2},{:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        ox + 16.0,
        y0 + ph / 2.0,
        escape(&panel.y_label)
    );

    for s in &panel.series {
        let color = PALETTE[s.color % PALETTE.len()];
        match s.kind {
            SeriesKind::Line => {
                // Split at points that cannot be drawn (non-finite, or non-positive on a log axis).
                let mut segment: Vec<String> = Vec::new();
                let flush = |seg: &mut Vec<String>, out: &mut String| {
                    if seg.len() >= 2 {
                        let _ = writeln!(
                            out,
                            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                            seg.join(" ")
                        );
                    }
                    seg.clear();
                };
                for &(x, y) in &s.points {
                    match (px(x), py(y)) {
                        (Some(a), Some(b)) => segment.push(format!("{a:.2},{b:.2}")),
                        _ => flush(&mut segment, out),
                    }
                }
                flush(&mut segment, out);
            }
            SeriesKind::Markers => {
                for &(x, y) in &s.points {
                    if let (Some(a), Some(b)) = (px(x), py(y)) {
                        let _ = writeln!(
                            out,
                            r#"<path d="M{:.2},{b:.2}h6M{a:.2},{:.2}v6" stroke="{color}" stroke-width="1.2"/>"#,
                            a - 3.0,
                            b - 3.0
                        );
                    }
                }
            }
        }
    }

    // Legend, top right inside the frame.
    for (i, s) in panel.series.iter().enumerate() {
        let color = PALETTE[s.color % PALETTE.len()];
        let lx = x0 + pw - 150.0;
        let ly = y0 + 14.0 + 15.0 * i as f64;
        let swatch = match s.kind {
            SeriesKind::Line => format!(
                r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"/>"#,
                ly - 4.0,
                lx + 18.0,
                ly - 4.0
            ),
            SeriesKind::Markers => format!(
                r#"<path d="M{:.2},{:.2}h6M{:.2},{:.2}v6" stroke="{color}" stroke-width="1.2"/>"#,
                lx + 6.0,
                ly - 4.0,
                lx + 9.0,
                ly - 7.0
            ),
        };
        let _ = writeln!(
            out,
            r#"{swatch}<text x="{:.2}" y="{ly:.2}">{}</text>"#,
            lx + 24.0,
            escape(&s.label)
        );
    }
}

/// Renders panels on a grid with `columns` panels per row.
pub fn render(panels: &[Panel], columns: usize) -> Result<String> {
    if panels.is_empty()
        || panels
            .iter()
            .all(|p| p.series.iter().all(|s| s.points.is_empty()))
    {
        return Err(Error::EmptyPlot);
    }
    let columns = columns.clamp(1, panels.len());
    let rows = panels.len().div_ceil(columns);
    let width = PANEL_W * columns as f64;
    let height = PANEL_H * rows as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, panel) in panels.iter().enumerate() {
        let ox = PANEL_W * (i % columns) as f64;
        let oy = PANEL_H * (i / columns) as f64;
        render_panel(&mut out, panel, ox, oy);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlotStyle {
    pub title: String,
    pub log_y: bool,
}

/// Plots `eps_g` against `t`. Simulated trajectories are drawn as markers,
/// theory curves as lines; entries with the same `color` share a color.
pub fn emit_plot(trajs: &[(String, usize, &Trajectory)], style: &PlotStyle) -> Result<String> {
    if trajs.is_empty() {
        return Err(Error::EmptyPlot);
    }
    let series = trajs
        .iter()
        .map(|(label, color, traj)| Series {
            label: label.clone(),
            points: traj.points.iter().map(|p| (p.t, p.eps_g)).collect(),
            kind: if traj.meta.mode == Some(Mode::Simulate) {
                SeriesKind::Markers
            } else {
                SeriesKind::Line
            },
            color: *color,
        })
        .collect();
    render(
        &[Panel {
            title: style.title.clone(),
            x_label: "t = m/N".into(),
            y_label: "generalization error".into(),
            log_y: style.log_y,
            series,
        }],
        1,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_theory, Mode, ScenarioConfig, TrajectoryMeta, TrajectoryPoint};

    fn constant() -> Trajectory {
        Trajectory {
            points: (0..5)
                .map(|i| TrajectoryPoint {
                    t: i as f64,
                    eps_g: 0.5,
                    q: 1.0,
                    r: 0.0,
                    q_kl: None,
                    r_kl: None,
                })
                .collect(),
            stats: None,
            meta: TrajectoryMeta::default(),
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(emit_plot(&[], &PlotStyle::default()), Err(Error::EmptyPlot));
        assert_eq!(render(&[], 1), Err(Error::EmptyPlot));
    }

    #[test]
    fn constant_trajectory_is_horizontal() {
        let c = constant();
        let svg = emit_plot(&[("flat".into(), 0, &c)], &PlotStyle::default()).unwrap();
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let pts = line
            .split("points=\"")
            .nth(1)
            .unwrap()
            .trim_end_matches("\"/>");
        let ys: Vec<&str> = pts
            .split(' ')
            .map(|p| p.split(',').nth(1).unwrap())
            .collect();
        assert_eq!(ys.len(), 5);
        assert!(ys.iter().all(|y| *y == ys[0]));
    }

    #[test]
    fn byte_stable() {
        let mut sc = ScenarioConfig::default().with_mode(Mode::TheoryClosed);
        sc.model.n_outputs = 3;
        let t = run_theory(&sc).unwrap();
        let style = PlotStyle {
            title: "M = 3".into(),
            log_y: true,
        };
        let a = emit_plot(&[("theory".into(), 1, &t)], &style).unwrap();
        let b = emit_plot(&[("theory".into(), 1, &t)], &style).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
    }

    #[test]
    fn log_axis_skips_nonpositive_points() {
        let mut c = constant();
        c.points[2].eps_g = 0.0;
        let svg = emit_plot(
            &[("gap".into(), 0, &c)],
            &PlotStyle {
                title: String::new(),
                log_y: true,
            },
        )
        .unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
    }
}

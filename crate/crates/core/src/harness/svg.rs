//! Static SVG line plots, written by hand (no scripts, no dependencies).

use std::fmt::Write;

use crate::analytics::{analytic_collapse_master, CollapseCurve};
use crate::harness::report::{CollapseReport, Report};
use crate::noise::NoiseKind;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
    pub markers: bool,
}

impl Line {
    pub fn solid(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
            dashed: false,
            markers: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub lines: Vec<Line>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_x: false,
            log_y: false,
            lines: Vec::new(),
        }
    }

    fn tx(&self, v: f64) -> f64 {
        if self.log_x {
            v.log10()
        } else {
            v
        }
    }

    fn ty(&self, v: f64) -> f64 {
        if self.log_y {
            v.log10()
        } else {
            v
        }
    }

    fn usable(&self, p: (f64, f64)) -> bool {
        let (x, y) = (self.tx(p.0), self.ty(p.1));
        x.is_finite() && y.is_finite()
    }

    pub fn render(&self) -> String {
        let pts: Vec<(f64, f64)> = self
            .lines
            .iter()
            .flat_map(|l| l.points.iter().copied())
            .filter(|&p| self.usable(p))
            .map(|(x, y)| (self.tx(x), self.ty(y)))
            .collect();
        let (mut x0, mut x1, mut y0, mut y1) = pts.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
        );
        if pts.is_empty() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 < 1e-12 {
            x1 = x0 + 1.0;
        }
        if y1 - y0 < 1e-12 {
            y1 = y0 + 1.0;
        }
        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            LEFT + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let xl = if self.log_x { 10f64.powf(xv) } else { xv };
            let yl = if self.log_y { 10f64.powf(yv) } else { yv };
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                sx(xv),
                TOP + ph + 18.0,
                tick(xl)
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                sy(yv) + 4.0,
                tick(yl)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            H - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );
        for (i, line) in self.lines.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let path: Vec<String> = line
                .points
                .iter()
                .filter(|&&p| self.usable(p))
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(self.tx(x)), sy(self.ty(y))))
                .collect();
            let dash = if line.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
                path.join(" ")
            );
            if line.markers {
                for p in &path {
                    let (cx, cy) = p.split_once(',').unwrap();
                    let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
                }
            }
            let ly = TOP + 14.0 + 18.0 * i as f64;
            let lx = W - RIGHT + 12.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>"#,
                lx + 20.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}">{}</text>"#,
                lx + 26.0,
                ly + 4.0,
                escape(&line.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        format!("{:.3}", v).trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn collapse_plots(c: &CollapseReport, suffix: &str) -> Vec<(String, String)> {
    let mut raw = Plot::new("I(AB:R) vs t", "t (periods)", "I(AB:R) [bits]");
    let gamma = c.estimate.gamma_star;
    let mut scaled = Plot::new(&format!("collapse, gamma* = {gamma:.2}"), "t q^gamma*", "I(AB:R) [bits]");
    for curve in &c.curves {
        let pts: Vec<(f64, f64)> = curve.times.iter().copied().zip(curve.mean.iter().copied()).collect();
        raw.lines.push(Line::solid(format!("q={}", curve.q), pts.clone()));
        let r = CollapseCurve::rescale(gamma, curve.q, &pts);
        scaled.lines.push(Line::solid(format!("q={}", curve.q), r.points));
    }
    if c.noise_kind == NoiseKind::Iid {
        let xmax = scaled.lines.iter().flat_map(|l| l.points.iter().map(|p| p.0)).fold(0.0, f64::max);
        let master: Vec<(f64, f64)> = (0..=200)
            .map(|k| {
                let t0 = xmax * k as f64 / 200.0;
                (t0, analytic_collapse_master(t0))
            })
            .collect();
        scaled.lines.push(Line {
            label: "(2+t0^2)exp(-t0^2)".into(),
            points: master,
            dashed: true,
            markers: false,
        });
    }
    vec![
        (format!("collapse_raw{suffix}.svg"), raw.render()),
        (format!("collapse_rescaled{suffix}.svg"), scaled.render()),
    ]
}

/// `(file name, svg text)` pairs for a report.
pub fn report_svgs(report: &Report) -> Vec<(String, String)> {
    match report {
        Report::PowerLaw(p) => {
            let mut plot = Plot::new(
                &format!("I(A:B) = a q^b, b = {:.3} +- {:.3}", p.fit.b, p.b_err),
                "q",
                "I(A:B) [bits]",
            );
            plot.log_x = true;
            plot.log_y = true;
            plot.lines.push(Line {
                label: "data".into(),
                points: p.points.iter().map(|r| (r.q, r.mean)).collect(),
                dashed: false,
                markers: true,
            });
            plot.lines.push(Line {
                label: "fit".into(),
                points: p.points.iter().map(|r| (r.q, p.fit.eval(r.q))).collect(),
                dashed: true,
                markers: false,
            });
            vec![("power_law.svg".into(), plot.render())]
        }
        Report::Collapse(c) => collapse_plots(c, ""),
        Report::Crossover(x) => {
            let mut plot = Plot::new("timescale exponent", &x.control_name, "gamma*");
            plot.lines.push(Line {
                label: "gamma*".into(),
                points: x.rows.iter().map(|r| (r.control, r.gamma_star)).collect(),
                dashed: false,
                markers: true,
            });
            let mut out = vec![("crossover.svg".into(), plot.render())];
            for (i, c) in x.collapses.iter().enumerate() {
                out.extend(collapse_plots(c, &format!("_{i}")));
            }
            out
        }
    }
}

//! Run outputs: trajectory table, metadata and SVG plot.

use std::fmt::Write as _;

use pursuit_core::{GameRecord, PayoffKind, Point2, Scenario};
use serde_json::{json, Value};

use crate::scenario_file::OutputSettings;

pub const TRAJECTORY_HEADER: [&str; 6] = ["t", "x1", "y1", "x2", "y2", "dist"];

const DEFAULT_WIDTH: u32 = 800;
const DEFAULT_HEIGHT: u32 = 600;
const PURSUER_COLOR: &str = "#d62728";
const EVADER_COLOR: &str = "#1f77b4";
const OBSTACLE_COLOR: &str = "#7f7f7f";

/// `v` with 9 significant digits, in the shorter of fixed or exponent form.
pub fn format_sig9(v: f64) -> String {
    const DIGITS: i32 = 9;
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // Exponent after rounding to DIGITS significant digits.
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let exp: i32 = sci[sci.find('e').expect("exponent form") + 1..].parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_fraction(format!("{v:.decimals$}"))
    } else {
        let (mantissa, _) = sci.split_once('e').expect("exponent form");
        format!("{}e{exp}", trim_fraction(mantissa.to_string()))
    }
}

fn trim_fraction(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `v` rounded to 1e-6, without trailing zeros or negative zero.
pub fn format_coord(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    if r == 0.0 {
        return "0".into();
    }
    trim_fraction(format!("{r:.6}"))
}

pub fn trajectory_csv(record: &GameRecord) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(TRAJECTORY_HEADER).expect("in-memory write");
    let separations = record.separations();
    for (i, &t) in record.times.iter().enumerate() {
        let (p, e) = (record.pursuer_path[i], record.evader_path[i]);
        w.write_record([t, p.x, p.y, e.x, e.y, separations[i]].map(format_sig9))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

pub fn metadata(name: &str, scenario: &Scenario, record: &GameRecord) -> Value {
    let alpha = match scenario.payoff {
        PayoffKind::CaptureTime { alpha } => json!(alpha),
        _ => Value::Null,
    };
    let separations = record.separations();
    let (pruned_p, pruned_e) = record
        .pruned_branch_counts
        .iter()
        .fold((0, 0), |(a, b), &(p, e)| (a + p, b + e));
    json!({
        "name": name,
        "parameters": {
            "pursuer_start": [scenario.pursuer_start.x, scenario.pursuer_start.y],
            "evader_start": [scenario.evader_start.x, scenario.evader_start.y],
            "pursuer_speed": scenario.pursuer_speed,
            "evader_speed": scenario.evader_speed,
            "horizon": scenario.horizon,
            "dt": scenario.dt,
            "delta_alpha": scenario.delta_alpha,
            "payoff": scenario.payoff.name(),
            "alpha": alpha,
            "obstacles": scenario.obstacles.len(),
            "use_spatial_hash": scenario.use_spatial_hash,
        },
        "seed": scenario.seed,
        "steps": record.steps(),
        "initial_distance": separations[0],
        "final_distance": separations[separations.len() - 1],
        "final_payoff": finite_or_null(record.final_payoff),
        "capture_time": record.capture_time,
        "pruned_branches": { "pursuer": pruned_p, "evader": pruned_e },
    })
}

pub fn metadata_text(meta: &Value) -> String {
    let mut s = serde_json::to_string_pretty(meta).expect("json values serialize");
    s.push('\n');
    s
}

struct Frame {
    min: Point2,
    scale: f64,
    height: f64,
    pad_x: f64,
    pad_y: f64,
}

impl Frame {
    fn fit(points: &[Point2], width: f64, height: f64) -> Self {
        let (mut lo, mut hi) = (points[0], points[0]);
        for p in points {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let span = Point2::new((hi.x - lo.x).max(1e-9), (hi.y - lo.y).max(1e-9));
        let extent = span.x.max(span.y).max(1.0);
        // 10% margin on each side, square aspect.
        let span = Point2::new(span.x.max(extent * 1e-3), span.y.max(extent * 1e-3));
        let lo = lo - span * 0.1;
        let span = span * 1.2;
        let scale = (width / span.x).min(height / span.y);
        Self {
            min: lo,
            scale,
            height,
            pad_x: (width - span.x * scale) / 2.0,
            pad_y: (height - span.y * scale) / 2.0,
        }
    }

    fn map(&self, p: Point2) -> (String, String) {
        let x = self.pad_x + (p.x - self.min.x) * self.scale;
        let y = self.height - self.pad_y - (p.y - self.min.y) * self.scale;
        (format_coord(x), format_coord(y))
    }

    fn polyline(&self, points: &[Point2]) -> String {
        points
            .iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x},{y}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn svg(scenario: &Scenario, record: &GameRecord, settings: &OutputSettings) -> String {
    let width = f64::from(settings.width.unwrap_or(DEFAULT_WIDTH));
    let height = f64::from(settings.height.unwrap_or(DEFAULT_HEIGHT));
    let pursuer_color = settings.pursuer_color.as_deref().unwrap_or(PURSUER_COLOR);
    let evader_color = settings.evader_color.as_deref().unwrap_or(EVADER_COLOR);
    let obstacle_color = settings.obstacle_color.as_deref().unwrap_or(OBSTACLE_COLOR);

    let mut fit: Vec<Point2> = record.pursuer_path.clone();
    fit.extend(&record.evader_path);
    let frame = Frame::fit(&fit, width, height);
    let end = *record.times.last().expect("times start at 0");

    let mut out = String::new();
    let w = format_coord(width);
    let h = format_coord(height);
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#).unwrap();

    writeln!(out, r#"<g id="obstacles" fill="{obstacle_color}" stroke="{obstacle_color}">"#).unwrap();
    for (i, track) in scenario.obstacles.tracks.iter().enumerate() {
        let trace: Vec<Point2> = record.times.iter().map(|&t| track.center(t).expect("t >= 0")).collect();
        let r = format_coord(track.radius() * frame.scale);
        let (sx, sy) = frame.map(trace[0]);
        let (ex, ey) = frame.map(trace[trace.len() - 1]);
        writeln!(
            out,
            r#"<polyline id="obstacle-{i}-trace" points="{}" fill="none" stroke-width="1" stroke-dasharray="4 3"/>"#,
            frame.polyline(&trace)
        )
        .unwrap();
        writeln!(out, r#"<circle id="obstacle-{i}-start" cx="{sx}" cy="{sy}" r="{r}" fill-opacity="0.2" stroke-width="1"/>"#).unwrap();
        writeln!(out, r#"<circle id="obstacle-{i}-end" cx="{ex}" cy="{ey}" r="{r}" fill-opacity="0.5" stroke-width="1"/>"#).unwrap();
    }
    writeln!(out, "</g>").unwrap();

    for (id, path, color) in [
        ("pursuer", &record.pursuer_path, pursuer_color),
        ("evader", &record.evader_path, evader_color),
    ] {
        let (sx, sy) = frame.map(path[0]);
        let (ex, ey) = frame.map(path[path.len() - 1]);
        writeln!(out, r#"<g id="{id}" stroke="{color}" fill="{color}">"#).unwrap();
        writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke-width="2"/>"#,
            frame.polyline(path)
        )
        .unwrap();
        writeln!(out, r#"<circle cx="{sx}" cy="{sy}" r="4" fill="white" stroke-width="2"/>"#).unwrap();
        writeln!(out, r#"<circle cx="{ex}" cy="{ey}" r="4"/>"#).unwrap();
        writeln!(out, "</g>").unwrap();
    }
    writeln!(
        out,
        r#"<text x="8" y="18" font-family="sans-serif" font-size="12">t = 0 .. {}</text>"#,
        format_coord(end)
    )
    .unwrap();
    writeln!(out, "</svg>").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(1.0), "1");
        assert_eq!(format_sig9(0.2), "0.2");
        assert_eq!(format_sig9(18.0277564), "18.0277564");
        assert_eq!(format_sig9(2.0 / 3.0), "0.666666667");
        assert_eq!(format_sig9(-123456.789012), "-123456.789");
        assert_eq!(format_sig9(1.23456789e12), "1.23456789e12");
        assert_eq!(format_sig9(1.5e-7), "1.5e-7");
        assert_eq!(format_sig9(999999999.6), "1e9");
        for v in [std::f64::consts::PI, 1e-3 / 7.0, 12345.6789, -0.000123456789] {
            let back: f64 = format_sig9(v).parse().unwrap();
            assert!((back - v).abs() <= 5e-9 * v.abs(), "{v} -> {back}");
        }
    }

    #[test]
    fn coordinates_rounded() {
        assert_eq!(format_coord(1.0), "1");
        assert_eq!(format_coord(-0.0000001), "0");
        assert_eq!(format_coord(2.1234567), "2.123457");
        assert_eq!(format_coord(-3.5), "-3.5");
    }

    fn record() -> (Scenario, GameRecord) {
        let s = Scenario::new(Point2::ORIGIN, Point2::new(3.0, 4.0), 10.0, 8.0, 0.4, 0.2, 0.2);
        let r = pursuit_core::simulate(&s).unwrap();
        (s, r)
    }

    #[test]
    fn csv_shape() {
        let (_, r) = record();
        let text = trajectory_csv(&r);
        let lines: Vec<&str> = text.split_terminator('\n').collect();
        assert_eq!(lines[0], "t,x1,y1,x2,y2,dist");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "0,0,0,3,4,5");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn svg_is_self_contained() {
        let (s, r) = record();
        let doc = svg(&s, &r, &OutputSettings::default());
        assert!(doc.starts_with("<?xml"));
        assert!(doc.trim_end().ends_with("</svg>"));
        assert!(!doc.contains("href"));
        assert_eq!(doc.matches("<polyline").count(), 2);
    }

    #[test]
    fn metadata_fields() {
        let (s, r) = record();
        let m = metadata("x", &s, &r);
        assert_eq!(m["steps"], 2);
        assert_eq!(m["capture_time"], Value::Null);
        assert_eq!(m["parameters"]["payoff"], "terminal");
        assert_eq!(m["initial_distance"], 5.0);
    }
}

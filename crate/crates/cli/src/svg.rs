//! Static SVG overlay of two decorated loops.

use std::fmt::Write;

use vortexloop::loops::{DecoratedLoop, Point};

const SIZE: f64 = 600.0;
const MARGIN: f64 = 0.08;

struct Frame {
    min: Point,
    scale: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = Point>) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            for i in 0..2 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        let pad = MARGIN * span;
        Frame { min: [lo[0] - pad, lo[1] - pad], scale: SIZE / (span + 2.0 * pad) }
    }

    // y grows downward in SVG
    fn map(&self, p: Point) -> (f64, f64) {
        ((p[0] - self.min[0]) * self.scale, SIZE - (p[1] - self.min[1]) * self.scale)
    }
}

fn polyline(out: &mut String, frame: &Frame, l: &DecoratedLoop, stroke: &str) {
    let pts: Vec<String> = l
        .embedding()
        .points()
        .iter()
        .map(|&p| {
            let (x, y) = frame.map(p);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    writeln!(
        out,
        r#"  <polygon points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#,
        pts.join(" ")
    )
    .unwrap();
    for z in l.zero_points() {
        let (x, y) = frame.map(z);
        writeln!(out, r#"  <circle cx="{x:.3}" cy="{y:.3}" r="4" fill="{stroke}"/>"#).unwrap();
    }
}

/// Initial curve in grey, final curve in blue; zero images marked by dots.
pub fn overlay(initial: &DecoratedLoop, evolved: &DecoratedLoop) -> String {
    let all = initial.embedding().points().iter().chain(evolved.embedding().points()).copied();
    let frame = Frame::fit(all);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    polyline(&mut out, &frame, initial, "#888888");
    polyline(&mut out, &frame, evolved, "#1f5fbf");
    out.push_str("</svg>\n");
    out
}

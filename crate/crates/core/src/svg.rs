//! Self-contained SVG figures: the state-space picture (regions tinted by
//! shape, envelope in red, limit lines in bold) and plots of term structures.

use std::fmt::Write;

use crate::decompose::RegionMap;
use crate::envelope::AugmentedEnvelope;
use crate::geom::{clip_polygon, BBox, Point};

const WIDTH: f64 = 720.0;
const MARGIN: f64 = 40.0;
const LEFT: f64 = 80.0;

/// Fill colour per shape code.
pub fn shape_color(code: &str) -> &'static str {
    match code {
        "n" => "#4e79a7",
        "i" => "#f28e2b",
        "h" => "#59a14f",
        "d" => "#e15759",
        "hd" => "#b07aa1",
        "dh" => "#76b7b2",
        "hdh" => "#edc948",
        "dhd" => "#9c755f",
        "hdhd" => "#ff9da7",
        _ => "#bab0ac",
    }
}

struct Frame {
    bb: BBox,
    sx: f64,
    sy: f64,
    height: f64,
}

impl Frame {
    fn new(bb: BBox) -> Frame {
        let inner = WIDTH - LEFT - MARGIN;
        let aspect = (bb.height() / bb.width()).clamp(0.5, 1.25);
        let height = inner * aspect + 2.0 * MARGIN;
        Frame {
            bb,
            sx: inner / bb.width(),
            sy: (height - 2.0 * MARGIN) / bb.height(),
            height,
        }
    }

    fn px(&self, p: &Point) -> (f64, f64) {
        (
            LEFT + (p.z1 - self.bb.min.z1) * self.sx,
            self.height - MARGIN - (p.z2 - self.bb.min.z2) * self.sy,
        )
    }

    fn path(&self, pts: &[Point], close: bool) -> String {
        let mut s = String::new();
        for (k, p) in pts.iter().enumerate() {
            let (x, y) = self.px(p);
            let _ = write!(s, "{}{:.2},{:.2} ", if k == 0 { "M" } else { "L" }, x, y);
        }
        if close {
            s.push('Z');
        }
        s
    }

    fn open(&self, out: &mut String) {
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="12">"#,
            w = WIDTH,
            h = self.height
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    }

    fn axes(&self, out: &mut String, xlabel: &str, ylabel: &str) {
        let (x0, y0) = self.px(&self.bb.min);
        let (x1, y1) = self.px(&self.bb.max);
        let _ = writeln!(
            out,
            r##"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#555"/>"##,
            x1 - x0,
            y0 - y1
        );
        let fmt = |v: f64| format!("{:.4}", v + 0.0);
        let _ = writeln!(
            out,
            r#"<text x="{x0:.2}" y="{:.2}">{}</text>"#,
            y0 + 16.0,
            fmt(self.bb.min.z1)
        );
        let _ = writeln!(
            out,
            r#"<text x="{x1:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            y0 + 16.0,
            fmt(self.bb.max.z1)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{y0:.2}" text-anchor="end">{}</text>"#,
            x0 - 4.0,
            fmt(self.bb.min.z2)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 4.0,
            y1 + 10.0,
            fmt(self.bb.max.z2)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{xlabel}</text>"#,
            0.5 * (x0 + x1),
            y0 + 30.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{ylabel}</text>"#,
            0.5 * (x0 + x1),
            y1 - 12.0
        );
    }
}

/// Segment of `line` inside `bb`, if any.
fn clip_line(line: &crate::coeffs::Line, bb: &BBox) -> Option<(Point, Point)> {
    let n = line.normalized();
    let d = line.direction();
    let p = Point::new(-n.alpha * n.beta1, -n.alpha * n.beta2);
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (pc, dc, mn, mx) in [
        (p.z1, d.z1, bb.min.z1, bb.max.z1),
        (p.z2, d.z2, bb.min.z2, bb.max.z2),
    ] {
        if dc.abs() > 0.0 {
            let (a, b) = ((mn - pc) / dc, (mx - pc) / dc);
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        } else if pc < mn || pc > mx {
            return None;
        }
    }
    (lo < hi).then(|| (p.add(&d.scale(lo)), p.add(&d.scale(hi))))
}

/// The state space over `bb`: regions of `map` (if given) tinted by shape,
/// the envelope in red, `ℓ₀` and `ℓ_∞` in bold black.
pub fn state_space_svg(env: &AugmentedEnvelope, map: Option<&RegionMap>, bb: &BBox) -> String {
    let f = Frame::new(*bb);
    let mut out = String::new();
    f.open(&mut out);
    let mut legend: Vec<String> = Vec::new();
    if let Some(map) = map {
        for r in &map.regions {
            let poly = clip_polygon(&r.boundary, bb);
            if poly.len() < 3 {
                continue;
            }
            let code = r.label.code();
            let _ = writeln!(
                out,
                r#"<path d="{}" fill="{}" fill-opacity="0.35" stroke="none"><title>{} ({})</title></path>"#,
                f.path(&poly, true),
                shape_color(&code),
                code,
                r.label.name()
            );
            if !legend.contains(&code) {
                legend.push(code);
            }
        }
    }
    let clip: Vec<Point> = env.curve_points().into_iter().collect();
    // keep the drawn polyline inside a generous margin of the frame
    let view = bb.inflate(1.0, 0.0);
    let mut run: Vec<Point> = Vec::new();
    let mut runs: Vec<Vec<Point>> = Vec::new();
    for p in clip {
        if view.contains(&p) {
            run.push(p);
        } else if !run.is_empty() {
            runs.push(std::mem::take(&mut run));
        }
    }
    runs.push(run);
    let _ = writeln!(
        out,
        r#"<clipPath id="frame"><rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/></clipPath>"#,
        LEFT,
        MARGIN,
        WIDTH - LEFT - MARGIN,
        f.height - 2.0 * MARGIN
    );
    let _ = writeln!(out, r#"<g clip-path="url(#frame)">"#);
    for (line, name) in [(&env.l0, "l0"), (&env.linf, "linf")] {
        if let Some((a, b)) = clip_line(line, bb) {
            let _ = writeln!(
                out,
                r#"<path d="{}" stroke="black" stroke-width="3" fill="none"><title>{name}</title></path>"#,
                f.path(&[a, b], false)
            );
        }
    }
    for r in runs.iter().filter(|r| r.len() > 1) {
        let _ = writeln!(
            out,
            r#"<path d="{}" stroke="red" stroke-width="1.5" fill="none"/>"#,
            f.path(r, false)
        );
    }
    let sp = &env.special;
    let mut marks: Vec<(Point, &str)> = vec![(env.basepoint, "M"), (sp.contact0, "eta(0)")];
    if let Some(e) = sp.contact_inf.point() {
        marks.push((e, "eta(inf)"));
    }
    marks.extend(sp.cusps.iter().map(|c| (c.z, "cusp")));
    marks.extend(
        sp.self_intersections
            .iter()
            .map(|c| (c.z, "self-intersection")),
    );
    for (p, name) in marks {
        if bb.contains(&p) {
            let (x, y) = f.px(&p);
            let _ = writeln!(
                out,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="black"><title>{name}</title></circle>"#
            );
        }
    }
    let _ = writeln!(out, "</g>");
    f.axes(&mut out, "z1", "z2");
    legend.sort();
    for (k, code) in legend.iter().enumerate() {
        let y = MARGIN + 4.0 + 16.0 * k as f64;
        let x = WIDTH - MARGIN - 70.0;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{y:.2}" width="12" height="12" fill="{}" fill-opacity="0.6"/><text x="{:.2}" y="{:.2}">{code}</text>"#,
            shape_color(code),
            x + 16.0,
            y + 10.0
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Line plot of several named series `(x, y)` on shared axes.
pub fn curves_svg(series: &[(String, Vec<(f64, f64)>)], xlabel: &str, ylabel: &str) -> String {
    let pts: Vec<Point> = series
        .iter()
        .flat_map(|(_, s)| s.iter().map(|&(x, y)| Point::new(x, y)))
        .collect();
    let bb = BBox::from_points(&pts)
        .unwrap_or(BBox {
            min: Point::new(0.0, 0.0),
            max: Point::new(1.0, 1.0),
        })
        .inflate(0.0, 1e-9);
    let pad = 0.05 * bb.height();
    let bb = BBox {
        min: Point::new(bb.min.z1, bb.min.z2 - pad),
        max: Point::new(bb.max.z1, bb.max.z2 + pad),
    };
    let f = Frame::new(bb);
    let mut out = String::new();
    f.open(&mut out);
    for (k, (name, s)) in series.iter().enumerate() {
        let line: Vec<Point> = s.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let color = shape_color(name);
        let _ = writeln!(
            out,
            r#"<path d="{}" stroke="{color}" stroke-width="1.5" fill="none"><title>{name}</title></path>"#,
            f.path(&line, false)
        );
        let y = MARGIN + 4.0 + 16.0 * k as f64;
        let x = WIDTH - MARGIN - 150.0;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{y:.2}" width="12" height="3" fill="{color}"/><text x="{:.2}" y="{:.2}">{name}</text>"#,
            x + 16.0,
            y + 6.0
        );
    }
    f.axes(&mut out, xlabel, ylabel);
    out.push_str("</svg>\n");
    out
}

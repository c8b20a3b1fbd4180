//! Planar arrangement of the envelope and the limit lines `ℓ₀`, `ℓ_∞`,
//! closed off by a frame box, and the faces it cuts the plane into.
//!
//! The topology comes from the special points alone: the envelope is split
//! at its cusps, self-intersections and line crossings, the lines at `M`,
//! the contact points and the same crossings. Faces are traced from the
//! rotation system at each vertex, so slivers thinner than any raster cell
//! are still counted.

use serde::Serialize;

use crate::coeffs::Line;
use crate::envelope::{AugmentedEnvelope, Contact};
use crate::error::{Error, Result};
use crate::geom::{clip_polygon, point_in_polygon, polygon_area, BBox, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EdgeKind {
    Curve,
    L0,
    Linf,
    /// The part of `ℓ_∞` beyond the clip point of an asymptotic envelope.
    /// In the plane the envelope tail runs alongside it, so it separates no
    /// two regions directly.
    Asymptote,
    Frame,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub kind: EdgeKind,
    pub from: usize,
    pub to: usize,
    /// Vertices from `from` to `to`, both included.
    pub path: Vec<Point>,
}

#[derive(Debug, Clone)]
pub struct Face {
    /// Half-edges in boundary order; half-edge `2k` runs along edge `k`,
    /// `2k + 1` against it.
    pub half_edges: Vec<usize>,
    /// Closed boundary with the face on the left.
    pub boundary: Vec<Point>,
    pub area: f64,
    /// The face reaches the frame, i.e. the region is unbounded.
    pub unbounded: bool,
}

#[derive(Debug, Clone)]
pub struct Arrangement {
    pub vertices: Vec<Point>,
    pub edges: Vec<Edge>,
    /// Faces other than the one outside the frame.
    pub faces: Vec<Face>,
    /// Face index of each half-edge (`None` for the outer face).
    pub face_of: Vec<Option<usize>>,
    pub frame: BBox,
}

struct Builder {
    vertices: Vec<Point>,
    edges: Vec<Edge>,
    merge_tol: f64,
}

impl Builder {
    fn node(&mut self, p: Point) -> usize {
        if let Some(i) = self
            .vertices
            .iter()
            .position(|v| v.dist(&p) <= self.merge_tol)
        {
            return i;
        }
        self.vertices.push(p);
        self.vertices.len() - 1
    }

    /// Add a chain of points, splitting it into edges at the marked ones.
    /// The first and last points are always vertices.
    fn chain(&mut self, kind: EdgeKind, pts: &[(Point, bool)]) {
        if pts.len() < 2 {
            return;
        }
        let mut start = self.node(pts[0].0);
        let mut path = vec![pts[0].0];
        let last = pts.len() - 1;
        for (k, &(p, marked)) in pts.iter().enumerate().skip(1) {
            path.push(p);
            if marked || k == last {
                let end = self.node(p);
                let len: f64 = path.windows(2).map(|w| w[0].dist(&w[1])).sum();
                if end != start || len > self.merge_tol {
                    let path = std::mem::replace(&mut path, vec![p]);
                    self.edges.push(Edge {
                        kind,
                        from: start,
                        to: end,
                        path,
                    });
                } else {
                    path = vec![p];
                }
                start = end;
            }
        }
    }
}

/// Frame box: everything the curve visits, with room to spare.
fn frame_box(env: &AugmentedEnvelope) -> BBox {
    let mut pts: Vec<Point> = env.polyline.clone();
    pts.push(env.special.contact0);
    let bb = BBox::from_points(&pts).unwrap();
    bb.inflate(0.5, 0.25 * env.scale)
}

/// Parameter range `[t0, t1]` of `p + t d` inside the box.
fn clip_line(p: &Point, d: &Point, bb: &BBox) -> (f64, f64) {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (pc, dc, mn, mx) in [
        (p.z1, d.z1, bb.min.z1, bb.max.z1),
        (p.z2, d.z2, bb.min.z2, bb.max.z2),
    ] {
        if dc.abs() > 0.0 {
            let (a, b) = ((mn - pc) / dc, (mx - pc) / dc);
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
    }
    (lo, hi)
}

/// Position along the frame boundary, counter-clockwise from the lower left
/// corner.
fn perimeter_param(p: &Point, bb: &BBox) -> f64 {
    let (w, h) = (bb.width(), bb.height());
    let dx = |v: f64| (v - bb.min.z1).clamp(0.0, w);
    let dy = |v: f64| (v - bb.min.z2).clamp(0.0, h);
    let d = [
        (p.z2 - bb.min.z2).abs(),
        (p.z1 - bb.max.z1).abs(),
        (p.z2 - bb.max.z2).abs(),
        (p.z1 - bb.min.z1).abs(),
    ];
    let side = (0..4).min_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap();
    match side {
        0 => dx(p.z1),
        1 => w + dy(p.z2),
        2 => w + h + (w - dx(p.z1)),
        _ => 2.0 * w + h + (h - dy(p.z2)),
    }
}

impl Arrangement {
    pub fn new(env: &AugmentedEnvelope) -> Result<Arrangement> {
        let scale = env.scale;
        let sp = &env.special;
        let frame = frame_box(env);
        let mut b = Builder {
            vertices: Vec::new(),
            edges: Vec::new(),
            merge_tol: 1e-9 * scale,
        };

        // envelope, with the special points spliced in by curve parameter
        let mut events: Vec<(f64, Point)> = Vec::new();
        events.extend(sp.l0_intersections.iter().map(|c| (c.x, c.z)));
        events.extend(sp.linf_intersections.iter().map(|c| (c.x, c.z)));
        for s in &sp.self_intersections {
            events.push((s.x1, s.z));
            events.push((s.x2, s.z));
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut curve: Vec<(Point, bool)> = Vec::with_capacity(env.body.len() + events.len() + 1);
        let mut k = 0;
        for e in &env.body {
            while k < events.len() && events[k].0 < e.x {
                curve.push((events[k].1, true));
                k += 1;
            }
            curve.push((e.z, e.is_cusp));
        }
        curve.extend(events[k..].iter().map(|&(_, z)| (z, true)));
        let end = match (env.contact_inf, env.clip_point) {
            (Contact::Finite(p), _) => Some(p),
            (_, c) => c,
        };
        if let Some(p) = end {
            curve.push((p, true));
        }
        b.chain(EdgeKind::Curve, &curve);

        // limit lines, clipped to the frame
        let m = env.basepoint;
        let mut frame_pts: Vec<Point> = vec![
            frame.min,
            Point::new(frame.max.z1, frame.min.z2),
            frame.max,
            Point::new(frame.min.z1, frame.max.z2),
        ];
        for (kind, line, on_line) in [
            (EdgeKind::L0, &env.l0, {
                let mut v = vec![sp.contact0];
                v.extend(sp.l0_intersections.iter().map(|c| c.z));
                v
            }),
            (EdgeKind::Linf, &env.linf, {
                let mut v: Vec<Point> = end.into_iter().collect();
                v.extend(sp.linf_intersections.iter().map(|c| c.z));
                v
            }),
        ] {
            let d = line.direction();
            let (t0, t1) = clip_line(&m, &d, &frame);
            let at = |t: f64| m.add(&d.scale(t));
            let (a, z) = (at(t0), at(t1));
            frame_pts.push(a);
            frame_pts.push(z);
            let mut pts: Vec<(f64, Point)> = vec![(t0, a), (0.0, m), (t1, z)];
            pts.extend(
                on_line
                    .into_iter()
                    .map(|p| (p.sub(&m).z1 * d.z1 + p.sub(&m).z2 * d.z2, p)),
            );
            pts.sort_by(|x, y| x.0.total_cmp(&y.0));
            let chain: Vec<(Point, bool)> = pts.iter().map(|&(_, p)| (p, true)).collect();
            match env.clip_point.filter(|_| kind == EdgeKind::Linf) {
                Some(c) => {
                    let tc = c.sub(&m).z1 * d.z1 + c.sub(&m).z2 * d.z2;
                    let k = pts.iter().position(|&(_, p)| p == c).unwrap();
                    if tc > 0.0 {
                        b.chain(kind, &chain[..=k]);
                        b.chain(EdgeKind::Asymptote, &chain[k..]);
                    } else {
                        b.chain(EdgeKind::Asymptote, &chain[..=k]);
                        b.chain(kind, &chain[k..]);
                    }
                }
                None => b.chain(kind, &chain),
            }
        }

        frame_pts.sort_by(|x, y| perimeter_param(x, &frame).total_cmp(&perimeter_param(y, &frame)));
        frame_pts.push(frame_pts[0]);
        let chain: Vec<(Point, bool)> = frame_pts.into_iter().map(|p| (p, true)).collect();
        b.chain(EdgeKind::Frame, &chain);

        let lines = [env.l0, env.linf];
        Self::trace(b.vertices, b.edges, frame, 1e-3 * scale, &lines)
    }

    fn half_path(&self, h: usize) -> Box<dyn Iterator<Item = &Point> + '_> {
        let path = &self.edges[h / 2].path;
        if h.is_multiple_of(2) {
            Box::new(path.iter())
        } else {
            Box::new(path.iter().rev())
        }
    }

    fn origin(edges: &[Edge], h: usize) -> usize {
        let e = &edges[h / 2];
        if h.is_multiple_of(2) {
            e.from
        } else {
            e.to
        }
    }

    fn trace(
        vertices: Vec<Point>,
        edges: Vec<Edge>,
        frame: BBox,
        lookahead: f64,
        lines: &[Line],
    ) -> Result<Arrangement> {
        let nh = 2 * edges.len();
        let mut arr = Arrangement {
            vertices,
            edges,
            faces: Vec::new(),
            face_of: vec![None; nh],
            frame,
        };

        // outgoing half-edges at each vertex, counter-clockwise
        let mut out: Vec<Vec<(f64, usize)>> = vec![Vec::new(); arr.vertices.len()];
        for h in 0..nh {
            let o = arr.vertices[Self::origin(&arr.edges, h)];
            let pts: Vec<&Point> = arr.half_path(h).collect();
            let far = pts
                .iter()
                .skip(1)
                .find(|p| p.dist(&o) >= lookahead)
                .copied()
                .unwrap_or(if pts.len() > 2 {
                    pts[pts.len() / 2]
                } else {
                    pts[pts.len() - 1]
                });
            let mut d = far.sub(&o);
            // The envelope leaves a contact point tangentially to the line, so
            // the lookahead may not resolve its side. The side is constant
            // along the edge, so it is read off the point farthest from the line.
            if arr.edges[h / 2].kind == EdgeKind::Curve {
                let on = lines
                    .iter()
                    .filter(|l| l.signed_distance(&o).abs() <= 1e-6 * lookahead);
                for l in on {
                    let far_side = pts
                        .iter()
                        .map(|p| l.signed_distance(p))
                        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                        .unwrap_or(0.0);
                    let here = l.signed_distance(&o.add(&d));
                    if far_side != 0.0 && (here * far_side <= 0.0 || here.abs() < 1e-6 * d.norm()) {
                        let n = l.normalized();
                        d = Point::new(n.beta1, n.beta2).scale(far_side.signum());
                    }
                }
            }
            out[Self::origin(&arr.edges, h)].push((d.z2.atan2(d.z1), h));
        }
        let mut slot = vec![(0usize, 0usize); nh];
        for (v, list) in out.iter_mut().enumerate() {
            list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for (i, &(_, h)) in list.iter().enumerate() {
                slot[h] = (v, i);
            }
        }
        let next = |h: usize| {
            let (v, i) = slot[h ^ 1];
            let list = &out[v];
            list[(i + list.len() - 1) % list.len()].1
        };

        let mut seen = vec![false; nh];
        let mut cycles: Vec<(Vec<usize>, Vec<Point>, f64)> = Vec::new();
        for h0 in 0..nh {
            if seen[h0] {
                continue;
            }
            let mut hs = Vec::new();
            let mut boundary: Vec<Point> = Vec::new();
            let mut h = h0;
            while !seen[h] {
                seen[h] = true;
                hs.push(h);
                boundary.extend(arr.half_path(h).skip(1).copied());
                h = next(h);
            }
            if h != h0 {
                return Err(Error::Convergence("face tracing did not close".into()));
            }
            let area = polygon_area(&boundary);
            cycles.push((hs, boundary, area));
        }
        // V - E + F = 2 for a connected plane graph
        let (v, e, f) = (
            arr.vertices.len() as i64,
            arr.edges.len() as i64,
            cycles.len() as i64,
        );
        if v - e + f != 2 {
            return Err(Error::Convergence(format!(
                "arrangement is not a connected plane graph (V={v}, E={e}, F={f})"
            )));
        }
        let outer = (0..cycles.len())
            .min_by(|&a, &b| cycles[a].2.total_cmp(&cycles[b].2))
            .unwrap();
        for (k, (hs, boundary, area)) in cycles.into_iter().enumerate() {
            if k == outer {
                continue;
            }
            let id = arr.faces.len();
            for &h in &hs {
                arr.face_of[h] = Some(id);
            }
            let unbounded = hs.iter().any(|&h| arr.edges[h / 2].kind == EdgeKind::Frame);
            arr.faces.push(Face {
                half_edges: hs,
                boundary,
                area,
                unbounded,
            });
        }
        Ok(arr)
    }

    /// Pairs of faces on the two sides of an envelope or limit-line edge.
    pub fn adjacency(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| !matches!(e.kind, EdgeKind::Frame | EdgeKind::Asymptote))
            .filter_map(
                |(k, _)| match (self.face_of[2 * k], self.face_of[2 * k + 1]) {
                    (Some(a), Some(b)) if a != b => Some((a.min(b), a.max(b))),
                    _ => None,
                },
            )
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// A point inside face `f` maximising `clearance` among candidates
    /// offset to the left of its boundary segments.
    pub fn interior_point(&self, f: usize, clearance: impl Fn(&Point) -> f64) -> Option<Point> {
        let face = &self.faces[f];
        let poly = &face.boundary;
        let n = poly.len();
        let mut segs: Vec<(f64, usize)> = (0..n)
            .map(|i| (poly[i].dist(&poly[(i + 1) % n]), i))
            .collect();
        segs.sort_by(|a, b| b.0.total_cmp(&a.0));
        // the longest segments plus an even spread along the boundary
        let mut picked: Vec<usize> = segs.iter().take(64).map(|s| s.1).collect();
        picked.extend((0..n).step_by((n / 1024).max(1)));
        picked.sort_unstable();
        picked.dedup();
        let mut cands: Vec<(f64, Point)> = Vec::new();
        for i in picked {
            let len = poly[i].dist(&poly[(i + 1) % n]);
            if len <= 0.0 {
                continue;
            }
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            let mid = a.lerp(&b, 0.5);
            let normal = Point::new(a.z2 - b.z2, b.z1 - a.z1).scale(1.0 / len);
            for h in [0.3, 0.1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7] {
                let z = mid.add(&normal.scale(h * len));
                if self.frame.contains(&z) {
                    cands.push((clearance(&z), z));
                }
            }
        }
        cands.sort_by(|a, b| b.0.total_cmp(&a.0));
        cands
            .into_iter()
            .find(|(_, z)| point_in_polygon(z, poly))
            .map(|(_, z)| z)
    }

    /// Fraction of `bb` covered by face `f`.
    pub fn area_share(&self, f: usize, bb: &BBox) -> f64 {
        let clipped = clip_polygon(&self.faces[f].boundary, bb);
        polygon_area(&clipped).abs() / (bb.width() * bb.height())
    }
}

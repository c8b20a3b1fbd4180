//! Small planar geometry toolkit: points, lines and segment predicates.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub z1: f64,
    pub z2: f64,
}

impl Point {
    pub const fn new(z1: f64, z2: f64) -> Self {
        Point { z1, z2 }
    }

    pub fn is_finite(&self) -> bool {
        self.z1.is_finite() && self.z2.is_finite()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.z1 - other.z1).hypot(self.z2 - other.z2)
    }

    pub fn norm(&self) -> f64 {
        self.z1.hypot(self.z2)
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point::new(self.z1 - other.z1, self.z2 - other.z2)
    }

    pub fn add(&self, other: &Point) -> Point {
        Point::new(self.z1 + other.z1, self.z2 + other.z2)
    }

    pub fn scale(&self, s: f64) -> Point {
        Point::new(self.z1 * s, self.z2 * s)
    }

    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point::new(
            self.z1 + t * (other.z1 - self.z1),
            self.z2 + t * (other.z2 - self.z2),
        )
    }
}

/// `(b - a) × (c - a)`; positive when `c` lies to the left of `a → b`.
pub fn orient(a: &Point, b: &Point, c: &Point) -> f64 {
    (b.z1 - a.z1) * (c.z2 - a.z2) - (b.z2 - a.z2) * (c.z1 - a.z1)
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let d = b.sub(a);
    let len2 = d.z1 * d.z1 + d.z2 * d.z2;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p.z1 - a.z1) * d.z1 + (p.z2 - a.z2) * d.z2) / len2;
    p.dist(&a.lerp(b, t.clamp(0.0, 1.0)))
}

/// Proper intersection of the open segments `(p1, p2)` and `(q1, q2)`.
///
/// Returns the parameters `(s, t)` along each segment and the point. Touching
/// at endpoints and collinear overlaps are not reported.
pub fn segment_intersection(
    p1: &Point,
    p2: &Point,
    q1: &Point,
    q2: &Point,
) -> Option<(f64, f64, Point)> {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if !((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) {
        return None;
    }
    if !((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return None;
    }
    let s = d1 / (d1 - d2);
    let t = d3 / (d3 - d4);
    Some((s, t, p1.lerp(p2, s)))
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn from_points<'a>(pts: impl IntoIterator<Item = &'a Point>) -> Option<BBox> {
        let mut it = pts.into_iter().filter(|p| p.is_finite());
        let first = *it.next()?;
        let mut bb = BBox {
            min: first,
            max: first,
        };
        for p in it {
            bb.min.z1 = bb.min.z1.min(p.z1);
            bb.min.z2 = bb.min.z2.min(p.z2);
            bb.max.z1 = bb.max.z1.max(p.z1);
            bb.max.z2 = bb.max.z2.max(p.z2);
        }
        Some(bb)
    }

    pub fn width(&self) -> f64 {
        self.max.z1 - self.min.z1
    }

    pub fn height(&self) -> f64 {
        self.max.z2 - self.min.z2
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    /// Grow each side by `frac` of the corresponding extent, with a floor of
    /// `min_pad` so that degenerate boxes get some area.
    pub fn inflate(&self, frac: f64, min_pad: f64) -> BBox {
        let pw = (self.width() * frac).max(min_pad);
        let ph = (self.height() * frac).max(min_pad);
        BBox {
            min: Point::new(self.min.z1 - pw, self.min.z2 - ph),
            max: Point::new(self.max.z1 + pw, self.max.z2 + ph),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.z1 >= self.min.z1 && p.z1 <= self.max.z1 && p.z2 >= self.min.z2 && p.z2 <= self.max.z2
    }
}

/// Diameter of a finite point set (zero for fewer than two points).
pub fn diameter(pts: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            d = d.max(p.dist(q));
        }
    }
    d
}

/// Signed shoelace area of a closed polygon (counter-clockwise positive).
pub fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let o = poly[0];
    let mut s = 0.0;
    for i in 1..n - 1 {
        s += orient(&o, &poly[i], &poly[i + 1]);
    }
    0.5 * s
}

/// Even-odd containment test for a closed polygon.
pub fn point_in_polygon(z: &Point, poly: &[Point]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (a, b) = (&poly[i], &poly[j]);
        if (a.z2 > z.z2) != (b.z2 > z.z2) {
            let x = a.z1 + (z.z2 - a.z2) / (b.z2 - a.z2) * (b.z1 - a.z1);
            if z.z1 < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Sutherland–Hodgman clip of a polygon against a box.
pub fn clip_polygon(poly: &[Point], bb: &BBox) -> Vec<Point> {
    // (axis, bound, keep side: true for >=)
    let planes = [
        (0, bb.min.z1, true),
        (0, bb.max.z1, false),
        (1, bb.min.z2, true),
        (1, bb.max.z2, false),
    ];
    let coord = |p: &Point, axis: usize| if axis == 0 { p.z1 } else { p.z2 };
    let mut out: Vec<Point> = poly.to_vec();
    for &(axis, bound, ge) in &planes {
        if out.is_empty() {
            break;
        }
        let inside = |p: &Point| {
            if ge {
                coord(p, axis) >= bound
            } else {
                coord(p, axis) <= bound
            }
        };
        let input = std::mem::take(&mut out);
        let mut prev = *input.last().unwrap();
        for cur in input {
            let (ci, pi) = (inside(&cur), inside(&prev));
            if ci != pi {
                let t = (bound - coord(&prev, axis)) / (coord(&cur, axis) - coord(&prev, axis));
                out.push(prev.lerp(&cur, t));
            }
            if ci {
                out.push(cur);
            }
            prev = cur;
        }
    }
    out
}

/// Hash of the segments of a polyline for proximity and crossing queries.
///
/// Segments live on the finest of several grid levels (each 16 times
/// coarser than the previous) on which they span at most a few cells, so
/// long tails far from the region of interest stay cheap.
#[derive(Debug, Clone)]
pub struct SegmentIndex {
    segs: Vec<(Point, Point)>,
    cell: f64,
    levels: Vec<HashMap<(i64, i64), Vec<u32>>>,
}

const LEVEL_FACTOR: f64 = 16.0;
const MAX_SPAN: i64 = 4;

impl SegmentIndex {
    pub fn new(points: &[Point], cell: f64) -> Self {
        let segs: Vec<(Point, Point)> = points.windows(2).map(|w| (w[0], w[1])).collect();
        let mut levels: Vec<HashMap<(i64, i64), Vec<u32>>> = Vec::new();
        for (i, (a, b)) in segs.iter().enumerate() {
            let mut level = 0;
            loop {
                let c = cell * LEVEL_FACTOR.powi(level as i32);
                let key = |v: f64| (v / c).floor() as i64;
                let (x0, x1) = (key(a.z1.min(b.z1)), key(a.z1.max(b.z1)));
                let (y0, y1) = (key(a.z2.min(b.z2)), key(a.z2.max(b.z2)));
                if (x1 - x0 <= MAX_SPAN && y1 - y0 <= MAX_SPAN) || level >= 15 {
                    if levels.len() <= level {
                        levels.resize_with(level + 1, HashMap::new);
                    }
                    for gx in x0..=x1 {
                        for gy in y0..=y1 {
                            levels[level].entry((gx, gy)).or_default().push(i as u32);
                        }
                    }
                    break;
                }
                level += 1;
            }
        }
        SegmentIndex { segs, cell, levels }
    }

    /// Indices of segments stored in cells overlapping the box `[lo, hi]`.
    fn candidates(&self, lo: &Point, hi: &Point) -> Vec<u32> {
        let mut out = Vec::new();
        for (level, cells) in self.levels.iter().enumerate() {
            if cells.is_empty() {
                continue;
            }
            let c = self.cell * LEVEL_FACTOR.powi(level as i32);
            let key = |v: f64| (v / c).floor() as i64;
            let (x0, x1, y0, y1) = (key(lo.z1), key(hi.z1), key(lo.z2), key(hi.z2));
            if (x1 - x0 + 1).saturating_mul(y1 - y0 + 1) as usize > cells.len() {
                for v in cells.values() {
                    out.extend_from_slice(v);
                }
                continue;
            }
            for gx in x0..=x1 {
                for gy in y0..=y1 {
                    if let Some(v) = cells.get(&(gx, gy)) {
                        out.extend_from_slice(v);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Distance to the nearest segment if it is below `r`, else `∞`.
    pub fn distance_within(&self, z: &Point, r: f64) -> f64 {
        let lo = Point::new(z.z1 - r, z.z2 - r);
        let hi = Point::new(z.z1 + r, z.z2 + r);
        let best = self
            .candidates(&lo, &hi)
            .into_iter()
            .map(|i| {
                let (a, b) = &self.segs[i as usize];
                point_segment_distance(z, a, b)
            })
            .fold(f64::INFINITY, f64::min);
        if best <= r {
            best
        } else {
            f64::INFINITY
        }
    }

    /// Number of proper crossings of the segment `(a, b)` with the polyline.
    pub fn crossings(&self, a: &Point, b: &Point) -> usize {
        self.crossing_segments(a, b).len()
    }

    /// Indices of the segments properly crossed by `ab`, unordered.
    pub fn crossing_segments(&self, a: &Point, b: &Point) -> Vec<u32> {
        let lo = Point::new(a.z1.min(b.z1), a.z2.min(b.z2));
        let hi = Point::new(a.z1.max(b.z1), a.z2.max(b.z2));
        self.candidates(&lo, &hi)
            .into_iter()
            .filter(|&i| {
                let (p, q) = &self.segs[i as usize];
                segment_intersection(a, b, p, q).is_some()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_helpers_on_unit_square() {
        let sq = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        assert_eq!(polygon_area(&sq), 1.0);
        let rev: Vec<Point> = sq.iter().rev().copied().collect();
        assert_eq!(polygon_area(&rev), -1.0);
        assert!(point_in_polygon(&Point::new(0.3, 0.7), &sq));
        assert!(!point_in_polygon(&Point::new(1.3, 0.7), &sq));
        let bb = BBox {
            min: Point::new(0.5, -1.0),
            max: Point::new(2.0, 0.25),
        };
        assert!((polygon_area(&clip_polygon(&sq, &bb)) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn segment_index_matches_brute_force() {
        // spiral with a geometrically growing tail
        let pts: Vec<Point> = (0..400)
            .map(|k| {
                let t = k as f64 * 0.1;
                let r = (0.02 * k as f64).exp();
                Point::new(r * t.cos(), r * t.sin())
            })
            .collect();
        let idx = SegmentIndex::new(&pts, 0.05);
        for k in 0..200 {
            let a = Point::new((k as f64 * 0.37).sin() * 3.0, (k as f64 * 0.61).cos() * 3.0);
            let b = Point::new(a.z1 + 0.8, a.z2 - 0.3);
            let brute = pts
                .windows(2)
                .filter(|w| segment_intersection(&a, &b, &w[0], &w[1]).is_some())
                .count();
            assert_eq!(idx.crossings(&a, &b), brute);
            let d = pts
                .windows(2)
                .map(|w| point_segment_distance(&a, &w[0], &w[1]))
                .fold(f64::INFINITY, f64::min);
            let got = idx.distance_within(&a, 0.3);
            if d <= 0.3 {
                assert!((got - d).abs() < 1e-15);
            } else {
                assert!(got.is_infinite());
            }
        }
    }

    #[test]
    fn crossing_segments_meet_in_the_middle() {
        let r = segment_intersection(
            &Point::new(0.0, 0.0),
            &Point::new(2.0, 2.0),
            &Point::new(0.0, 2.0),
            &Point::new(2.0, 0.0),
        )
        .unwrap();
        assert!((r.0 - 0.5).abs() < 1e-15 && (r.1 - 0.5).abs() < 1e-15);
        assert!(r.2.dist(&Point::new(1.0, 1.0)) < 1e-15);
    }

    #[test]
    fn touching_and_parallel_segments_are_ignored() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(1.0, 0.0);
        assert!(segment_intersection(&a, &b, &b, &Point::new(1.0, 1.0)).is_none());
        assert!(
            segment_intersection(&a, &b, &Point::new(0.0, 1.0), &Point::new(1.0, 1.0)).is_none()
        );
        assert!(
            segment_intersection(&a, &b, &Point::new(0.5, 0.0), &Point::new(2.0, 0.0)).is_none()
        );
    }

    #[test]
    fn segment_distance_clamps_to_endpoints() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(1.0, 0.0);
        assert_eq!(point_segment_distance(&Point::new(0.5, 2.0), &a, &b), 2.0);
        assert_eq!(point_segment_distance(&Point::new(4.0, 4.0), &a, &b), 5.0);
    }

    #[test]
    fn bbox_inflation() {
        let bb = BBox::from_points(&[Point::new(0.0, 0.0), Point::new(2.0, 1.0)]).unwrap();
        let big = bb.inflate(0.5, 0.0);
        assert_eq!(big.min, Point::new(-1.0, -0.5));
        assert_eq!(big.max, Point::new(3.0, 1.5));
        assert!(big.contains(&Point::new(2.5, 1.2)));
        assert!((diameter(&[bb.min, bb.max]) - 5f64.sqrt()).abs() < 1e-15);
    }
}

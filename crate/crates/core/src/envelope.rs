//! The envelope `η` of the line family, its cusps and contact points, the
//! augmented closed polyline `M → η(0) → η → η(∞) → M`, and the census of
//! special points (cusps, self-intersections, crossings of `ℓ₀` and `ℓ_∞`).

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::coeffs::{verify_assumptions, LimitEnd, Line, LineFamily};
use crate::error::{Assumption, Error, Result};
use crate::geom::{diameter, point_segment_distance, segment_intersection, Point, SegmentIndex};
use crate::model::{classify_regime, CurveKind, ModelParams, ScaleRegime};
use crate::roots::{bisect, geomspace, hysteresis_crossings, sign_change_brackets};

/// Normalized `|W(a,b,c)|` below which a sampled point is flagged as a cusp.
pub const TAU_CUSP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopePoint {
    pub x: f64,
    pub z: Point,
    pub tangent: Point,
    pub is_cusp: bool,
}

pub fn eval_envelope(p: &ModelParams, kind: CurveKind, x: f64) -> Result<EnvelopePoint> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(x));
    }
    Ok(envelope_point(&LineFamily::new(p, kind), x))
}

fn envelope_point(fam: &LineFamily, x: f64) -> EnvelopePoint {
    EnvelopePoint {
        x,
        z: fam.envelope(x),
        tangent: fam.tangent(x),
        is_cusp: x > 0.0 && fam.w3_normalized(x).abs() < TAU_CUSP,
    }
}

/// Contact point at `x → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Contact {
    Finite(Point),
    /// `η` runs off to infinity along `ℓ_∞` in the given unit direction.
    Asymptote {
        direction: Point,
    },
}

impl Contact {
    pub fn point(&self) -> Option<Point> {
        match self {
            Contact::Finite(p) => Some(*p),
            Contact::Asymptote { .. } => None,
        }
    }
}

/// `(η(0), η(∞))`.
pub fn contact_points(p: &ModelParams, kind: CurveKind) -> Result<(Point, Contact)> {
    let fam = LineFamily::new(p, kind);
    Ok((fam.envelope(0.0), contact_inf(&fam)?))
}

fn contact_inf(fam: &LineFamily) -> Result<Contact> {
    let p = fam.params();
    let xf = fam.x_far();
    match fam.kind() {
        CurveKind::Forward => {
            let (l1, l2) = (p.lambda1(), p.lambda2());
            if classify_regime(p).scale == ScaleRegime::ScaleSeparated {
                let a = fam.envelope(xf);
                let b = fam.envelope(2.0 * xf);
                let d = b.sub(&a);
                let n = d.norm();
                let direction = if n.is_finite() && n > 0.0 {
                    d.scale(1.0 / n)
                } else {
                    Point::new(0.0, 1.0)
                };
                return Ok(Contact::Asymptote { direction });
            }
            // Keep only the exponentials of the closed form that do not decay.
            let d = crate::model::derived_coefficients(p);
            let mut z2 = d.u2;
            let m = 2.0 * l1;
            if (l2 - m).abs() <= crate::model::SCALE_CRITICAL_TOL * l2 {
                let s1 = p.sigma1();
                z2 += s1 * s1 / (2.0 * l1 * l1) * m * (m - l1) / (l2 * (l2 - l1));
            }
            Ok(Contact::Finite(Point::new(d.u1, z2)))
        }
        CurveKind::Yield => {
            let a = fam.envelope(xf);
            let b = fam.envelope(0.5 * xf);
            let gap = a.dist(&b);
            if !a.is_finite() || gap > 1e-8 * (1.0 + a.norm()) {
                return Err(Error::Convergence(format!(
                    "yield envelope moved by {gap:e} between x={} and x={xf}",
                    0.5 * xf
                )));
            }
            Ok(Contact::Finite(a))
        }
    }
}

/// Roots of `W(a, b, c)` on `(0, x_far]`, bracketed on a log grid and refined
/// by bisection.
pub fn find_cusps(p: &ModelParams, kind: CurveKind) -> Vec<EnvelopePoint> {
    cusps_of(&LineFamily::new(p, kind), 2048)
}

fn cusps_of(fam: &LineFamily, n: usize) -> Vec<EnvelopePoint> {
    let xs = geomspace(fam.x_min(), fam.x_far(), n);
    let w: Vec<f64> = xs.iter().map(|&x| fam.w3_normalized(x)).collect();
    sign_change_brackets(&w)
        .into_iter()
        .map(|(i, j)| {
            let x = bisect(|x| fam.w3_normalized(x), xs[i], xs[j], 1e-13);
            EnvelopePoint {
                is_cusp: true,
                ..envelope_point(fam, x)
            }
        })
        .collect()
}

/// Number of sign changes of `W(a, b, c)` on the default grid.
pub fn regression_point_count(p: &ModelParams, kind: CurveKind) -> usize {
    find_cusps(p, kind).len()
}

/// Sampling controls for [`build_augmented`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    /// Geometric base grid on `[x_min, x_far]`.
    pub base_points: usize,
    /// Chord error tolerance relative to the configuration scale.
    pub chord_tol: f64,
    /// Hard cap on body vertices.
    pub max_points: usize,
    /// Asymptotic ends are cut at this multiple of the configuration scale.
    pub clip_factor: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            base_points: 2048,
            chord_tol: 1e-9,
            max_points: 400_000,
            clip_factor: 1e4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineCrossing {
    pub x: f64,
    pub z: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfIntersection {
    pub x1: f64,
    pub x2: f64,
    pub z: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecialPoints {
    pub cusps: Vec<EnvelopePoint>,
    pub self_intersections: Vec<SelfIntersection>,
    pub l0_intersections: Vec<LineCrossing>,
    pub linf_intersections: Vec<LineCrossing>,
    pub contact0: Point,
    pub contact_inf: Contact,
    /// All special points are pairwise distinct.
    pub regular: bool,
}

impl SpecialPoints {
    pub fn s(&self) -> usize {
        self.self_intersections.len()
    }
    pub fn q0(&self) -> usize {
        self.l0_intersections.len()
    }
    pub fn q_inf(&self) -> usize {
        self.linf_intersections.len()
    }
    /// `5 + s + q₀ + q_∞`.
    pub fn expected_regions(&self) -> usize {
        5 + self.s() + self.q0() + self.q_inf()
    }
}

/// The augmented envelope as an oriented closed polyline.
#[derive(Debug, Clone, Serialize)]
pub struct AugmentedEnvelope {
    #[serde(skip)]
    family: LineFamily,
    pub kind: CurveKind,
    /// `M = ℓ₀ ∩ ℓ_∞`.
    pub basepoint: Point,
    pub l0: Line,
    pub linf: Line,
    /// `η(0)` followed by the body samples with strictly increasing `x`.
    pub body: Vec<EnvelopePoint>,
    pub contact_inf: Contact,
    pub asymptotic_end: bool,
    /// For an asymptotic end: the projection of the last body vertex on `ℓ_∞`.
    pub clip_point: Option<Point>,
    /// Closed vertex list `M, η(0), body…, η(∞) or clip point, M`.
    pub polyline: Vec<Point>,
    /// Characteristic size of the configuration (diameter of the special
    /// points including `M`, `η(0)` and a finite `η(∞)`).
    pub scale: f64,
    pub special: SpecialPoints,
}

impl AugmentedEnvelope {
    pub fn family(&self) -> &LineFamily {
        &self.family
    }

    /// Vertices of the envelope curve itself: `η(0)`, the body, and a finite
    /// `η(∞)`. The closing segments along `ℓ₀` and `ℓ_∞` are excluded.
    pub fn curve_points(&self) -> Vec<Point> {
        let mut v: Vec<Point> = self.body.iter().map(|e| e.z).collect();
        if let Contact::Finite(p) = self.contact_inf {
            v.push(p);
        }
        v
    }

    /// Boundary-proximity tolerance `τ_bd`.
    pub fn tau_bd(&self) -> f64 {
        1e-7 * self.scale
    }

    /// Distance below which a body vertex counts as lying on `ℓ₀` or `ℓ_∞`
    /// when counting crossings and reading off sides. Well above rounding in
    /// the signed distances, well below any feature the arrangement resolves.
    pub fn line_eps(&self) -> f64 {
        1e-11 * self.scale
    }

    /// CSV with columns `x, z1, z2, tangent1, tangent2, is_cusp`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,z1,z2,tangent1,tangent2,is_cusp\n");
        for e in &self.body {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                e.x, e.z.z1, e.z.z2, e.tangent.z1, e.tangent.z2, e.is_cusp
            );
        }
        s
    }
}

pub fn build_augmented(
    p: &ModelParams,
    kind: CurveKind,
    grid: &GridSpec,
) -> Result<AugmentedEnvelope> {
    verify_assumptions(p, kind)?;
    let fam = LineFamily::new(p, kind);
    let l0 = fam.limit_line(LimitEnd::Zero)?;
    let linf = fam.limit_line(LimitEnd::Infinity)?;
    let m = l0
        .intersect(&linf)
        .ok_or_else(|| Error::AssumptionViolation {
            which: Assumption::LimitLinesIntersect,
            detail: "l0 and l_inf are parallel".into(),
        })?;
    let eta0 = fam.envelope(0.0);
    let contact = contact_inf(&fam)?;
    let cusps = cusps_of(&fam, grid.base_points);

    let mut anchor = vec![m, eta0];
    if let Some(e) = contact.point() {
        anchor.push(e);
    }
    anchor.extend(cusps.iter().map(|c| c.z));
    let d1 = diameter(&anchor).max(1e-12 * (1.0 + m.norm()));
    let asymptotic = matches!(contact, Contact::Asymptote { .. });
    let r_clip = grid.clip_factor * d1;

    // base grid
    let mut xs = geomspace(fam.x_min(), fam.x_far(), grid.base_points.max(2));
    xs.extend(cusps.iter().map(|c| c.x));
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    let mut pts: Vec<(f64, Point)> = vec![(0.0, eta0)];
    let mut clipped = false;
    for &x in &xs {
        let z = fam.envelope(x);
        if !z.is_finite() {
            clipped = true;
            break;
        }
        pts.push((x, z));
        if asymptotic && z.dist(&m) > r_clip {
            clipped = true;
            break;
        }
    }
    if asymptotic && !clipped {
        let mut x = *xs.last().unwrap();
        for _ in 0..100_000 {
            x *= 1.05;
            let z = fam.envelope(x);
            if !z.is_finite() || !x.is_finite() {
                break;
            }
            pts.push((x, z));
            if z.dist(&m) > r_clip {
                break;
            }
        }
    }

    // chord refinement
    let tol = grid.chord_tol * d1;
    let mut refined: Vec<(f64, Point)> = vec![pts[0]];
    for w in pts.windows(2) {
        subdivide(&fam, w[0], w[1], tol, 0, grid.max_points, &mut refined);
    }

    let cusp_xs: Vec<f64> = cusps.iter().map(|c| c.x).collect();
    let min_gap = 1e-12 * d1;
    let mut body: Vec<EnvelopePoint> = Vec::with_capacity(refined.len());
    for (x, z) in refined {
        let is_root = cusp_xs.contains(&x);
        if let Some(last) = body.last() {
            if !is_root && last.z.dist(&z) < min_gap {
                continue;
            }
        }
        let mut e = if x == 0.0 {
            EnvelopePoint {
                x,
                z,
                tangent: fam.tangent(0.0),
                is_cusp: false,
            }
        } else {
            envelope_point(&fam, x)
        };
        e.z = z;
        e.is_cusp |= is_root;
        body.push(e);
    }

    let clip_point = if asymptotic {
        Some(linf.project(&body.last().unwrap().z))
    } else {
        None
    };
    let mut polyline = Vec::with_capacity(body.len() + 4);
    polyline.push(m);
    polyline.extend(body.iter().map(|e| e.z));
    match (contact, clip_point) {
        (Contact::Finite(e), _) => polyline.push(e),
        (_, Some(c)) => polyline.push(c),
        _ => {}
    }
    polyline.push(m);

    let mut env = AugmentedEnvelope {
        family: fam,
        kind,
        basepoint: m,
        l0,
        linf,
        body,
        contact_inf: contact,
        asymptotic_end: asymptotic,
        clip_point,
        polyline,
        scale: d1,
        special: SpecialPoints {
            cusps,
            self_intersections: vec![],
            l0_intersections: vec![],
            linf_intersections: vec![],
            contact0: eta0,
            contact_inf: contact,
            regular: true,
        },
    };
    env.special = find_special_points(&env);
    let all = special_point_list(&env.special, m);
    env.scale = diameter(&all).max(d1);
    Ok(env)
}

fn subdivide(
    fam: &LineFamily,
    a: (f64, Point),
    b: (f64, Point),
    tol: f64,
    depth: u32,
    max_points: usize,
    out: &mut Vec<(f64, Point)>,
) {
    let xm = if a.0 == 0.0 {
        0.5 * b.0
    } else {
        (a.0 * b.0).sqrt()
    };
    if depth < 40 && out.len() < max_points && xm > a.0 && xm < b.0 {
        let zm = fam.envelope(xm);
        if zm.is_finite() && point_segment_distance(&zm, &a.1, &b.1) > tol {
            subdivide(fam, a, (xm, zm), tol, depth + 1, max_points, out);
            subdivide(fam, (xm, zm), b, tol, depth + 1, max_points, out);
            return;
        }
    }
    out.push(b);
}

fn special_point_list(sp: &SpecialPoints, m: Point) -> Vec<Point> {
    let mut v = vec![m, sp.contact0];
    if let Some(e) = sp.contact_inf.point() {
        v.push(e);
    }
    v.extend(sp.cusps.iter().map(|c| c.z));
    v.extend(sp.self_intersections.iter().map(|s| s.z));
    v.extend(sp.l0_intersections.iter().map(|s| s.z));
    v.extend(sp.linf_intersections.iter().map(|s| s.z));
    v
}

/// Crossings of the body with a line, found as sign changes of the signed
/// distance with hysteresis `eps`, refined by bisection in `x`.
fn line_crossings(
    fam: &LineFamily,
    body: &[EnvelopePoint],
    line: &Line,
    eps: f64,
) -> Vec<LineCrossing> {
    let d: Vec<f64> = body.iter().map(|e| line.signed_distance(&e.z)).collect();
    hysteresis_crossings(&d, eps)
        .into_iter()
        .map(|(i, j)| {
            let x = bisect(|x| line.eval(&fam.envelope(x)), body[i].x, body[j].x, 1e-14);
            LineCrossing {
                x,
                z: fam.envelope(x),
            }
        })
        .collect()
}

/// Sign of the signed distance to `line` at the first (or last) body vertex
/// that is farther than `eps` from it.
pub fn side_near_end(env: &AugmentedEnvelope, line: &Line, from_start: bool) -> f64 {
    let eps = env.line_eps();
    let it: Box<dyn Iterator<Item = &EnvelopePoint>> = if from_start {
        Box::new(env.body.iter())
    } else {
        Box::new(env.body.iter().rev())
    };
    for e in it {
        let d = line.signed_distance(&e.z);
        if d.abs() > eps {
            return d.signum();
        }
    }
    0.0
}

pub fn find_special_points(env: &AugmentedEnvelope) -> SpecialPoints {
    let fam = &env.family;
    let eps = env.line_eps();
    let l0_intersections = line_crossings(fam, &env.body, &env.l0, eps);
    let linf_intersections = line_crossings(fam, &env.body, &env.linf, eps);
    let self_intersections = self_intersections(&env.body, env.scale);
    let mut sp = SpecialPoints {
        cusps: env.special.cusps.clone(),
        self_intersections,
        l0_intersections,
        linf_intersections,
        contact0: env.body[0].z,
        contact_inf: env.contact_inf,
        regular: true,
    };
    let pts = special_point_list(&sp, env.basepoint);
    let tol = 1e-6 * env.scale;
    'outer: for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            if a.dist(b) <= tol {
                sp.regular = false;
                break 'outer;
            }
        }
    }
    sp
}

/// Proper crossings between non-adjacent body segments, found through the
/// hierarchical segment index.
fn self_intersections(body: &[EnvelopePoint], scale: f64) -> Vec<SelfIntersection> {
    let n = body.len();
    if n < 4 {
        return vec![];
    }
    let pts: Vec<Point> = body.iter().map(|e| e.z).collect();
    let index = SegmentIndex::new(&pts, scale / 256.0);
    let mut pairs: Vec<(usize, usize)> = (0..n - 1)
        .into_par_iter()
        .flat_map_iter(|i| {
            index
                .crossing_segments(&pts[i], &pts[i + 1])
                .into_iter()
                .map(|j| j as usize)
                .filter(move |&j| j > i + 1)
                .map(move |j| (i, j))
        })
        .collect();
    pairs.sort_unstable();
    let mut out = Vec::new();
    for (i, j) in pairs {
        let (p1, p2, q1, q2) = (&pts[i], &pts[i + 1], &pts[j], &pts[j + 1]);
        if let Some((s, t, z)) = segment_intersection(p1, p2, q1, q2) {
            out.push(SelfIntersection {
                x1: body[i].x + s * (body[i + 1].x - body[i].x),
                x2: body[j].x + t * (body[j + 1].x - body[j].x),
                z,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets;

    #[test]
    fn p1_forward_contact_points() {
        let p = presets::proximal_positive();
        let (e0, einf) = contact_points(&p, CurveKind::Forward).unwrap();
        assert!(e0.dist(&Point::new(-6.0, 4.0)) < 1e-13);
        let e = einf.point().unwrap();
        assert!(e.dist(&Point::new(-4.0 / 3.0, -7.0 / 9.0)) < 1e-14);
        // numeric limit agrees with the closed form
        let fam = LineFamily::new(&p, CurveKind::Forward);
        assert!(fam.envelope(fam.x_far()).dist(&e) < 1e-12);
    }

    #[test]
    fn start_point_matches_closed_form() {
        // η_f(0) = θ + (σ₁² + σ₂² + 2ρσ₁σ₂)/(λ_i(λ_i − λ_j))
        for p in [
            presets::separated(),
            presets::proximal_negative(),
            presets::anticorrelated(),
        ] {
            let (l1, l2) = (p.lambda1(), p.lambda2());
            let s =
                p.sigma1().powi(2) + p.sigma2().powi(2) + 2.0 * p.rho() * p.sigma1() * p.sigma2();
            let expect = Point::new(
                p.theta1() + s / (l1 * (l1 - l2)),
                p.theta2() + s / (l2 * (l2 - l1)),
            );
            let (e0, _) = contact_points(&p, CurveKind::Forward).unwrap();
            assert!(e0.dist(&expect) < 1e-12 * (1.0 + expect.norm()));
            let (y0, _) = contact_points(&p, CurveKind::Yield).unwrap();
            assert!(y0.dist(&expect) < 1e-10 * (1.0 + expect.norm()));
        }
    }

    #[test]
    fn envelope_points_solve_the_defining_system() {
        for p in [
            presets::proximal_positive(),
            presets::separated(),
            presets::proximal_negative(),
        ] {
            for kind in [CurveKind::Forward, CurveKind::Yield] {
                for &x in &[0.01, 0.3, 1.0, 2.5, 7.0] {
                    let e = eval_envelope(&p, kind, x).unwrap();
                    let ce = crate::coeffs::eval_coeffs(&p, kind, x).unwrap();
                    for d in 0..2 {
                        let r = ce.row(d);
                        let res = r[0] + r[1] * e.z.z1 + r[2] * e.z.z2;
                        let scale =
                            r[0].abs() + r[1].abs() * e.z.z1.abs() + r[2].abs() * e.z.z2.abs();
                        assert!(res.abs() <= 1e-10 * scale, "{kind} x={x} d={d}");
                    }
                }
            }
        }
    }

    #[test]
    fn tangent_matches_finite_differences_and_line_direction() {
        for p in [
            presets::proximal_positive(),
            presets::separated(),
            presets::proximal_negative(),
        ] {
            for kind in [CurveKind::Forward, CurveKind::Yield] {
                for &x in &[0.05, 0.4, 1.3, 3.0, 9.0] {
                    let fam = LineFamily::new(&p, kind);
                    let h = 1e-5 * x;
                    let fd = fam.envelope(x + h).sub(&fam.envelope(x - h)).scale(0.5 / h);
                    let t = fam.tangent(x);
                    assert!(
                        fd.dist(&t) <= 1e-6 * (t.norm() + 1e-9),
                        "{kind} x={x}: {fd:?} vs {t:?}"
                    );
                    // parallel to (c, -b)
                    let l = fam.line(x);
                    let cross = t.z1 * l.beta1 + t.z2 * l.beta2;
                    assert!(cross.abs() <= 1e-9 * t.norm().max(1e-300));
                }
            }
        }
    }

    #[test]
    fn tangent_equals_wronskian_quotient() {
        let p = presets::proximal_negative();
        for kind in [CurveKind::Forward, CurveKind::Yield] {
            for &x in &[0.2, 1.0, 2.0] {
                let ce = crate::coeffs::eval_coeffs(&p, kind, x).unwrap();
                let w2 = crate::coeffs::wronskian2(&p, kind, x).unwrap();
                let w3 = crate::coeffs::wronskian3(&p, kind, x).unwrap();
                let t = LineFamily::new(&p, kind).tangent(x);
                let k = w3 / (w2 * w2);
                let expect = Point::new(k * ce.c, -k * ce.b);
                assert!(t.dist(&expect) <= 1e-8 * expect.norm(), "{kind} x={x}");
            }
        }
    }

    #[test]
    fn cusp_counts_for_fixtures() {
        assert!(find_cusps(&presets::proximal_positive(), CurveKind::Forward).is_empty());
        assert_eq!(
            find_cusps(&presets::separated(), CurveKind::Forward).len(),
            1
        );
        assert_eq!(
            find_cusps(&presets::proximal_negative(), CurveKind::Forward).len(),
            2
        );
    }

    #[test]
    fn yield_cusps_lie_on_forward_envelope() {
        for p in [presets::separated(), presets::proximal_negative()] {
            let ff = LineFamily::new(&p, CurveKind::Forward);
            let fwd = geomspace(1e-6, ff.x_far(), 20000);
            for c in find_cusps(&p, CurveKind::Yield) {
                let d = fwd
                    .iter()
                    .map(|&x| ff.envelope(x).dist(&c.z))
                    .fold(f64::INFINITY, f64::min);
                // dense sampling bound; refine around the best sample
                assert!(d < 1e-3, "distance {d}");
            }
        }
    }

    #[test]
    fn p1_augmented_envelope() {
        let env = build_augmented(
            &presets::proximal_positive(),
            CurveKind::Forward,
            &GridSpec::default(),
        )
        .unwrap();
        assert!(env.basepoint.dist(&Point::new(-4.0 / 3.0, 8.0 / 9.0)) < 1e-14);
        assert_eq!(env.polyline.first(), env.polyline.last());
        assert!(!env.asymptotic_end);
        assert!(env.body.windows(2).all(|w| w[1].x > w[0].x));
        let sp = &env.special;
        assert_eq!((sp.cusps.len(), sp.s(), sp.q0(), sp.q_inf()), (0, 0, 0, 0));
        assert!(sp.regular);
    }

    #[test]
    fn p2_augmented_envelope() {
        let env = build_augmented(
            &presets::separated(),
            CurveKind::Forward,
            &GridSpec::default(),
        )
        .unwrap();
        assert!(env.asymptotic_end);
        let sp = &env.special;
        assert_eq!((sp.cusps.len(), sp.s(), sp.q0(), sp.q_inf()), (1, 0, 1, 1));
        let yenv = build_augmented(
            &presets::separated(),
            CurveKind::Yield,
            &GridSpec::default(),
        )
        .unwrap();
        assert!(!yenv.asymptotic_end);
    }

    #[test]
    fn p3_augmented_envelope() {
        let env = build_augmented(
            &presets::proximal_negative(),
            CurveKind::Forward,
            &GridSpec::default(),
        )
        .unwrap();
        let sp = &env.special;
        assert_eq!((sp.cusps.len(), sp.s(), sp.q0(), sp.q_inf()), (2, 1, 2, 2));
        assert!(sp.regular);
    }

    #[test]
    fn body_vertices_are_on_their_lines() {
        let env = build_augmented(
            &presets::proximal_negative(),
            CurveKind::Yield,
            &GridSpec::default(),
        )
        .unwrap();
        let fam = env.family();
        for e in env.body.iter().skip(1).step_by(97) {
            let l = fam.line(e.x);
            assert!(l.eval(&e.z).abs() < 1e-9 * (1.0 + e.z.norm()));
        }
    }
}

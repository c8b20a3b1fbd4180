//! Decomposition of the state space into constant-shape regions: start and
//! end rays of the envelope, the configuration descriptor and its matching
//! against the catalogue of admissible configurations, the region map and
//! the transition graph between shapes.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::arrangement::Arrangement;
use crate::classify::{Classifier, Quadrant, ShapeLabel};
use crate::envelope::{side_near_end, AugmentedEnvelope, Contact};
use crate::error::{Error, Result};
use crate::geom::{BBox, Point};
use crate::model::{classify_regime, CurveKind, ModelParams, Regime, RhoSign, ScaleRegime};

/// Half-lines of `ℓ₀` and `ℓ_∞` emanating from `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Ray {
    #[serde(rename = "r_nd")]
    Nd,
    #[serde(rename = "r_ih")]
    Ih,
    #[serde(rename = "r_id")]
    Id,
    #[serde(rename = "r_nh")]
    Nh,
}

impl fmt::Display for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ray::Nd => "r_nd",
            Ray::Ih => "r_ih",
            Ray::Id => "r_id",
            Ray::Nh => "r_nh",
        })
    }
}

/// Closed-form start and end conditions, evaluated for cross-checking.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormPredicates {
    /// Start on `r_nd` iff this is `≥ 0`.
    pub start_comp: f64,
    /// Move into `ℓ₀⁺` iff this is `> 0`.
    pub dir_start: f64,
    /// End on `r_nh` iff this is `> 0` (scale-proximal forward, and yield).
    pub end_comp: f64,
    pub start_ray: Ray,
    pub moves_positive: bool,
    /// `None` where no closed-form end condition applies.
    pub end_ray: Option<Ray>,
}

pub fn closed_form_predicates(p: &ModelParams, kind: CurveKind) -> ClosedFormPredicates {
    let (l1, l2) = (p.lambda1(), p.lambda2());
    let (s1, s2) = (p.sigma1() * p.sigma1(), p.sigma2() * p.sigma2());
    let rs = p.rho() * p.sigma1() * p.sigma2();
    let start_comp = match kind {
        CurveKind::Forward => s1 * (2.0 * l1 - l2) / l1 + rs * (l1 + l2) / l2 + s2,
        CurveKind::Yield => {
            s1 * (4.0 * l1 * l1 + 4.0 * l1 * l2 - 3.0 * l2 * l2) / (4.0 * l1 * l1)
                + rs / (l1 * l2) * (l2.powi(3) + 3.0 * l1 * l2 * l2 + l1 * l1 * l2) / (l1 + l2)
                + s2 * (4.0 * l2 * l2 + 4.0 * l1 * l2 - 3.0 * l1 * l1) / (4.0 * l1 * l2)
        }
    };
    let dir_start = s1 * (2.0 * l1 - l2) + rs * (l1 + l2) + s2 * (2.0 * l2 - l1);
    let end_comp = s1 / l1 + rs * (l1 + l2) / (l1 * l2) + s2 / l2;
    let scale = classify_regime(p).scale;
    let end_ray = match (kind, scale) {
        (CurveKind::Forward, ScaleRegime::ScaleSeparated) => Some(Ray::Id),
        (CurveKind::Forward, ScaleRegime::ScaleCritical) => None,
        // the catalogue has separated yield envelopes ending on either ray
        (CurveKind::Yield, ScaleRegime::ScaleSeparated) => None,
        _ => Some(if end_comp > 0.0 { Ray::Nh } else { Ray::Id }),
    };
    ClosedFormPredicates {
        start_comp,
        dir_start,
        end_comp,
        start_ray: if start_comp >= 0.0 { Ray::Nd } else { Ray::Ih },
        moves_positive: dir_start > 0.0,
        end_ray,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StartEnd {
    pub start_ray: Ray,
    pub start_quadrant: Quadrant,
    pub end_ray: Ray,
    pub end_quadrant: Quadrant,
    pub closed_form: ClosedFormPredicates,
    /// The numeric predicates agree with the closed forms wherever those
    /// apply and are not degenerate.
    pub closed_form_agrees: bool,
    /// A closed-form inequality is within rounding of zero; the numeric
    /// predicate is reported.
    pub degenerate: bool,
}

/// First (or last) body vertex that is clear of both limit lines.
fn quadrant_near_end(env: &AugmentedEnvelope, from_start: bool) -> Quadrant {
    let eps = env.line_eps();
    let pick = |e: &&crate::envelope::EnvelopePoint| {
        env.l0.signed_distance(&e.z).abs() > eps && env.linf.signed_distance(&e.z).abs() > eps
    };
    let found = if from_start {
        env.body.iter().find(pick)
    } else {
        env.body.iter().rev().find(pick)
    };
    match found {
        Some(e) => Quadrant::from_sides(
            env.l0.signed_distance(&e.z) > 0.0,
            env.linf.signed_distance(&e.z) > 0.0,
        ),
        None => Quadrant::OnBoundary,
    }
}

pub fn predicates_from_envelope(env: &AugmentedEnvelope) -> StartEnd {
    let p = env.family().params();
    let closed_form = closed_form_predicates(p, env.kind);
    let eta0 = env.body[0].z;
    let start_ray = if env.linf.signed_distance(&eta0) >= -env.line_eps() {
        Ray::Nd
    } else {
        Ray::Ih
    };
    let start_quadrant = quadrant_near_end(env, true);
    let end_point = match env.contact_inf {
        Contact::Finite(e) => e,
        Contact::Asymptote { .. } => env.body.last().unwrap().z,
    };
    let end_ray = if env.l0.signed_distance(&end_point) > 0.0 {
        Ray::Nh
    } else {
        Ray::Id
    };
    let end_quadrant = quadrant_near_end(env, false);

    let tiny = |v: f64, scale: f64| v.abs() <= 1e-9 * scale;
    let (l1, l2) = (p.lambda1(), p.lambda2());
    let var = p.sigma1().powi(2) + p.sigma2().powi(2);
    let degenerate = tiny(closed_form.start_comp, var * (1.0 + l2 / l1))
        || tiny(closed_form.dir_start, var * (l1 + l2))
        || tiny(closed_form.end_comp, var / l1);
    let moves_positive = side_near_end(env, &env.l0, true) > 0.0;
    let agrees = degenerate
        || (closed_form.start_ray == start_ray
            && closed_form.moves_positive == moves_positive
            && closed_form.end_ray.is_none_or(|r| r == end_ray));
    StartEnd {
        start_ray,
        start_quadrant,
        end_ray,
        end_quadrant,
        closed_form,
        closed_form_agrees: agrees,
        degenerate,
    }
}

pub fn start_end_predicates(p: &ModelParams, kind: CurveKind) -> Result<StartEnd> {
    let c = Classifier::new(p, kind)?;
    Ok(predicates_from_envelope(c.envelope()))
}

/// Regime column of the catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegimeGroup {
    ProximalNonNegative,
    CriticalNonNegative,
    Separated,
    CriticalNegative,
    ProximalNegative,
}

impl RegimeGroup {
    pub fn of(r: Regime) -> RegimeGroup {
        match (r.scale, r.rho_sign) {
            (ScaleRegime::ScaleSeparated, _) => RegimeGroup::Separated,
            (ScaleRegime::ScaleProximal, RhoSign::NonNegative) => RegimeGroup::ProximalNonNegative,
            (ScaleRegime::ScaleProximal, RhoSign::Negative) => RegimeGroup::ProximalNegative,
            (ScaleRegime::ScaleCritical, RhoSign::NonNegative) => RegimeGroup::CriticalNonNegative,
            (ScaleRegime::ScaleCritical, RhoSign::Negative) => RegimeGroup::CriticalNegative,
        }
    }
}

impl std::fmt::Display for RegimeGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RegimeGroup::ProximalNonNegative => "scale-proximal with rho >= 0",
            RegimeGroup::CriticalNonNegative => "scale-critical with rho >= 0",
            RegimeGroup::Separated => "scale-separated",
            RegimeGroup::CriticalNegative => "scale-critical with rho < 0",
            RegimeGroup::ProximalNegative => "scale-proximal with rho < 0",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Attainable {
    Yes,
    No,
    Unknown,
}

/// One row of the catalogue of admissible configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatalogueRow {
    /// 1-based position in the catalogue.
    pub index: usize,
    pub regime: RegimeGroup,
    pub start_ray: Ray,
    pub moves_into: Quadrant,
    pub end_ray: Ray,
    pub exits_from: Quadrant,
    pub cusps: usize,
    pub self_intersections: usize,
    pub l0_crossings: usize,
    pub linf_crossings: usize,
    /// `η(∞)` is asymptotic for the forward curve.
    pub asymptotic_forward: bool,
    /// Shapes besides `n`, `d`, `i`, `h`.
    pub extra_shapes: &'static [&'static str],
    pub forward: Attainable,
    pub yield_: Attainable,
    /// Two non-isomorphic transition graphs exist for this row.
    pub two_graphs: bool,
}

impl CatalogueRow {
    pub fn region_count(&self) -> usize {
        5 + self.self_intersections + self.l0_crossings + self.linf_crossings
    }

    pub fn attainable(&self, kind: CurveKind) -> Attainable {
        match kind {
            CurveKind::Forward => self.forward,
            CurveKind::Yield => self.yield_,
        }
    }
}

macro_rules! row {
    ($i:expr, $g:ident, $sr:ident, $mi:ident, $er:ident, $ef:ident, $c:expr, $s:expr, $q0:expr, $qi:expr,
     $asym:expr, [$($sh:expr),*], $f:ident, $y:ident, $two:expr) => {
        CatalogueRow {
            index: $i,
            regime: RegimeGroup::$g,
            start_ray: Ray::$sr,
            moves_into: Quadrant::$mi,
            end_ray: Ray::$er,
            exits_from: Quadrant::$ef,
            cusps: $c,
            self_intersections: $s,
            l0_crossings: $q0,
            linf_crossings: $qi,
            asymptotic_forward: $asym,
            extra_shapes: &[$($sh),*],
            forward: Attainable::$f,
            yield_: Attainable::$y,
            two_graphs: $two,
        }
    };
}

/// All admissible configurations.
pub const CATALOGUE: [CatalogueRow; 26] = [
    row!(
        1,
        ProximalNonNegative,
        Nd,
        Qn,
        Nh,
        Qn,
        0,
        0,
        0,
        0,
        false,
        ["hd"],
        Yes,
        Yes,
        false
    ),
    row!(
        2,
        CriticalNonNegative,
        Nd,
        Qn,
        Nh,
        Qn,
        0,
        0,
        0,
        0,
        false,
        ["hd"],
        Yes,
        Yes,
        false
    ),
    row!(
        3,
        Separated,
        Ih,
        Qi,
        Id,
        Qi,
        0,
        0,
        0,
        0,
        true,
        ["dh"],
        Yes,
        Yes,
        false
    ),
    row!(
        4,
        Separated,
        Ih,
        Qh,
        Id,
        Qi,
        1,
        0,
        1,
        0,
        true,
        ["dh", "hdh"],
        Yes,
        Yes,
        false
    ),
    row!(
        5,
        Separated,
        Nd,
        Qn,
        Id,
        Qi,
        1,
        0,
        1,
        1,
        true,
        ["hd", "dh", "hdh"],
        Yes,
        Yes,
        false
    ),
    row!(
        6,
        Separated,
        Nd,
        Qn,
        Nh,
        Qh,
        1,
        0,
        0,
        1,
        false,
        ["hd", "hdh"],
        No,
        Yes,
        false
    ),
    row!(
        7,
        CriticalNegative,
        Ih,
        Qi,
        Id,
        Qi,
        0,
        0,
        0,
        0,
        false,
        ["dh"],
        Yes,
        Yes,
        false
    ),
    row!(
        8,
        CriticalNegative,
        Ih,
        Qh,
        Id,
        Qi,
        1,
        0,
        1,
        0,
        false,
        ["dh", "hdh"],
        Yes,
        Yes,
        false
    ),
    row!(
        9,
        CriticalNegative,
        Nd,
        Qn,
        Id,
        Qi,
        1,
        0,
        1,
        1,
        false,
        ["hd", "dh", "hdh"],
        Yes,
        Yes,
        false
    ),
    row!(
        10,
        CriticalNegative,
        Nd,
        Qn,
        Nh,
        Qh,
        1,
        0,
        1,
        1,
        false,
        ["hd", "hdh"],
        Yes,
        Yes,
        false
    ),
    row!(
        11,
        CriticalNegative,
        Nd,
        Qn,
        Nh,
        Qn,
        0,
        0,
        0,
        0,
        false,
        ["hd"],
        No,
        Yes,
        false
    ),
    row!(
        12,
        ProximalNegative,
        Nd,
        Qd,
        Nh,
        Qn,
        1,
        0,
        1,
        0,
        false,
        ["hd", "dhd"],
        Yes,
        Unknown,
        false
    ),
    row!(
        13,
        ProximalNegative,
        Ih,
        Qi,
        Nh,
        Qn,
        1,
        0,
        1,
        1,
        false,
        ["hd", "dh", "dhd"],
        Yes,
        Unknown,
        false
    ),
    row!(
        14,
        ProximalNegative,
        Ih,
        Qi,
        Id,
        Qd,
        1,
        0,
        0,
        1,
        false,
        ["dh", "dhd"],
        Unknown,
        Yes,
        false
    ),
    row!(
        15,
        ProximalNegative,
        Nd,
        Qn,
        Id,
        Qd,
        2,
        0,
        1,
        2,
        false,
        ["hd", "dh", "hdh", "dhd"],
        Yes,
        Unknown,
        false
    ),
    row!(
        16,
        ProximalNegative,
        Ih,
        Qh,
        Id,
        Qd,
        2,
        0,
        1,
        1,
        false,
        ["dh", "hdh", "dhd"],
        Yes,
        Yes,
        false
    ),
    row!(
        17,
        ProximalNegative,
        Ih,
        Qh,
        Nh,
        Qn,
        2,
        0,
        2,
        1,
        false,
        ["hd", "dh", "hdh", "dhd"],
        Yes,
        Unknown,
        false
    ),
    row!(
        18,
        ProximalNegative,
        Nd,
        Qn,
        Nh,
        Qn,
        0,
        0,
        0,
        0,
        false,
        ["hd"],
        Unknown,
        Unknown,
        false
    ),
    row!(
        19,
        ProximalNegative,
        Nd,
        Qn,
        Nh,
        Qn,
        2,
        1,
        0,
        0,
        false,
        ["hd", "hdhd"],
        Unknown,
        Unknown,
        false
    ),
    row!(
        20,
        ProximalNegative,
        Nd,
        Qn,
        Nh,
        Qn,
        2,
        1,
        2,
        0,
        false,
        ["hd", "dhd", "hdhd"],
        Unknown,
        Unknown,
        false
    ),
    row!(
        21,
        ProximalNegative,
        Nd,
        Qn,
        Nh,
        Qn,
        2,
        0,
        0,
        2,
        false,
        ["hd", "dhd", "hdhd"],
        Unknown,
        Unknown,
        false
    ),
    row!(
        22,
        ProximalNegative,
        Nd,
        Qn,
        Nh,
        Qn,
        2,
        1,
        0,
        2,
        false,
        ["hd", "hdh", "hdhd"],
        Unknown,
        Unknown,
        false
    ),
    row!(
        23,
        ProximalNegative,
        Nd,
        Qn,
        Nh,
        Qn,
        2,
        0,
        2,
        2,
        false,
        ["hd", "hdh", "dhd", "hdhd"],
        Unknown,
        Unknown,
        true
    ),
    row!(
        24,
        ProximalNegative,
        Nd,
        Qn,
        Nh,
        Qn,
        2,
        0,
        2,
        2,
        false,
        ["hd", "dh", "hdh", "dhd", "hdhd"],
        Unknown,
        Unknown,
        true
    ),
    row!(
        25,
        ProximalNegative,
        Nd,
        Qn,
        Nh,
        Qn,
        2,
        1,
        2,
        2,
        false,
        ["hd", "hdh", "dhd", "hdhd"],
        Unknown,
        Unknown,
        false
    ),
    row!(
        26,
        ProximalNegative,
        Nd,
        Qn,
        Nh,
        Qn,
        2,
        1,
        2,
        2,
        false,
        ["hd", "dh", "hdh", "dhd", "hdhd"],
        Unknown,
        Unknown,
        false
    ),
];

/// Transition graphs known for catalogue rows, as label edges.
/// Reference transition graph for a catalogue row. The graphs of the rows
/// with an asymptotic forward end gain the edge between `d` and `i` across
/// the part of `r_id` beyond a finite `η(∞)`.
pub fn expected_graph(row: usize, asymptotic_end: bool) -> Option<TransitionGraph> {
    const PROXIMAL: &[(&str, &str)] = &[
        ("hd", "n"),
        ("hd", "d"),
        ("hd", "h"),
        ("n", "d"),
        ("d", "i"),
        ("i", "h"),
        ("h", "n"),
    ];
    const SEPARATED_1: &[(&str, &str)] = &[
        ("dh", "i"),
        ("dh", "d"),
        ("dh", "h"),
        ("n", "d"),
        ("i", "h"),
        ("h", "n"),
    ];
    const SEPARATED_3: &[(&str, &str)] = &[
        ("hd", "d"),
        ("n", "d"),
        ("i", "h"),
        ("h", "n"),
        ("hd", "hdh"),
        ("hdh", "h"),
        ("hdh", "dh"),
        ("d", "dh"),
        ("i", "dh"),
        ("hd", "n"),
    ];
    let edges = match row {
        1 | 2 => PROXIMAL,
        3 => SEPARATED_1,
        5 => SEPARATED_3,
        _ => return None,
    };
    let mut edges = edges.to_vec();
    if CATALOGUE[row - 1].asymptotic_forward && !asymptotic_end {
        edges.push(("d", "i"));
    }
    Some(TransitionGraph::from_label_edges(&edges))
}

fn base_shapes() -> [ShapeLabel; 4] {
    [
        ShapeLabel::new(true, 0),
        ShapeLabel::new(false, 0),
        ShapeLabel::new(true, 1),
        ShapeLabel::new(false, 1),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub id: usize,
    pub label: ShapeLabel,
    pub representative: Point,
    /// Fraction of the map area.
    pub area_share: f64,
    pub unbounded: bool,
    /// Closed boundary, counter-clockwise.
    #[serde(skip)]
    pub boundary: Vec<Point>,
}

/// Decomposition of the plane into constant-shape regions, with a raster of
/// labels over a bounding box for plotting and export.
#[derive(Debug, Clone, Serialize)]
pub struct RegionMap {
    pub bbox: BBox,
    pub nx: usize,
    pub ny: usize,
    /// Label per cell in row-major order (`y` outer), `None` for cells
    /// whose centre is on the boundary.
    #[serde(skip)]
    pub raster: Vec<Option<ShapeLabel>>,
    pub regions: Vec<Region>,
    /// Pairs of region ids sharing a piece of the envelope or a limit line.
    pub adjacency: BTreeSet<(usize, usize)>,
}

impl RegionMap {
    pub fn cell_center(&self, i: usize, j: usize) -> Point {
        let dx = self.bbox.width() / self.nx as f64;
        let dy = self.bbox.height() / self.ny as f64;
        Point::new(
            self.bbox.min.z1 + (i as f64 + 0.5) * dx,
            self.bbox.min.z2 + (j as f64 + 0.5) * dy,
        )
    }

    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    pub fn labels(&self) -> BTreeSet<ShapeLabel> {
        self.regions.iter().map(|r| r.label).collect()
    }

    pub fn label_at(&self, i: usize, j: usize) -> Option<ShapeLabel> {
        self.raster[j * self.nx + i]
    }

    /// CSV rows `z1,z2,label` for every `stride`-th cell in each direction.
    pub fn to_csv(&self, stride: usize) -> String {
        let stride = stride.max(1);
        let mut s = String::from("z1,z2,label\n");
        for j in (0..self.ny).step_by(stride) {
            for i in (0..self.nx).step_by(stride) {
                let z = self.cell_center(i, j);
                let label = self
                    .label_at(i, j)
                    .map(|l| l.code())
                    .unwrap_or_else(|| "boundary".into());
                s.push_str(&format!("{:.16e},{:.16e},{}\n", z.z1, z.z2, label));
            }
        }
        s
    }
}

/// Default map extent: the special points and the part of the envelope near
/// them, inflated by 50%.
pub fn default_bbox(env: &AugmentedEnvelope) -> BBox {
    let sp = &env.special;
    let mut pts = vec![env.basepoint, sp.contact0];
    if let Some(e) = sp.contact_inf.point() {
        pts.push(e);
    }
    pts.extend(sp.cusps.iter().map(|c| c.z));
    pts.extend(sp.self_intersections.iter().map(|c| c.z));
    pts.extend(sp.l0_intersections.iter().map(|c| c.z));
    pts.extend(sp.linf_intersections.iter().map(|c| c.z));
    let d = crate::geom::diameter(&pts).max(1e-12);
    let m = env.basepoint;
    pts.extend(
        env.body
            .iter()
            .map(|e| e.z)
            .filter(|z| z.dist(&m) <= 2.0 * d),
    );
    let bb = BBox::from_points(&pts).unwrap();
    bb.inflate(0.5, 0.05 * d)
}

/// Label every cell centre of a `nx × ny` raster over `bbox`.
pub fn label_raster(c: &Classifier, bbox: &BBox, nx: usize, ny: usize) -> Vec<Option<ShapeLabel>> {
    let dx = bbox.width() / nx as f64;
    let dy = bbox.height() / ny as f64;
    (0..ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let y = bbox.min.z2 + (j as f64 + 0.5) * dy;
            let cr = c.row_crossings(y);
            let mut out = vec![None; nx];
            let mut k = cr.len();
            let mut w = 0;
            for i in (0..nx).rev() {
                let x = bbox.min.z1 + (i as f64 + 0.5) * dx;
                while k > 0 && cr[k - 1].0 > x {
                    k -= 1;
                    w += cr[k].1;
                }
                let z = Point::new(x, y);
                if !c.is_boundary(&z) {
                    out[i] = c.with_winding(&z, w).ok().map(|r| r.label);
                }
            }
            out
        })
        .collect()
}

/// Regions from the planar arrangement of the envelope and the limit lines,
/// plus a `resolution × resolution` label raster over `bbox`.
pub fn region_map(c: &Classifier, bbox: BBox, resolution: usize) -> Result<RegionMap> {
    let (nx, ny) = (resolution.max(2), resolution.max(2));
    let env = c.envelope();
    let arr = Arrangement::new(env)?;
    let (l0, li) = (c.l0(), c.linf());
    let curve = c.curve_index();
    // clearance saturates at a couple of index cells
    let reach = env.scale / 256.0;
    let clearance = |z: &Point| {
        l0.signed_distance(z)
            .abs()
            .min(li.signed_distance(z).abs())
            .min(curve.distance_within(z, reach))
            .min(reach)
    };
    let regions = (0..arr.faces.len())
        .into_par_iter()
        .map(|f| {
            let z = arr.interior_point(f, clearance).ok_or_else(|| {
                Error::Convergence(format!("no interior point found for face {f}"))
            })?;
            let label = c.with_winding(&z, c.winding_unchecked(&z))?.label;
            Ok(Region {
                id: f,
                label,
                representative: z,
                area_share: arr.area_share(f, &bbox),
                unbounded: arr.faces[f].unbounded,
                boundary: arr.faces[f].boundary.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionMap {
        bbox,
        nx,
        ny,
        raster: label_raster(c, &bbox, nx, ny),
        regions,
        adjacency: arr.adjacency().into_iter().collect(),
    })
}

/// Regions as vertices, labelled by shape; edges join regions that share a
/// boundary curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionGraph {
    pub vertices: Vec<ShapeLabel>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl TransitionGraph {
    /// Graph with one vertex per distinct label.
    pub fn from_label_edges(edges: &[(&str, &str)]) -> Self {
        let mut vertices: Vec<ShapeLabel> = Vec::new();
        let mut id = |s: &str| {
            let l = ShapeLabel::parse(s).expect("valid shape code");
            match vertices.iter().position(|v| *v == l) {
                Some(k) => k,
                None => {
                    vertices.push(l);
                    vertices.len() - 1
                }
            }
        };
        let e: BTreeSet<(usize, usize)> = edges
            .iter()
            .map(|(a, b)| {
                let (a, b) = (id(a), id(b));
                (a.min(b), a.max(b))
            })
            .collect();
        TransitionGraph { vertices, edges: e }
    }

    pub fn edge_labels(&self) -> BTreeSet<(String, String)> {
        self.edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (self.vertices[a].code(), self.vertices[b].code());
                if x <= y {
                    (x, y)
                } else {
                    (y, x)
                }
            })
            .collect()
    }

    /// Label-preserving graph isomorphism by backtracking.
    pub fn is_isomorphic(&self, other: &TransitionGraph) -> bool {
        let n = self.vertices.len();
        if n != other.vertices.len() || self.edges.len() != other.edges.len() {
            return false;
        }
        let adj = |g: &TransitionGraph| {
            let mut m = vec![vec![false; n]; n];
            for &(a, b) in &g.edges {
                m[a][b] = true;
                m[b][a] = true;
            }
            m
        };
        let (a, b) = (adj(self), adj(other));
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn go(
            k: usize,
            g: &TransitionGraph,
            h: &TransitionGraph,
            a: &[Vec<bool>],
            b: &[Vec<bool>],
            map: &mut Vec<usize>,
            used: &mut Vec<bool>,
        ) -> bool {
            let n = map.len();
            if k == n {
                return true;
            }
            for t in 0..n {
                if used[t] || g.vertices[k] != h.vertices[t] {
                    continue;
                }
                if (0..k).any(|j| a[k][j] != b[t][map[j]]) {
                    continue;
                }
                if a[k].iter().filter(|&&x| x).count() != b[t].iter().filter(|&&x| x).count() {
                    continue;
                }
                map[k] = t;
                used[t] = true;
                if go(k + 1, g, h, a, b, map, used) {
                    return true;
                }
                used[t] = false;
            }
            map[k] = usize::MAX;
            false
        }
        go(0, self, other, &a, &b, &mut map, &mut used)
    }
}

pub fn transition_graph(rm: &RegionMap) -> TransitionGraph {
    TransitionGraph {
        vertices: rm.regions.iter().map(|r| r.label).collect(),
        edges: rm.adjacency.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigurationDescriptor {
    pub kind: CurveKind,
    pub regime: Regime,
    pub start_ray: Ray,
    pub start_quadrant: Quadrant,
    pub end_ray: Ray,
    pub end_quadrant: Quadrant,
    pub cusps: usize,
    pub self_intersections: usize,
    pub l0_crossings: usize,
    pub linf_crossings: usize,
    pub asymptotic_end: bool,
    /// All shapes found in the region map.
    pub shape_set: BTreeSet<ShapeLabel>,
    /// Number of regions found in the region map.
    pub region_count: usize,
    /// `5 + s + q₀ + q_∞`.
    pub expected_regions: usize,
    pub regular: bool,
    pub predicates: StartEnd,
    /// Catalogue row matching all columns, if any.
    pub matched_row: Option<usize>,
    /// Whether the transition graph is isomorphic to the one known for the
    /// matched row (`None` when no reference graph is available).
    pub graph_matches: Option<bool>,
}

impl ConfigurationDescriptor {
    pub fn extra_shapes(&self) -> BTreeSet<ShapeLabel> {
        let base = base_shapes();
        self.shape_set
            .iter()
            .copied()
            .filter(|l| !base.contains(l))
            .collect()
    }

    pub fn matches(&self, row: &CatalogueRow) -> bool {
        let extra: BTreeSet<ShapeLabel> = row
            .extra_shapes
            .iter()
            .map(|s| ShapeLabel::parse(s).unwrap())
            .collect();
        row.regime == RegimeGroup::of(self.regime)
            && row.attainable(self.kind) != Attainable::No
            && row.start_ray == self.start_ray
            && row.moves_into == self.start_quadrant
            && row.end_ray == self.end_ray
            && row.exits_from == self.end_quadrant
            && row.cusps == self.cusps
            && row.self_intersections == self.self_intersections
            && row.l0_crossings == self.l0_crossings
            && row.linf_crossings == self.linf_crossings
            && (row.asymptotic_forward && self.kind == CurveKind::Forward) == self.asymptotic_end
            && extra == self.extra_shapes()
    }
}

/// Descriptor with region map and transition graph.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub descriptor: ConfigurationDescriptor,
    pub map: RegionMap,
    pub graph: TransitionGraph,
}

pub fn decompose(c: &Classifier, resolution: usize) -> Result<Decomposition> {
    let env = c.envelope();
    let map = region_map(c, default_bbox(env), resolution)?;
    let graph = transition_graph(&map);
    let predicates = predicates_from_envelope(env);
    let sp = &env.special;
    let mut d = ConfigurationDescriptor {
        kind: env.kind,
        regime: classify_regime(c.params()),
        start_ray: predicates.start_ray,
        start_quadrant: predicates.start_quadrant,
        end_ray: predicates.end_ray,
        end_quadrant: predicates.end_quadrant,
        cusps: sp.cusps.len(),
        self_intersections: sp.s(),
        l0_crossings: sp.q0(),
        linf_crossings: sp.q_inf(),
        asymptotic_end: env.asymptotic_end,
        shape_set: map.labels(),
        region_count: map.region_count(),
        expected_regions: sp.expected_regions(),
        regular: sp.regular,
        predicates,
        matched_row: None,
        graph_matches: None,
    };
    d.matched_row = CATALOGUE.iter().find(|r| d.matches(r)).map(|r| r.index);
    d.graph_matches = d
        .matched_row
        .and_then(|r| expected_graph(r, env.asymptotic_end))
        .map(|g| g.is_isomorphic(&graph));
    Ok(Decomposition {
        descriptor: d,
        map,
        graph,
    })
}

pub fn configuration_descriptor(
    p: &ModelParams,
    kind: CurveKind,
) -> Result<ConfigurationDescriptor> {
    let c = Classifier::new(p, kind)?;
    Ok(decompose(&c, 64)?.descriptor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets;

    #[test]
    fn catalogue_region_counts_are_bounded() {
        for (k, r) in CATALOGUE.iter().enumerate() {
            assert_eq!(r.index, k + 1);
            assert!(r.region_count() <= 10);
            // every shape has at most four extrema
            for s in r.extra_shapes {
                assert!(ShapeLabel::parse(s).unwrap().extrema() <= 4);
            }
        }
    }

    #[test]
    fn closed_form_predicates_for_separated_fixture() {
        let l = closed_form_predicates(&presets::separated(), CurveKind::Forward);
        assert!((l.start_comp - 0.30869565).abs() < 1e-6);
        assert!((l.dir_start - 1.425).abs() < 1e-12);
        assert_eq!(l.start_ray, Ray::Nd);
        assert_eq!(l.end_ray, Some(Ray::Id));
    }

    #[test]
    fn predicates_for_fixtures() {
        let pe = start_end_predicates(&presets::proximal_positive(), CurveKind::Forward).unwrap();
        assert_eq!(
            (pe.start_ray, pe.start_quadrant, pe.end_ray, pe.end_quadrant),
            (Ray::Nd, Quadrant::Qn, Ray::Nh, Quadrant::Qn)
        );
        assert!(pe.closed_form_agrees);
        let pe = start_end_predicates(&presets::separated(), CurveKind::Forward).unwrap();
        assert_eq!(
            (pe.start_ray, pe.start_quadrant, pe.end_ray, pe.end_quadrant),
            (Ray::Nd, Quadrant::Qn, Ray::Id, Quadrant::Qi)
        );
        assert!(pe.closed_form_agrees);
    }

    #[test]
    fn isomorphism_respects_labels() {
        let g = expected_graph(1, false).unwrap();
        let mut h = g.clone();
        assert!(g.is_isomorphic(&h));
        h.vertices.swap(0, 4);
        assert!(!g.is_isomorphic(&h));
        let relabelled = TransitionGraph::from_label_edges(&[
            ("h", "n"),
            ("i", "h"),
            ("d", "i"),
            ("n", "d"),
            ("hd", "h"),
            ("hd", "d"),
            ("hd", "n"),
        ]);
        assert!(g.is_isomorphic(&relabelled));
    }

    #[test]
    fn p1_decomposition() {
        let c = Classifier::new(&presets::proximal_positive(), CurveKind::Forward).unwrap();
        let d = decompose(&c, 256).unwrap();
        assert_eq!(d.descriptor.region_count, 5);
        assert_eq!(d.descriptor.matched_row, Some(1));
        assert_eq!(d.descriptor.graph_matches, Some(true));
        assert!(d
            .graph
            .edges
            .iter()
            .all(|&(a, b)| d.graph.vertices[a] != d.graph.vertices[b]));
    }
}

//! Shape classification of states: quadrant, winding number of the augmented
//! envelope, extrema count `E(z) = 2|wind(z)| + 1{Qh ∪ Qd}(z)` and the
//! resulting sign sequence. Also hosts curve evaluation, the brute-force
//! sign-scan oracle and the fixed-short-rate scan.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::coeffs::{bond_a_prime, bond_coefficients, LimitEnd, Line, LineFamily};
use crate::envelope::{build_augmented, AugmentedEnvelope, GridSpec};
use crate::error::{Error, Result};
use crate::geom::{orient, Point, SegmentIndex};
use crate::model::{derived_coefficients, CurveKind, ModelParams};
use crate::roots::geomspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Quadrant {
    Qn,
    Qh,
    Qi,
    Qd,
    OnBoundary,
}

impl Quadrant {
    /// Quadrant from the sides of `ℓ₀` and `ℓ_∞`.
    pub fn from_sides(l0_positive: bool, linf_positive: bool) -> Quadrant {
        match (l0_positive, linf_positive) {
            (true, true) => Quadrant::Qn,
            (true, false) => Quadrant::Qh,
            (false, false) => Quadrant::Qi,
            (false, true) => Quadrant::Qd,
        }
    }

    pub fn is_odd(&self) -> bool {
        matches!(self, Quadrant::Qh | Quadrant::Qd)
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Quadrant::Qn => "Qn",
            Quadrant::Qh => "Qh",
            Quadrant::Qi => "Qi",
            Quadrant::Qd => "Qd",
            Quadrant::OnBoundary => "boundary",
        };
        f.write_str(s)
    }
}

/// Alternating sign sequence of the curve derivative, e.g. `+-+` for a curve
/// with a hump followed by a dip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShapeLabel {
    extrema: usize,
    first_positive: bool,
}

impl ShapeLabel {
    pub fn new(first_positive: bool, extrema: usize) -> Self {
        ShapeLabel {
            extrema,
            first_positive,
        }
    }

    pub fn extrema(&self) -> usize {
        self.extrema
    }

    pub fn first_positive(&self) -> bool {
        self.first_positive
    }

    pub fn last_positive(&self) -> bool {
        self.first_positive == self.extrema.is_multiple_of(2)
    }

    pub fn signs(&self) -> Vec<bool> {
        (0..=self.extrema)
            .map(|k| self.first_positive == (k % 2 == 0))
            .collect()
    }

    /// `+`/`-` string of length `extrema + 1`.
    pub fn sign_sequence(&self) -> String {
        self.signs()
            .into_iter()
            .map(|s| if s { '+' } else { '-' })
            .collect()
    }

    /// Short code: `n`, `i`, `h`, `d`, or the h/d letters of the extrema.
    pub fn code(&self) -> String {
        match (self.extrema, self.first_positive) {
            (0, true) => "n".into(),
            (0, false) => "i".into(),
            _ => (0..self.extrema)
                .map(|k| {
                    if self.first_positive == (k % 2 == 0) {
                        'h'
                    } else {
                        'd'
                    }
                })
                .collect(),
        }
    }

    pub fn name(&self) -> String {
        match (self.extrema, self.first_positive) {
            (0, true) => "normal".into(),
            (0, false) => "inverse".into(),
            (1, true) => "humped".into(),
            (1, false) => "dipped".into(),
            _ => self.code(),
        }
    }

    /// Parse a short code, a long name, or a sign sequence.
    pub fn parse(s: &str) -> Option<ShapeLabel> {
        let s = s.trim();
        match s {
            "n" | "normal" => return Some(ShapeLabel::new(true, 0)),
            "i" | "inverse" => return Some(ShapeLabel::new(false, 0)),
            "humped" => return Some(ShapeLabel::new(true, 1)),
            "dipped" => return Some(ShapeLabel::new(false, 1)),
            _ => {}
        }
        let chars: Vec<char> = s.chars().collect();
        if chars.is_empty() {
            return None;
        }
        let (a, b, offset) = if chars.iter().all(|c| matches!(c, 'h' | 'd')) {
            ('h', 'd', 0)
        } else if chars.iter().all(|c| matches!(c, '+' | '-' | '−')) {
            ('+', '-', 1)
        } else {
            return None;
        };
        let norm: Vec<char> = chars
            .iter()
            .map(|&c| if c == '−' { '-' } else { c })
            .collect();
        if norm.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        let first = norm[0] == a;
        debug_assert!(norm[0] == a || norm[0] == b);
        Some(ShapeLabel::new(first, norm.len() - offset))
    }
}

impl fmt::Display for ShapeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

impl Serialize for ShapeLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ShapeLabel", 3)?;
        st.serialize_field("code", &self.code())?;
        st.serialize_field("name", &self.name())?;
        st.serialize_field("sign_sequence", &self.sign_sequence())?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeResult {
    pub quadrant: Quadrant,
    pub winding: i32,
    pub extrema: usize,
    pub label: ShapeLabel,
    /// `z` lies within `τ_bd` of `η ∪ ℓ₀ ∪ ℓ_∞`; the label then follows the
    /// least-extrema rule over nearby states.
    pub boundary: bool,
}

/// Horizontal bands of polyline edges for crossing-number queries.
#[derive(Debug, Clone)]
pub(crate) struct BandIndex {
    edges: Vec<(Point, Point)>,
    bounds: Vec<f64>,
    bands: Vec<Vec<u32>>,
}

impl BandIndex {
    pub(crate) fn new(polyline: &[Point]) -> Self {
        let edges: Vec<(Point, Point)> = polyline
            .windows(2)
            .map(|w| (w[0], w[1]))
            .filter(|(a, b)| a.z2 != b.z2)
            .collect();
        let mut ys: Vec<f64> = polyline.iter().map(|p| p.z2).collect();
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let nb = (edges.len() / 8).clamp(1, 4096);
        let mut bounds: Vec<f64> = (1..nb).map(|k| ys[k * ys.len() / nb]).collect();
        bounds.dedup();
        let mut bands = vec![Vec::new(); bounds.len() + 1];
        let band_of = |y: f64| bounds.partition_point(|&b| b <= y);
        for (i, (a, b)) in edges.iter().enumerate() {
            let (lo, hi) = (a.z2.min(b.z2), a.z2.max(b.z2));
            for band in &mut bands[band_of(lo)..=band_of(hi)] {
                band.push(i as u32);
            }
        }
        BandIndex {
            edges,
            bounds,
            bands,
        }
    }

    fn band(&self, y: f64) -> &[u32] {
        &self.bands[self.bounds.partition_point(|&b| b <= y)]
    }

    /// Half-open crossing rule: an edge counts when `y` lies in
    /// `[min y, max y)`; upward edges with `z` on their left add one,
    /// downward edges with `z` on their right subtract one.
    fn winding(&self, z: &Point) -> i32 {
        let y = z.z2;
        let mut w = 0;
        for &i in self.band(y) {
            let (a, b) = &self.edges[i as usize];
            if a.z2 <= y {
                if b.z2 > y && orient(a, b, z) > 0.0 {
                    w += 1;
                }
            } else if b.z2 <= y && orient(a, b, z) < 0.0 {
                w -= 1;
            }
        }
        w
    }

    pub(crate) fn row_crossings(&self, y: f64) -> Vec<(f64, i32)> {
        let mut out = Vec::new();
        for &i in self.band(y) {
            let (a, b) = &self.edges[i as usize];
            let up = a.z2 <= y && b.z2 > y;
            let down = b.z2 <= y && a.z2 > y;
            if up || down {
                let x = a.z1 + (y - a.z2) * (b.z1 - a.z1) / (b.z2 - a.z2);
                out.push((x, if up { 1 } else { -1 }));
            }
        }
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        out
    }
}

/// Classifier bound to one parameter set and curve kind.
#[derive(Debug, Clone)]
pub struct Classifier {
    env: AugmentedEnvelope,
    index: BandIndex,
    curve: SegmentIndex,
    tau: f64,
}

/// A witness state for one shape on the fixed-short-rate line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShortRateWitness {
    pub label: ShapeLabel,
    pub z: Point,
}

impl Classifier {
    pub fn new(p: &ModelParams, kind: CurveKind) -> Result<Self> {
        Self::with_grid(p, kind, &GridSpec::default())
    }

    pub fn with_grid(p: &ModelParams, kind: CurveKind, grid: &GridSpec) -> Result<Self> {
        Ok(Self::from_envelope(build_augmented(p, kind, grid)?))
    }

    pub fn from_envelope(env: AugmentedEnvelope) -> Self {
        let index = BandIndex::new(&env.polyline);
        let curve = SegmentIndex::new(&env.curve_points(), env.scale / 512.0);
        let tau = env.tau_bd();
        Classifier {
            env,
            index,
            curve,
            tau,
        }
    }

    pub fn envelope(&self) -> &AugmentedEnvelope {
        &self.env
    }

    pub fn params(&self) -> &ModelParams {
        self.env.family().params()
    }

    pub fn kind(&self) -> CurveKind {
        self.env.kind
    }

    /// Proximity and crossing index over the envelope curve.
    pub fn curve_index(&self) -> &SegmentIndex {
        &self.curve
    }

    pub fn tau_bd(&self) -> f64 {
        self.tau
    }

    pub fn l0(&self) -> &Line {
        &self.env.l0
    }

    pub fn linf(&self) -> &Line {
        &self.env.linf
    }

    /// Signed distances to `ℓ₀` and `ℓ_∞`.
    pub fn line_distances(&self, z: &Point) -> (f64, f64) {
        (
            self.env.l0.signed_distance(z),
            self.env.linf.signed_distance(z),
        )
    }

    pub fn quadrant(&self, z: &Point) -> Quadrant {
        let (d0, di) = self.line_distances(z);
        if d0.abs() < self.tau || di.abs() < self.tau {
            return Quadrant::OnBoundary;
        }
        Quadrant::from_sides(d0 > 0.0, di > 0.0)
    }

    /// `z` is within `τ_bd` of the envelope curve (excluding the limit lines).
    pub fn near_curve(&self, z: &Point) -> bool {
        self.curve.distance_within(z, self.tau).is_finite()
    }

    pub fn is_boundary(&self, z: &Point) -> bool {
        let (d0, di) = self.line_distances(z);
        d0.abs() < self.tau || di.abs() < self.tau || self.near_curve(z)
    }

    pub fn winding(&self, z: &Point) -> Result<i32> {
        if self.is_boundary(z) {
            return Err(Error::OnCurve { z1: z.z1, z2: z.z2 });
        }
        Ok(self.index.winding(z))
    }

    /// Winding number without the proximity check.
    pub fn winding_unchecked(&self, z: &Point) -> i32 {
        self.index.winding(z)
    }

    /// Crossings `(x, ±1)` of the horizontal line at height `y` with the
    /// augmented envelope, sorted by `x`. The winding number at `(x, y)` is
    /// the sum of the signs of crossings to the right of `x`.
    pub fn row_crossings(&self, y: f64) -> Vec<(f64, i32)> {
        self.index.row_crossings(y)
    }

    fn interior(&self, z: &Point) -> Result<ShapeResult> {
        self.with_winding(z, self.index.winding(z))
    }

    /// Result for an interior state whose winding number is already known.
    pub fn with_winding(&self, z: &Point, winding: i32) -> Result<ShapeResult> {
        let (d0, di) = self.line_distances(z);
        let quadrant = Quadrant::from_sides(d0 > 0.0, di > 0.0);
        let extrema = 2 * winding.unsigned_abs() as usize + quadrant.is_odd() as usize;
        let label = ShapeLabel::new(d0 > 0.0, extrema);
        if label.last_positive() != (di > 0.0) {
            return Err(Error::InconsistentParity(format!(
                "E={extrema} in {quadrant} at ({}, {})",
                z.z1, z.z2
            )));
        }
        Ok(ShapeResult {
            quadrant,
            winding,
            extrema,
            label,
            boundary: false,
        })
    }

    pub fn classify(&self, z: &Point) -> Result<ShapeResult> {
        if !z.is_finite() {
            return Err(Error::NonFinite("state"));
        }
        if !self.is_boundary(z) {
            return self.interior(z);
        }
        // least-extrema rule over the adjacent regions
        let mut best: Option<ShapeResult> = None;
        for mult in [4.0, 16.0, 64.0, 256.0] {
            let r = mult * self.tau;
            for k in 0..16 {
                let t = (k as f64 + 0.5) * std::f64::consts::TAU / 16.0;
                let q = Point::new(z.z1 + r * t.cos(), z.z2 + r * t.sin());
                if self.is_boundary(&q) {
                    continue;
                }
                let res = self.interior(&q)?;
                if best.is_none_or(|b| res.extrema < b.extrema) {
                    best = Some(res);
                }
            }
            if best.is_some() {
                break;
            }
        }
        let b = best.ok_or_else(|| {
            Error::Indeterminate(format!("no interior neighbour near ({}, {})", z.z1, z.z2))
        })?;
        let winding = if self.near_curve(z) {
            b.winding
        } else {
            self.index.winding(z)
        };
        Ok(ShapeResult {
            quadrant: self.quadrant(z),
            winding,
            extrema: b.extrema,
            label: b.label,
            boundary: true,
        })
    }

    pub fn classify_many(&self, zs: &[Point]) -> Vec<Result<ShapeResult>> {
        zs.par_iter().map(|z| self.classify(z)).collect()
    }

    /// Distinct shapes on the line `z₁ + z₂ = rate − κ`, with one witness
    /// each. The line is cut at its crossings with the envelope and the two
    /// limit lines, each piece is sampled at its midpoint, and `scan`
    /// additional uniform samples cover the span.
    pub fn shapes_for_short_rate(&self, rate: f64, scan: usize) -> Vec<ShortRateWitness> {
        let c = rate - self.params().kappa();
        let at = |t: f64| Point::new(t, c - t);
        let g = |z: &Point| z.z1 + z.z2 - c;
        let mut ts: Vec<f64> = Vec::new();
        let pts = self.env.curve_points();
        for w in pts.windows(2) {
            let (ga, gb) = (g(&w[0]), g(&w[1]));
            if (ga <= 0.0) != (gb <= 0.0) {
                let s = ga / (ga - gb);
                ts.push(w[0].z1 + s * (w[1].z1 - w[0].z1));
            }
        }
        let short = Line {
            alpha: -c,
            beta1: 1.0,
            beta2: 1.0,
        };
        for l in [&self.env.l0, &self.env.linf] {
            if let Some(z) = l.intersect(&short) {
                ts.push(z.z1);
            }
        }
        ts.retain(|t| t.is_finite());
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let m = self.env.basepoint;
        let (lo, hi) = match (ts.first(), ts.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => (m.z1, m.z1),
        };
        let margin = (hi - lo).max(self.env.scale);
        let mut samples: Vec<f64> = ts.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        samples.push(lo - margin);
        samples.push(hi + margin);
        let (a, b) = (lo - margin, hi + margin);
        for k in 0..scan {
            samples.push(a + (b - a) * (k as f64 + 0.5) / scan as f64);
        }
        let results: Vec<(Point, Result<ShapeResult>)> = samples
            .par_iter()
            .map(|&t| (at(t), self.classify(&at(t))))
            .collect();
        let mut seen: BTreeMap<ShapeLabel, Point> = BTreeMap::new();
        for (z, r) in results {
            if let Ok(r) = r {
                if !r.boundary {
                    seen.entry(r.label).or_insert(z);
                }
            }
        }
        seen.into_iter()
            .map(|(label, z)| ShortRateWitness { label, z })
            .collect()
    }
}

pub fn quadrant_of(p: &ModelParams, kind: CurveKind, z: &Point) -> Result<Quadrant> {
    Ok(Classifier::new(p, kind)?.quadrant(z))
}

pub fn winding_number(env: &AugmentedEnvelope, z: &Point) -> Result<i32> {
    Classifier::from_envelope(env.clone()).winding(z)
}

/// `E(z)` with quadrant and winding number; the label is attached as well.
pub fn count_extrema(p: &ModelParams, kind: CurveKind, z: &Point) -> Result<ShapeResult> {
    classify_shape(p, kind, z)
}

pub fn classify_shape(p: &ModelParams, kind: CurveKind, z: &Point) -> Result<ShapeResult> {
    Classifier::new(p, kind)?.classify(z)
}

pub fn shapes_for_short_rate(
    p: &ModelParams,
    kind: CurveKind,
    rate: f64,
    scan: usize,
) -> Result<Vec<ShortRateWitness>> {
    Ok(Classifier::new(p, kind)?.shapes_for_short_rate(rate, scan))
}

/// Forward or yield curve values at the given maturities.
pub fn eval_curve(p: &ModelParams, kind: CurveKind, z: &Point, xs: &[f64]) -> Result<Vec<f64>> {
    let d = derived_coefficients(p);
    let (l1, l2) = (p.lambda1(), p.lambda2());
    let level = p.kappa() + p.theta1() + p.theta2()
        - p.sigma1().powi(2) / (2.0 * l1 * l1)
        - p.sigma2().powi(2) / (2.0 * l2 * l2)
        - d.r_coef;
    xs.iter()
        .map(|&x| match kind {
            CurveKind::Forward => {
                if !(x >= 0.0 && x.is_finite()) {
                    return Err(Error::Domain(x));
                }
                Ok(level + bond_a_prime(p, x) + (-l1 * x).exp() * z.z1 + (-l2 * x).exp() * z.z2)
            }
            CurveKind::Yield => {
                if !(x > 0.0 && x.is_finite()) {
                    return Err(Error::Domain(x));
                }
                let bc = bond_coefficients(p, x)?;
                Ok(level + (bc.a + bc.b[0] * z.z1 + bc.b[1] * z.z2) / x)
            }
        })
        .collect()
}

/// Number of grid points of the oracle scan.
pub const ORACLE_POINTS: usize = 16384;

/// Brute-force shape evaluation: the sign of the curve derivative
/// `a(x) + b(x)z₁ + c(x)z₂` is scanned on a dense log grid of normalized
/// lines, independently of the envelope.
#[derive(Debug, Clone)]
pub struct Oracle {
    family: LineFamily,
    xs: Vec<f64>,
    lines: Vec<Line>,
    ends: [Line; 2],
}

impl Oracle {
    pub fn new(p: &ModelParams, kind: CurveKind) -> Self {
        let family = LineFamily::new(p, kind);
        let xs = geomspace(1e-8, family.x_far(), ORACLE_POINTS);
        let lines = xs.iter().map(|&x| family.line(x)).collect();
        let ends = [
            family
                .limit_line(LimitEnd::Zero)
                .unwrap_or(Line::from_row([1.0, 0.0, 0.0])),
            family
                .limit_line(LimitEnd::Infinity)
                .unwrap_or(Line::from_row([1.0, 0.0, 0.0])),
        ];
        Oracle {
            family,
            xs,
            lines,
            ends,
        }
    }

    fn eval_at(&self, x: f64, z: &Point) -> f64 {
        self.family.line(x).eval(z)
    }

    /// Minimum of `s·F(x)` over `[lo, hi]` by golden-section search.
    fn refine_min(&self, z: &Point, s: f64, mut lo: f64, mut hi: f64) -> f64 {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let f = |x: f64| s * self.eval_at(x, z);
        let mut c = hi - g * (hi - lo);
        let mut d = lo + g * (hi - lo);
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..80 {
            if hi - lo <= 1e-15 * hi {
                break;
            }
            if fc < fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - g * (hi - lo);
                fc = f(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + g * (hi - lo);
                fd = f(d);
            }
            if fc.min(fd) < 0.0 {
                break;
            }
        }
        fc.min(fd)
    }

    pub fn shape(&self, z: &Point) -> Result<ShapeLabel> {
        let vals: Vec<f64> = self.lines.iter().map(|l| l.eval(z)).collect();
        let max = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let eps = 1e-12 * max;
        let n = vals.len();
        if max.is_nan() || max <= 0.0 || vals[0].abs() <= eps || vals[n - 1].abs() <= eps {
            return Err(Error::Indeterminate(
                "derivative vanishes at an end of the scan".into(),
            ));
        }
        // the scan cannot resolve states this close to ℓ₀ or ℓ_∞
        if self
            .ends
            .iter()
            .any(|l| l.signed_distance(z).abs() <= 1e-7 * max)
        {
            return Err(Error::Indeterminate("state on a limit line".into()));
        }
        let mut cur = vals[0] > 0.0;
        let first = cur;
        let mut changes = 0usize;
        let mut dwell = false;
        for i in 1..n {
            let v = vals[i];
            if v.abs() <= eps {
                dwell = true;
                continue;
            }
            let s = v > 0.0;
            if s != cur {
                changes += 1;
                cur = s;
                dwell = false;
                continue;
            }
            if dwell {
                return Err(Error::Indeterminate(format!(
                    "tangency near x={}",
                    self.xs[i]
                )));
            }
            // hidden pair of roots between samples around a local minimum of |F|
            if i >= 2 && i < n - 1 {
                let (a, b, c) = (vals[i - 1].abs(), v.abs(), vals[i + 1].abs());
                let curv = a - 2.0 * b + c;
                let vertex = b - (c - a) * (c - a) / (8.0 * curv);
                if b < a
                    && b < c
                    && vertex < 0.25 * b
                    && (vals[i + 1] > 0.0) == s
                    && (vals[i - 1] > 0.0) == s
                {
                    let sign = if s { 1.0 } else { -1.0 };
                    let m = self.refine_min(z, sign, self.xs[i - 1], self.xs[i + 1]);
                    if m < -eps {
                        changes += 2;
                    } else if m.abs() <= eps {
                        return Err(Error::Indeterminate(format!(
                            "tangency near x={}",
                            self.xs[i]
                        )));
                    }
                }
            }
        }
        Ok(ShapeLabel::new(first, changes))
    }
}

pub fn oracle_shape(p: &ModelParams, kind: CurveKind, z: &Point) -> Result<ShapeLabel> {
    Oracle::new(p, kind).shape(z)
}

/// Number of strict local extrema of a sampled curve.
pub fn sampled_extrema(values: &[f64]) -> usize {
    let d: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    crate::roots::sign_change_brackets(&d).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets;

    fn p1() -> Classifier {
        Classifier::new(&presets::proximal_positive(), CurveKind::Forward).unwrap()
    }

    #[test]
    fn label_codes_and_parsing() {
        let cases = [
            ("n", "+", "normal"),
            ("i", "-", "inverse"),
            ("h", "+-", "humped"),
            ("d", "-+", "dipped"),
            ("hd", "+-+", "hd"),
            ("dh", "-+-", "dh"),
            ("hdh", "+-+-", "hdh"),
            ("dhd", "-+-+", "dhd"),
            ("hdhd", "+-+-+", "hdhd"),
        ];
        for (code, seq, name) in cases {
            let l = ShapeLabel::parse(code).unwrap();
            assert_eq!(l.code(), code);
            assert_eq!(l.sign_sequence(), seq);
            assert_eq!(l.name(), name);
            assert_eq!(ShapeLabel::parse(seq), Some(l));
            assert_eq!(ShapeLabel::parse(name), Some(l));
        }
        assert_eq!(ShapeLabel::parse("hh"), None);
        assert_eq!(ShapeLabel::parse("+x"), None);
    }

    #[test]
    fn p1_quadrants() {
        let c = p1();
        assert_eq!(c.quadrant(&Point::new(0.0, 1.0)), Quadrant::Qi);
        assert_eq!(c.quadrant(&Point::new(-2.889, 1.370)), Quadrant::Qn);
        assert_eq!(c.quadrant(&c.envelope().basepoint), Quadrant::OnBoundary);
    }

    #[test]
    fn p1_reference_states() {
        let c = p1();
        let r = c.classify(&Point::new(0.0, 1.0)).unwrap();
        assert_eq!((r.extrema, r.winding, r.label.code().as_str()), (0, 0, "i"));
        let r = c.classify(&Point::new(-2.0, 0.7)).unwrap();
        assert_eq!(r.winding.abs(), 1);
        assert_eq!(r.extrema, 2);
        assert_eq!(r.label.sign_sequence(), "+-+");
        assert!(c.winding(&Point::new(1e6, 1e6)).unwrap() == 0);
        let r = c.classify(&Point::new(-2.889, 1.370)).unwrap();
        assert_eq!(
            (r.quadrant, r.winding, r.label.code().as_str()),
            (Quadrant::Qn, 0, "n")
        );
    }

    #[test]
    fn oracle_reference_states() {
        let p = presets::proximal_positive();
        let o = Oracle::new(&p, CurveKind::Forward);
        assert_eq!(o.shape(&Point::new(0.0, 1.0)).unwrap().sign_sequence(), "-");
        assert_eq!(o.shape(&Point::new(-2.0, 0.7)).unwrap().code(), "hd");
        // centroid of M, η(0), η(∞) lies outside the hd loop
        assert_eq!(o.shape(&Point::new(-2.889, 1.370)).unwrap().code(), "n");
        // F(0, z) = 0 on ℓ₀: −z₁ − 1.5 z₂ = 0
        assert!(matches!(
            o.shape(&Point::new(-1.5, 1.0)),
            Err(Error::Indeterminate(_))
        ));
    }

    #[test]
    fn oracle_resolves_root_pairs_closer_than_the_grid() {
        let p = presets::proximal_positive();
        let fam = LineFamily::new(&p, CurveKind::Forward);
        let o = Oracle::new(&p, CurveKind::Forward);
        let x = 0.7;
        let e = fam.envelope(x);
        let t = fam.tangent(x);
        let n = Point::new(-t.z2, t.z1).scale(1.0 / t.norm());
        let mut got: Vec<String> = [1e-9, -1e-9]
            .iter()
            .map(|&h| o.shape(&e.add(&n.scale(h))).unwrap().code())
            .collect();
        got.sort();
        assert_eq!(got, vec!["hd", "n"]);
    }

    #[test]
    fn boundary_points_use_least_extrema() {
        let c = p1();
        let e = c.envelope();
        let z = e.body[e.body.len() / 3].z;
        let r = c.classify(&z).unwrap();
        assert!(r.boundary);
        let m = c.classify(&e.basepoint).unwrap();
        assert!(m.boundary);
        assert_eq!(m.extrema, 0);
        assert!(matches!(c.winding(&z), Err(Error::OnCurve { .. })));
    }

    #[test]
    fn forward_and_yield_agree_at_zero() {
        let p = presets::proximal_negative().with_kappa(0.3).unwrap();
        let z = Point::new(0.2, -0.7);
        let f = eval_curve(&p, CurveKind::Forward, &z, &[0.0]).unwrap()[0];
        let y = eval_curve(&p, CurveKind::Yield, &z, &[1e-9]).unwrap()[0];
        assert!((f - (0.3 + z.z1 + z.z2)).abs() < 1e-14);
        assert!((y - f).abs() < 1e-8);
        assert!(eval_curve(&p, CurveKind::Yield, &z, &[0.0]).is_err());
    }

    #[test]
    fn curve_derivative_matches_line_sign() {
        let p = presets::separated();
        let z = Point::new(-1.0, 0.3);
        for kind in [CurveKind::Forward, CurveKind::Yield] {
            let fam = LineFamily::new(&p, kind);
            for &x in &[0.1, 0.8, 3.0] {
                let h = 1e-5;
                let v = eval_curve(&p, kind, &z, &[x - h, x + h]).unwrap();
                let fd = (v[1] - v[0]) / (2.0 * h);
                let s = fam.line(x).eval(&z);
                assert_eq!(fd > 0.0, s > 0.0, "{kind} x={x}");
            }
        }
    }

    #[test]
    fn normal_region_curve_is_increasing() {
        let p = presets::proximal_positive();
        let c = p1();
        // deep in Qn, far from the envelope loop
        let z = Point::new(-200.0, 100.0);
        assert_eq!(c.classify(&z).unwrap().label.code(), "n");
        let xs = geomspace(1e-3, 15.0, 400);
        let v = eval_curve(&p, CurveKind::Forward, &z, &xs).unwrap();
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn row_crossings_reproduce_winding() {
        let c = Classifier::new(&presets::proximal_negative(), CurveKind::Forward).unwrap();
        let m = c.envelope().basepoint;
        let s = c.envelope().scale;
        for k in 0..25 {
            let y = m.z2 - s + 2.0 * s * (k as f64 + 0.37) / 25.0;
            let cr = c.row_crossings(y);
            for j in 0..25 {
                let x = m.z1 - s + 2.0 * s * (j as f64 + 0.41) / 25.0;
                let w: i32 = cr.iter().filter(|(xi, _)| *xi > x).map(|(_, s)| s).sum();
                assert_eq!(w, c.winding_unchecked(&Point::new(x, y)));
            }
        }
    }

    #[test]
    fn p3_short_rate_line() {
        let c = Classifier::new(&presets::proximal_negative(), CurveKind::Forward).unwrap();
        let got: Vec<String> = c
            .shapes_for_short_rate(-0.386, 200)
            .iter()
            .map(|w| w.label.code())
            .collect();
        let mut want = vec!["d", "h", "hd", "hdh", "hdhd"];
        want.sort();
        let mut got_sorted = got.clone();
        got_sorted.sort();
        assert_eq!(got_sorted, want);
    }
}

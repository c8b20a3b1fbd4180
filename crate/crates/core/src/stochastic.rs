//! Stationary law of the factor process and Monte Carlo estimates of shape
//! probabilities.
//!
//! Samples are drawn in blocks of [`BLOCK`] points. Block `k` uses a
//! `ChaCha8Rng` seeded with the user seed on stream `k`, so the sample set is
//! identical however the blocks are spread across threads.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{Classifier, ShapeLabel};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::model::{CurveKind, ModelParams};

/// Points per random stream.
pub const BLOCK: usize = 4096;

/// Bivariate normal law of the factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryLaw {
    pub mean: Point,
    pub cov: [[f64; 2]; 2],
}

/// Mean-reversion speeds and levels used for sampling under a measure other
/// than the pricing one. Volatilities and correlation are shared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Drift {
    pub lambda1: f64,
    pub lambda2: f64,
    pub theta1: f64,
    pub theta2: f64,
}

fn ou_law(l1: f64, l2: f64, t1: f64, t2: f64, p: &ModelParams) -> StationaryLaw {
    let (s1, s2) = (p.sigma1(), p.sigma2());
    let c12 = p.rho() * s1 * s2 / (l1 + l2);
    StationaryLaw {
        mean: Point::new(t1, t2),
        cov: [[s1 * s1 / (2.0 * l1), c12], [c12, s2 * s2 / (2.0 * l2)]],
    }
}

/// Stationary law under the pricing dynamics.
pub fn stationary_moments(p: &ModelParams) -> StationaryLaw {
    ou_law(p.lambda1(), p.lambda2(), p.theta1(), p.theta2(), p)
}

/// Stationary law under alternative drift parameters.
pub fn stationary_moments_under(p: &ModelParams, drift: &Drift) -> Result<StationaryLaw> {
    for (name, v) in [("lambda1", drift.lambda1), ("lambda2", drift.lambda2)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NonPositiveVol { name, value: v });
        }
    }
    if !(drift.theta1.is_finite() && drift.theta2.is_finite()) {
        return Err(Error::NonFinite("theta"));
    }
    Ok(ou_law(
        drift.lambda1,
        drift.lambda2,
        drift.theta1,
        drift.theta2,
        p,
    ))
}

impl StationaryLaw {
    /// Lower Cholesky factor. A singular covariance (`|ρ| = 1`) gets the
    /// rank-one factor.
    pub fn cholesky(&self) -> [[f64; 2]; 2] {
        let [[a, b], [_, c]] = self.cov;
        let l11 = a.sqrt();
        let l21 = if l11 > 0.0 { b / l11 } else { 0.0 };
        let l22 = (c - l21 * l21).max(0.0).sqrt();
        [[l11, 0.0], [l21, l22]]
    }

    fn draw(&self, l: &[[f64; 2]; 2], rng: &mut ChaCha8Rng) -> Point {
        let e1: f64 = StandardNormal.sample(rng);
        let e2: f64 = StandardNormal.sample(rng);
        Point::new(
            self.mean.z1 + l[0][0] * e1,
            self.mean.z2 + l[1][0] * e1 + l[1][1] * e2,
        )
    }

    /// Block `k` of a sample of size `n`.
    fn block(&self, n: usize, seed: u64, k: usize) -> Vec<Point> {
        let l = self.cholesky();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let len = BLOCK.min(n - k * BLOCK);
        (0..len).map(|_| self.draw(&l, &mut rng)).collect()
    }
}

/// `n` independent draws, deterministic in `seed`.
pub fn sample_stationary(law: &StationaryLaw, n: usize, seed: u64) -> Vec<Point> {
    (0..n.div_ceil(BLOCK))
        .into_par_iter()
        .flat_map_iter(|k| law.block(n, seed, k))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LabelEstimate {
    pub label: ShapeLabel,
    pub estimate: f64,
    pub std_error: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeProbabilities {
    pub kind: CurveKind,
    /// Keyed by shape code.
    pub shapes: BTreeMap<String, LabelEstimate>,
    pub total_samples: usize,
    /// Samples within the boundary tolerance; they are counted under the
    /// least-extrema label of their neighbourhood.
    pub boundary_samples: usize,
    pub seed: Option<u64>,
}

impl ShapeProbabilities {
    pub fn get(&self, code: &str) -> Option<&LabelEstimate> {
        self.shapes.get(code)
    }

    pub fn labels(&self) -> Vec<ShapeLabel> {
        self.shapes.values().map(|e| e.label).collect()
    }
}

#[derive(Default, Clone)]
struct Tally {
    // label -> (count, Σw, Σw²)
    by_label: BTreeMap<ShapeLabel, (usize, f64, f64)>,
    boundary: usize,
    total: usize,
    weight: f64,
}

impl Tally {
    fn add(&mut self, label: ShapeLabel, boundary: bool, w: f64) {
        let e = self.by_label.entry(label).or_default();
        e.0 += 1;
        e.1 += w;
        e.2 += w * w;
        self.boundary += boundary as usize;
        self.total += 1;
        self.weight += w;
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (k, (c, w, w2)) in other.by_label {
            let e = self.by_label.entry(k).or_default();
            e.0 += c;
            e.1 += w;
            e.2 += w2;
        }
        self.boundary += other.boundary;
        self.total += other.total;
        self.weight += other.weight;
        self
    }

    fn finish(self, kind: CurveKind, seed: Option<u64>, sum_w2: f64) -> ShapeProbabilities {
        let total_w = self.weight;
        let shapes = self
            .by_label
            .iter()
            .map(|(label, &(count, w, w2))| {
                let p = w / total_w;
                // Σ wᵢ²(1{i ∈ label} − p)² / (Σ wᵢ)²; for unit weights this
                // is the Wald variance p(1 − p)/n.
                let var =
                    (w2 * (1.0 - p) * (1.0 - p) + (sum_w2 - w2) * p * p) / (total_w * total_w);
                (
                    label.code(),
                    LabelEstimate {
                        label: *label,
                        estimate: p,
                        std_error: var.max(0.0).sqrt(),
                        count,
                    },
                )
            })
            .collect();
        ShapeProbabilities {
            kind,
            shapes,
            total_samples: self.total,
            boundary_samples: self.boundary,
            seed,
        }
    }
}

/// Classify `points` and tally the labels, optionally with importance
/// weights (self-normalized).
pub fn tally(
    c: &Classifier,
    points: &[Point],
    weights: Option<&[f64]>,
) -> Result<ShapeProbabilities> {
    if let Some(w) = weights {
        if w.len() != points.len() || w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Config(
                "weights must be finite, non-negative and one per point".into(),
            ));
        }
    }
    if points.is_empty() {
        return Err(Error::Config("no sample points".into()));
    }
    let weight = |i: usize| weights.map_or(1.0, |w| w[i]);
    let t = points
        .par_chunks(BLOCK)
        .enumerate()
        .map(|(k, chunk)| {
            let mut t = Tally::default();
            for (j, z) in chunk.iter().enumerate() {
                let r = c.classify(z)?;
                t.add(r.label, r.boundary, weight(k * BLOCK + j));
            }
            Ok::<_, Error>(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    let sum_w2 = (0..points.len()).map(|i| weight(i) * weight(i)).sum();
    Ok(t.finish(c.kind(), None, sum_w2))
}

/// Shape probabilities for states drawn from `law`.
pub fn estimate_with_law(
    c: &Classifier,
    law: &StationaryLaw,
    n: usize,
    seed: u64,
) -> Result<ShapeProbabilities> {
    if n == 0 {
        return Err(Error::Config("sample size must be at least 1".into()));
    }
    let t = (0..n.div_ceil(BLOCK))
        .into_par_iter()
        .map(|k| {
            let mut t = Tally::default();
            for z in law.block(n, seed, k) {
                let r = c.classify(&z)?;
                t.add(r.label, r.boundary, 1.0);
            }
            Ok::<_, Error>(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(t.finish(c.kind(), Some(seed), n as f64))
}

/// Shape probabilities under the stationary law of the pricing dynamics.
pub fn estimate_shape_probabilities(
    p: &ModelParams,
    kind: CurveKind,
    n: usize,
    seed: u64,
) -> Result<ShapeProbabilities> {
    let c = Classifier::new(p, kind)?;
    estimate_with_law(&c, &stationary_moments(p), n, seed)
}

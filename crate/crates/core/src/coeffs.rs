//! Coefficients `(a, b, c)` of the maturity-derivative of the forward and
//! yield curves, their limit lines, Wronskians and the bond-price factors.
//!
//! The curve slope at maturity `x` in state `z` is `F(x, z) = a(x) + b(x) z₁ + c(x) z₂`.
//! All three coefficients are linear combinations of a single kernel
//! `m(x, μ)` evaluated at the rates `(2λ₁, 2λ₂, λ₁+λ₂, λ₁, λ₂)`:
//!
//! * forward: `m_f(x, μ) = −μ e^{−μx}`
//! * yield:   `m_y(x, μ) = (e^{−μx}(1 + μx) − 1)/(μx²) = μ φ(μx)`
//!
//! Several quantities decay or grow exponentially in `x`. Everything that is
//! consumed by the geometry (lines, envelope, cusp detection) is therefore
//! computed from positively rescaled rows that stay bounded, which defines the
//! same lines and the same half-spaces.

use serde::Serialize;

use crate::error::{Assumption, Error, Result};
use crate::geom::Point;
use crate::model::{derived_coefficients, CurveKind, ModelParams};
use crate::roots::{geomspace, sign_change_brackets};

/// Number of Taylor terms used for `φ` and its derivatives below `u = 1`.
const SERIES_TERMS: usize = 30;
/// Below this value of `μx` the yield kernel uses its Taylor series.
pub const SERIES_SWITCH: f64 = 1.0;
/// Multiple of the slowest relaxation time used as the proxy for `x = ∞`.
pub const FAR_MULTIPLE: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Kernel {
    MForward,
    MYield,
}

impl From<CurveKind> for Kernel {
    fn from(k: CurveKind) -> Self {
        match k {
            CurveKind::Forward => Kernel::MForward,
            CurveKind::Yield => Kernel::MYield,
        }
    }
}

/// Taylor coefficients of `φ(u) = (e^{−u}(1+u) − 1)/u²`:
/// `c_k = (−1)^{k+1} (k+1)/(k+2)!`.
fn phi_coefficients() -> [f64; SERIES_TERMS] {
    let mut c = [0.0; SERIES_TERMS];
    let mut fact = 2.0; // (k+2)!
    for (k, ck) in c.iter_mut().enumerate() {
        if k > 0 {
            fact *= (k + 2) as f64;
        }
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        *ck = sign * (k + 1) as f64 / fact;
    }
    c
}

/// `(φ(u), φ'(u), φ''(u))` for `u ≥ 0`.
pub fn phi_derivs(u: f64) -> [f64; 3] {
    if u < SERIES_SWITCH {
        let c = phi_coefficients();
        let (mut v0, mut v1, mut v2) = (0.0, 0.0, 0.0);
        for k in (0..SERIES_TERMS).rev() {
            v0 = v0 * u + c[k];
            if k >= 1 {
                v1 = v1 * u + k as f64 * c[k];
            }
            if k >= 2 {
                v2 = v2 * u + (k * (k - 1)) as f64 * c[k];
            }
        }
        [v0, v1, v2]
    } else {
        let e = (-u).exp();
        let psi = psi(u);
        let u2 = u * u;
        [
            psi / u2,
            -e / u - 2.0 * psi / (u2 * u),
            e / u + 3.0 * e / u2 + 6.0 * psi / (u2 * u2),
        ]
    }
}

/// `ψ(u) = u² φ(u) = e^{−u}(1+u) − 1`, accurate for small `u`.
pub fn psi(u: f64) -> f64 {
    if u < SERIES_SWITCH {
        u * u * phi_derivs(u)[0]
    } else {
        (-u).exp_m1() + u * (-u).exp()
    }
}

/// Derivative of order `d ∈ {0, 1, 2}` of the kernel `m(x, μ)` in `x`.
/// At `x = 0` the yield kernel returns its removable-singularity limit.
pub fn kernel_value(kernel: Kernel, x: f64, mu: f64, d: u8) -> f64 {
    match kernel {
        Kernel::MForward => -mu * (-mu).powi(d as i32) * (-mu * x).exp(),
        Kernel::MYield => mu.powi(d as i32 + 1) * phi_derivs(mu * x)[d as usize],
    }
}

/// Weights and rates of the `𝒜` operator: `(𝒜m)(x) = −Σ w_k m(x, μ_k)`.
fn operator_terms(p: &ModelParams) -> ([f64; 5], [f64; 5]) {
    let d = derived_coefficients(p);
    let (l1, l2, s1, s2) = (p.lambda1(), p.lambda2(), p.sigma1(), p.sigma2());
    (
        [
            s1 * s1 / (2.0 * l1 * l1),
            s2 * s2 / (2.0 * l2 * l2),
            d.r_coef,
            d.u1,
            d.u2,
        ],
        [2.0 * l1, 2.0 * l2, l1 + l2, l1, l2],
    )
}

/// `(𝒜m)(x)` or its `d`-th derivative in `x`.
pub fn apply_a_operator(kernel: Kernel, p: &ModelParams, x: f64, d: u8) -> Result<f64> {
    if x < 0.0 || !x.is_finite() {
        return Err(Error::Domain(x));
    }
    let (w, mu) = operator_terms(p);
    Ok(-(0..5)
        .map(|k| w[k] * kernel_value(kernel, x, mu[k], d))
        .sum::<f64>())
}

/// Values and first two derivatives of `(a, b, c)` at maturity `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoeffEval {
    pub x: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub da: f64,
    pub db: f64,
    pub dc: f64,
    pub dda: f64,
    pub ddb: f64,
    pub ddc: f64,
}

impl CoeffEval {
    /// `(a, b, c)` differentiated `d` times.
    pub fn row(&self, d: usize) -> [f64; 3] {
        match d {
            0 => [self.a, self.b, self.c],
            1 => [self.da, self.db, self.dc],
            _ => [self.dda, self.ddb, self.ddc],
        }
    }
}

/// The line `alpha + beta1 z₁ + beta2 z₂ = 0`; its positive side is where the
/// expression is positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Line {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl Line {
    pub fn from_row(r: [f64; 3]) -> Line {
        Line {
            alpha: r[0],
            beta1: r[1],
            beta2: r[2],
        }
    }

    pub fn eval(&self, z: &Point) -> f64 {
        self.alpha + self.beta1 * z.z1 + self.beta2 * z.z2
    }

    /// Same line and orientation, scaled to `|(beta1, beta2)| = 1`.
    pub fn normalized(&self) -> Line {
        let n = self.beta1.hypot(self.beta2);
        Line {
            alpha: self.alpha / n,
            beta1: self.beta1 / n,
            beta2: self.beta2 / n,
        }
    }

    /// Signed Euclidean distance, positive on the positive side.
    pub fn signed_distance(&self, z: &Point) -> f64 {
        self.eval(z) / self.beta1.hypot(self.beta2)
    }

    /// Unit direction vector `(beta2, −beta1)/|β|`.
    pub fn direction(&self) -> Point {
        let n = self.beta1.hypot(self.beta2);
        Point::new(self.beta2 / n, -self.beta1 / n)
    }

    /// Sine of the angle between the two lines.
    pub fn sin_angle(&self, other: &Line) -> f64 {
        let a = self.normalized();
        let b = other.normalized();
        a.beta1 * b.beta2 - a.beta2 * b.beta1
    }

    pub fn intersect(&self, other: &Line) -> Option<Point> {
        let det = self.beta1 * other.beta2 - self.beta2 * other.beta1;
        let scale = self.beta1.hypot(self.beta2) * other.beta1.hypot(other.beta2);
        if det.abs() <= 1e-14 * scale {
            return None;
        }
        let z1 = (-self.alpha * other.beta2 + other.alpha * self.beta2) / det;
        let z2 = (-self.beta1 * other.alpha + other.beta1 * self.alpha) / det;
        Some(Point::new(z1, z2))
    }

    /// Orthogonal projection of `z` onto the line.
    pub fn project(&self, z: &Point) -> Point {
        let n = self.normalized();
        let d = n.eval(z);
        Point::new(z.z1 - d * n.beta1, z.z2 - d * n.beta2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LimitEnd {
    Zero,
    Infinity,
}

fn det3(r0: [f64; 3], r1: [f64; 3], r2: [f64; 3]) -> f64 {
    r0[0] * (r1[1] * r2[2] - r1[2] * r2[1]) - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
}

fn norm3(r: [f64; 3]) -> f64 {
    (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt()
}

/// Solve `b z₁ + c z₂ = −a` for two rows `(a, b, c)`.
fn cramer(r: [f64; 3], s: [f64; 3]) -> Point {
    let det = r[1] * s[2] - s[1] * r[2];
    Point::new(
        (s[0] * r[2] - r[0] * s[2]) / det,
        (r[0] * s[1] - s[0] * r[1]) / det,
    )
}

/// Evaluator for the line family of one curve kind, with all
/// parameter-dependent constants precomputed.
#[derive(Debug, Clone)]
pub struct LineFamily {
    params: ModelParams,
    kind: CurveKind,
    l1: f64,
    l2: f64,
    w: [f64; 5],
    mu: [f64; 5],
}

impl LineFamily {
    pub fn new(p: &ModelParams, kind: CurveKind) -> Self {
        let (w, mu) = operator_terms(p);
        LineFamily {
            params: *p,
            kind,
            l1: p.lambda1(),
            l2: p.lambda2(),
            w,
            mu,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    /// Numerical proxy for `x = ∞`: sixty times the slowest relaxation time
    /// among `1/λ₁` and `1/(λ₂ − λ₁)`.
    pub fn x_far(&self) -> f64 {
        FAR_MULTIPLE / self.l1.min(self.l2 - self.l1)
    }

    /// Smallest positive grid maturity.
    pub fn x_min(&self) -> f64 {
        1e-6 / self.l2.max(1.0)
    }

    /// Raw coefficients and derivatives. `x = 0` yields the limit values.
    pub fn coeffs(&self, x: f64) -> CoeffEval {
        let k = Kernel::from(self.kind);
        let mut rows = [[0.0; 3]; 3];
        for (d, row) in rows.iter_mut().enumerate() {
            let a: f64 = -(0..5)
                .map(|i| self.w[i] * kernel_value(k, x, self.mu[i], d as u8))
                .sum::<f64>();
            *row = [
                a,
                kernel_value(k, x, self.l1, d as u8),
                kernel_value(k, x, self.l2, d as u8),
            ];
        }
        CoeffEval {
            x,
            a: rows[0][0],
            b: rows[0][1],
            c: rows[0][2],
            da: rows[1][0],
            db: rows[1][1],
            dc: rows[1][2],
            dda: rows[2][0],
            ddb: rows[2][1],
            ddc: rows[2][2],
        }
    }

    /// Whether the yield family uses the plain `(y, y')` rows at `x`.
    fn yield_small(&self, x: f64) -> bool {
        self.l2 * x <= 1.0
    }

    /// `e^{λ₁x} (a_f, b_f, c_f)`, bounded for all `x ≥ 0`.
    fn forward_scaled_row(&self, x: f64) -> [f64; 3] {
        let (l1, l2) = (self.l1, self.l2);
        let a: f64 = (0..5)
            .map(|i| self.w[i] * self.mu[i] * ((l1 - self.mu[i]) * x).exp())
            .sum();
        [a, -l1, -l2 * ((l1 - l2) * x).exp()]
    }

    /// `x² (a_y, b_y, c_y)`.
    fn yield_scaled_row(&self, x: f64) -> [f64; 3] {
        let a: f64 = -(0..5)
            .map(|i| self.w[i] * psi(self.mu[i] * x) / self.mu[i])
            .sum::<f64>();
        [a, psi(self.l1 * x) / self.l1, psi(self.l2 * x) / self.l2]
    }

    /// `e^{νx} (f' + λ₁ f)` with `ν = min(2λ₁, λ₂)`; its `b` entry vanishes.
    fn forward_combo_row(&self, x: f64) -> [f64; 3] {
        let (l1, l2) = (self.l1, self.l2);
        let nu = (2.0 * l1).min(l2);
        let a: f64 = (0..5)
            .map(|i| self.w[i] * self.mu[i] * (l1 - self.mu[i]) * ((nu - self.mu[i]) * x).exp())
            .sum();
        [a, 0.0, l2 * (l2 - l1) * ((nu - l2) * x).exp()]
    }

    /// Line `ℓₓ`, normalized so that `|(beta1, beta2)| = 1`.
    pub fn line(&self, x: f64) -> Line {
        let row = match self.kind {
            CurveKind::Forward => self.forward_scaled_row(x),
            CurveKind::Yield => {
                if self.yield_small(x) {
                    self.coeffs(x).row(0)
                } else {
                    self.yield_scaled_row(x)
                }
            }
        };
        Line::from_row(row).normalized()
    }

    /// Envelope point `η(x)`; `x = 0` gives the contact point on `ℓ₀`.
    /// May be non-finite for very large `x` when the envelope diverges.
    pub fn envelope(&self, x: f64) -> Point {
        match self.kind {
            CurveKind::Forward => {
                let (l1, l2) = (self.l1, self.l2);
                let mut z1 = 0.0;
                let mut z2 = 0.0;
                for i in 0..5 {
                    let (w, m) = (self.w[i], self.mu[i]);
                    z1 += w * m * (m - l2) * ((l1 - m) * x).exp();
                    z2 += w * m * (m - l1) * ((l2 - m) * x).exp();
                }
                Point::new(z1 / (l1 * (l1 - l2)), z2 / (l2 * (l2 - l1)))
            }
            CurveKind::Yield => {
                if self.yield_small(x) {
                    let ce = self.coeffs(x);
                    cramer(ce.row(0), ce.row(1))
                } else {
                    cramer(self.yield_scaled_row(x), self.forward_scaled_row(x))
                }
            }
        }
    }

    /// Tangent vector `η'(x)`.
    pub fn tangent(&self, x: f64) -> Point {
        match self.kind {
            CurveKind::Forward => {
                let (l1, l2) = (self.l1, self.l2);
                let mut t1 = 0.0;
                let mut t2 = 0.0;
                for i in 0..5 {
                    let (w, m) = (self.w[i], self.mu[i]);
                    t1 += w * m * (m - l2) * (l1 - m) * ((l1 - m) * x).exp();
                    t2 += w * m * (m - l1) * (l2 - m) * ((l2 - m) * x).exp();
                }
                Point::new(t1 / (l1 * (l1 - l2)), t2 / (l2 * (l2 - l1)))
            }
            CurveKind::Yield => {
                if self.yield_small(x) {
                    let ce = self.coeffs(x);
                    let (r0, r1, r2) = (ce.row(0), ce.row(1), ce.row(2));
                    let w2 = r0[1] * r1[2] - r1[1] * r0[2];
                    let t = det3(r0, r1, r2) / (w2 * w2);
                    Point::new(t * r0[2], -t * r0[1])
                } else {
                    let y = self.yield_scaled_row(x);
                    let f = self.forward_scaled_row(x);
                    let r = self.forward_combo_row(x);
                    let nu = (2.0 * self.l1).min(self.l2);
                    let d2 = y[1] * f[2] - f[1] * y[2];
                    let t = det3(y, f, r) * ((self.l1 - nu) * x).exp() / (d2 * d2);
                    Point::new(t * y[2], -t * y[1])
                }
            }
        }
    }

    /// A positive multiple of `W(a, b, c)(x)` normalized to `[-1, 1]`; its
    /// sign is reliable for all `x`, including where the raw Wronskian
    /// underflows.
    pub fn w3_normalized(&self, x: f64) -> f64 {
        match self.kind {
            CurveKind::Forward => {
                let t = self.reduced_terms(x);
                let s = t[0].abs() + t[1].abs() + t[2].abs();
                (t[0] + t[1] + t[2]) / s
            }
            CurveKind::Yield => {
                let (r0, r1, r2) = if self.yield_small(x) {
                    let ce = self.coeffs(x);
                    (ce.row(0), ce.row(1), ce.row(2))
                } else {
                    (
                        self.yield_scaled_row(x),
                        self.forward_scaled_row(x),
                        self.forward_combo_row(x),
                    )
                };
                det3(r0, r1, r2) / (norm3(r0) * norm3(r1) * norm3(r2))
            }
        }
    }

    /// The three exponential terms of `W(a_f,b_f,c_f)/|W(b_f,c_f)|`, multiplied
    /// by `e^{2λ₁x}` to stay bounded.
    fn reduced_terms(&self, x: f64) -> [f64; 3] {
        let p = &self.params;
        let (l1, l2, s1, s2, rho) = (self.l1, self.l2, p.sigma1(), p.sigma2(), p.rho());
        [
            -s1 * s1 * (2.0 * l1 - l2),
            -rho * s1 * s2 * (l1 + l2) * ((l1 - l2) * x).exp(),
            -s2 * s2 * (2.0 * l2 - l1) * (2.0 * (l1 - l2) * x).exp(),
        ]
    }

    /// Sign of `W(b, c)(x)`, reliable for all `x > 0`.
    pub fn w2_sign(&self, x: f64) -> f64 {
        match self.kind {
            CurveKind::Forward => (self.l1 - self.l2).signum(),
            CurveKind::Yield => {
                if self.yield_small(x) {
                    let ce = self.coeffs(x);
                    (ce.b * ce.dc - ce.db * ce.c).signum()
                } else {
                    let y = self.yield_scaled_row(x);
                    let f = self.forward_scaled_row(x);
                    (y[1] * f[2] - f[1] * y[2]).signum()
                }
            }
        }
    }

    /// Slope `s(x) = −b(x)/c(x)` of `ℓₓ` in the `(z₁, z₂)` plane.
    pub fn slope(&self, x: f64) -> f64 {
        let l = self.line(x);
        -l.beta1 / l.beta2
    }

    /// Limit line `ℓ₀` or `ℓ_∞`, normalized.
    pub fn limit_line(&self, end: LimitEnd) -> Result<Line> {
        let p = &self.params;
        match (end, self.kind) {
            (LimitEnd::Zero, _) => Ok(Line {
                alpha: self.l1 * p.theta1() + self.l2 * p.theta2(),
                beta1: -self.l1,
                beta2: -self.l2,
            }
            .normalized()),
            (LimitEnd::Infinity, CurveKind::Forward) => Ok(Line {
                alpha: derived_coefficients(p).u1,
                beta1: -1.0,
                beta2: 0.0,
            }),
            (LimitEnd::Infinity, CurveKind::Yield) => {
                let xf = self.x_far();
                let l_far = Line::from_row(self.yield_scaled_row(xf)).normalized();
                let l_half = Line::from_row(self.yield_scaled_row(0.5 * xf)).normalized();
                let diff = (l_far.alpha - l_half.alpha)
                    .abs()
                    .max((l_far.beta1 - l_half.beta1).abs())
                    .max((l_far.beta2 - l_half.beta2).abs());
                let scale = 1.0 + l_far.alpha.abs();
                if !diff.is_finite() || diff > 1e-9 * scale {
                    return Err(Error::Convergence(format!(
                        "yield limit line at x={xf} moved by {diff:e} since x={}",
                        0.5 * xf
                    )));
                }
                Ok(l_far)
            }
        }
    }

    /// Closed-form limit of `x² (a_y, b_y, c_y)`: `(Σ w_k/μ_k, −1/λ₁, −1/λ₂)`.
    pub fn yield_infinity_closed_form(&self) -> Line {
        let a: f64 = (0..5).map(|i| self.w[i] / self.mu[i]).sum();
        Line {
            alpha: a,
            beta1: -1.0 / self.l1,
            beta2: -1.0 / self.l2,
        }
    }
}

pub fn eval_coeffs(p: &ModelParams, kind: CurveKind, x: f64) -> Result<CoeffEval> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(x));
    }
    Ok(LineFamily::new(p, kind).coeffs(x))
}

pub fn limit_line(p: &ModelParams, kind: CurveKind, end: LimitEnd) -> Result<Line> {
    LineFamily::new(p, kind).limit_line(end)
}

/// The `ℓ_∞` equation for the yield curve exactly as it is commonly printed,
/// `σ₁² + σ₂² + r/(λ₁+λ₂) + 2u₁/λ₁ − z₁/λ₁ − z₂/λ₂ = 0`. It disagrees with
/// the numerical limit and is only used as a diagnostic.
pub fn printed_yield_infinity_line(p: &ModelParams) -> Line {
    let d = derived_coefficients(p);
    let (l1, l2) = (p.lambda1(), p.lambda2());
    Line {
        alpha: p.sigma1().powi(2) + p.sigma2().powi(2) + d.r_coef / (l1 + l2) + 2.0 * d.u1 / l1,
        beta1: -1.0 / l1,
        beta2: -1.0 / l2,
    }
}

/// Literal `W(b, c)(x) = b c' − b' c`.
pub fn wronskian2(p: &ModelParams, kind: CurveKind, x: f64) -> Result<f64> {
    let ce = eval_coeffs(p, kind, x)?;
    Ok(ce.b * ce.dc - ce.db * ce.c)
}

/// Literal `W(a, b, c)(x)`, the determinant of the rows `(a,b,c)`,
/// `(a',b',c')`, `(a'',b'',c'')`.
pub fn wronskian3(p: &ModelParams, kind: CurveKind, x: f64) -> Result<f64> {
    let ce = eval_coeffs(p, kind, x)?;
    Ok(det3(ce.row(0), ce.row(1), ce.row(2)))
}

/// `W(a_f, b_f, c_f)(x) / |W(b_f, c_f)(x)|` in closed form:
/// `−σ₂²(2λ₂−λ₁)e^{−2λ₂x} − ρσ₁σ₂(λ₁+λ₂)e^{−(λ₁+λ₂)x} − σ₁²(2λ₁−λ₂)e^{−2λ₁x}`.
/// Valid for `x ≥ 0`.
pub fn reduced_forward_wronskian3(p: &ModelParams, x: f64) -> f64 {
    let fam = LineFamily::new(p, CurveKind::Forward);
    let t = fam.reduced_terms(x);
    (t[0] + t[1] + t[2]) * (-2.0 * p.lambda1() * x).exp()
}

/// Number of sign changes in the coefficient sequence of
/// [`reduced_forward_wronskian3`] ordered by decay rate; an upper bound on the
/// number of its zeros.
pub fn descartes_bound(p: &ModelParams) -> usize {
    let (l1, l2, s1, s2, rho) = (p.lambda1(), p.lambda2(), p.sigma1(), p.sigma2(), p.rho());
    let coeffs = [
        -s1 * s1 * (2.0 * l1 - l2),
        -rho * s1 * s2 * (l1 + l2),
        -s2 * s2 * (2.0 * l2 - l1),
    ];
    sign_change_brackets(&coeffs).len()
}

/// `A(x)` and `B(x)` of the bond price `exp(A(x) + B(x)ᵀz)` as printed; the
/// slope coefficients satisfy `a_f = A''`, `(b_f, c_f) = B''`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BondCoefficients {
    pub a: f64,
    pub b: [f64; 2],
}

/// `f(λ, x) = (1 − e^{−λx})/λ`.
pub fn bond_f(lambda: f64, x: f64) -> f64 {
    -(-lambda * x).exp_m1() / lambda
}

pub fn bond_coefficients(p: &ModelParams, x: f64) -> Result<BondCoefficients> {
    if x < 0.0 || !x.is_finite() {
        return Err(Error::Domain(x));
    }
    let (w, mu) = operator_terms(p);
    let a = -(0..5).map(|k| w[k] * bond_f(mu[k], x)).sum::<f64>();
    Ok(BondCoefficients {
        a,
        b: [bond_f(p.lambda1(), x), bond_f(p.lambda2(), x)],
    })
}

/// `A'(x) = −Σ w_k e^{−μ_k x}`.
pub fn bond_a_prime(p: &ModelParams, x: f64) -> f64 {
    let (w, mu) = operator_terms(p);
    -(0..5).map(|k| w[k] * (-mu[k] * x).exp()).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionCheck {
    pub assumption: Assumption,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub kind: CurveKind,
    pub checks: Vec<AssumptionCheck>,
    /// Slope of `ℓₓ` at the smallest and largest grid maturity.
    pub slope_range: [f64; 2],
    /// Whether `s(x)` is non-increasing along the grid.
    pub slope_monotone: bool,
    /// Sign changes of `W(a, b, c)` on the grid.
    pub w3_sign_changes: usize,
    /// Descartes bound (forward family only).
    pub descartes_bound: Option<usize>,
    /// `|a_f(0) − (λ₁θ₁ + λ₂θ₂)|`, zero when the `u_i` are consistent.
    pub a_f_identity_residual: f64,
    /// Maximum distance between the numerical `ℓ_∞` and the printed closed
    /// form (yield family only), measured as the difference of the
    /// normalized offsets.
    pub printed_limit_line_gap: Option<f64>,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Default maturity grid for checks and scans.
pub fn check_grid(fam: &LineFamily) -> Vec<f64> {
    geomspace(fam.x_min(), fam.x_far(), 2048)
}

/// Numerically check A1–A6 on a log grid; never fails.
pub fn assumption_report(p: &ModelParams, kind: CurveKind) -> AssumptionReport {
    let fam = LineFamily::new(p, kind);
    let grid = check_grid(&fam);
    let mut checks = Vec::new();

    // A1
    let mut bad = None;
    for &x in &grid {
        let l = fam.line(x);
        if !(l.beta1 != 0.0 && l.beta2 != 0.0 && l.beta1.is_finite() && l.beta2.is_finite()) {
            bad = Some(x);
            break;
        }
    }
    checks.push(AssumptionCheck {
        assumption: Assumption::NonVanishingSlopes,
        passed: bad.is_none(),
        detail: match bad {
            None => format!("b, c non-zero on {} grid points", grid.len()),
            Some(x) => format!("b or c vanishes at x={x}"),
        },
    });

    // A2, A3
    let l0 = fam.limit_line(LimitEnd::Zero);
    let linf = fam.limit_line(LimitEnd::Infinity);
    checks.push(AssumptionCheck {
        assumption: Assumption::FiniteLimits,
        passed: l0.is_ok() && linf.is_ok(),
        detail: match &linf {
            Ok(_) => "limit lines converge".into(),
            Err(e) => e.to_string(),
        },
    });
    let sin = match (&l0, &linf) {
        (Ok(a), Ok(b)) => a.sin_angle(b),
        _ => 0.0,
    };
    checks.push(AssumptionCheck {
        assumption: Assumption::LimitLinesIntersect,
        passed: sin.abs() > 1e-12,
        detail: format!("sin(angle(l0, l_inf)) = {sin:.6e}"),
    });

    // A4 and strict monotonicity of the slope: s' = W(b,c)/c² < 0
    let w2_ok = grid.iter().all(|&x| fam.w2_sign(x) < 0.0);
    checks.push(AssumptionCheck {
        assumption: Assumption::NonVanishingWronskian,
        passed: w2_ok,
        detail: if w2_ok {
            "W(b,c) < 0 on the grid".into()
        } else {
            "W(b,c) changes sign".into()
        },
    });

    // A5
    let w3: Vec<f64> = grid.iter().map(|&x| fam.w3_normalized(x)).collect();
    let changes = sign_change_brackets(&w3).len();
    let bound = match kind {
        CurveKind::Forward => Some(descartes_bound(p)),
        CurveKind::Yield => None,
    };
    let cap = bound.unwrap_or(2);
    checks.push(AssumptionCheck {
        assumption: Assumption::FinitelyManyRegressionPoints,
        passed: changes <= cap,
        detail: format!("{changes} sign changes of W(a,b,c), bound {cap}"),
    });

    // A6 and slope monotonicity
    let slopes: Vec<f64> = grid.iter().map(|&x| fam.slope(x)).collect();
    let slope_monotone = slopes
        .windows(2)
        .all(|s| s[1] <= s[0] + 4.0 * f64::EPSILON * s[0].abs());
    let s_max = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    checks.push(AssumptionCheck {
        assumption: Assumption::ObliqueHelperLine,
        passed: s_max < 0.0,
        detail: format!("largest slope {s_max:.6e}, horizontal lines are oblique"),
    });

    let a_f0 = LineFamily::new(p, CurveKind::Forward).coeffs(0.0).a;
    let a_f_identity_residual =
        (a_f0 - (p.lambda1() * p.theta1() + p.lambda2() * p.theta2())).abs();
    let printed_limit_line_gap = match (kind, &linf) {
        (CurveKind::Yield, Ok(l)) => {
            let printed = printed_yield_infinity_line(p).normalized();
            Some((printed.alpha - l.alpha).abs())
        }
        _ => None,
    };

    AssumptionReport {
        kind,
        checks,
        slope_range: [slopes[0], *slopes.last().unwrap()],
        slope_monotone,
        w3_sign_changes: changes,
        descartes_bound: bound,
        a_f_identity_residual,
        printed_limit_line_gap,
    }
}

/// Like [`assumption_report`] but fails on the first violated assumption.
pub fn verify_assumptions(p: &ModelParams, kind: CurveKind) -> Result<AssumptionReport> {
    let r = assumption_report(p, kind);
    if let Some(c) = r.checks.iter().find(|c| !c.passed) {
        return Err(Error::AssumptionViolation {
            which: c.assumption,
            detail: c.detail.clone(),
        });
    }
    Ok(r)
}

//! Two-factor Vasicek parameters, validation and regime classification.
//!
//! The factor process follows
//! `dZ^i = -λ_i (Z^i - θ_i) dt + σ_i dB^i` with `d<B^1, B^2> = ρ dt`,
//! and the short rate is `r = κ + Z^1 + Z^2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to detect the scale-critical boundary `2λ₁ = λ₂`.
pub const SCALE_CRITICAL_TOL: f64 = 1e-12;

/// Unvalidated parameter tuple, e.g. as read from a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub kappa: f64,
}

/// Validated model parameters.
///
/// Invariants: `0 < λ₁ < λ₂`, `σ₁, σ₂ > 0`, `-1 ≤ ρ ≤ 1`, all finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    raw: RawParams,
}

impl ModelParams {
    pub fn lambda1(&self) -> f64 {
        self.raw.lambda1
    }
    pub fn lambda2(&self) -> f64 {
        self.raw.lambda2
    }
    pub fn sigma1(&self) -> f64 {
        self.raw.sigma1
    }
    pub fn sigma2(&self) -> f64 {
        self.raw.sigma2
    }
    pub fn rho(&self) -> f64 {
        self.raw.rho
    }
    pub fn theta1(&self) -> f64 {
        self.raw.theta1
    }
    pub fn theta2(&self) -> f64 {
        self.raw.theta2
    }
    pub fn kappa(&self) -> f64 {
        self.raw.kappa
    }
    pub fn raw(&self) -> RawParams {
        self.raw
    }

    /// Copy with a different mean-reversion level; used for translation checks.
    pub fn with_theta(&self, theta1: f64, theta2: f64) -> Result<Self> {
        validate_params(RawParams {
            theta1,
            theta2,
            ..self.raw
        })
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        validate_params(RawParams { kappa, ..self.raw })
    }
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        validate_params(raw)
    }
}

pub fn validate_params(raw: RawParams) -> Result<ModelParams> {
    let fields = [
        ("lambda1", raw.lambda1),
        ("lambda2", raw.lambda2),
        ("sigma1", raw.sigma1),
        ("sigma2", raw.sigma2),
        ("rho", raw.rho),
        ("theta1", raw.theta1),
        ("theta2", raw.theta2),
        ("kappa", raw.kappa),
    ];
    for (name, v) in fields {
        if !v.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }
    if !(raw.lambda1 > 0.0 && raw.lambda1 < raw.lambda2) {
        return Err(Error::OrderViolation {
            lambda1: raw.lambda1,
            lambda2: raw.lambda2,
        });
    }
    if raw.sigma1 <= 0.0 {
        return Err(Error::NonPositiveVol {
            name: "sigma1",
            value: raw.sigma1,
        });
    }
    if raw.sigma2 <= 0.0 {
        return Err(Error::NonPositiveVol {
            name: "sigma2",
            value: raw.sigma2,
        });
    }
    if !(-1.0..=1.0).contains(&raw.rho) {
        return Err(Error::CorrelationOutOfRange(raw.rho));
    }
    Ok(ModelParams { raw })
}

/// `rCoef = ρσ₁σ₂/(λ₁λ₂)` and `u_i = θ_i − σ_i²/λ_i² − rCoef`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedCoefficients {
    pub r_coef: f64,
    pub u1: f64,
    pub u2: f64,
}

pub fn derived_coefficients(p: &ModelParams) -> DerivedCoefficients {
    let (l1, l2, s1, s2) = (p.lambda1(), p.lambda2(), p.sigma1(), p.sigma2());
    let r_coef = p.rho() * s1 * s2 / (l1 * l2);
    DerivedCoefficients {
        r_coef,
        u1: p.theta1() - s1 * s1 / (l1 * l1) - r_coef,
        u2: p.theta2() - s2 * s2 / (l2 * l2) - r_coef,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScaleRegime {
    /// `2λ₁ < λ₂`
    ScaleSeparated,
    /// `2λ₁ > λ₂`
    ScaleProximal,
    /// `2λ₁ = λ₂` up to [`SCALE_CRITICAL_TOL`]
    ScaleCritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RhoSign {
    NonNegative,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Regime {
    pub scale: ScaleRegime,
    pub rho_sign: RhoSign,
}

impl Regime {
    /// Human-readable regime name, e.g. `scale-proximal with rho >= 0`.
    pub fn describe(&self) -> String {
        let scale = match self.scale {
            ScaleRegime::ScaleSeparated => "scale-separated",
            ScaleRegime::ScaleProximal => "scale-proximal",
            ScaleRegime::ScaleCritical => "scale-critical",
        };
        let rho = match self.rho_sign {
            RhoSign::NonNegative => "rho >= 0",
            RhoSign::Negative => "rho < 0",
        };
        format!("{scale} with {rho}")
    }
}

pub fn classify_regime(p: &ModelParams) -> Regime {
    let gap = 2.0 * p.lambda1() - p.lambda2();
    let scale = if gap.abs() <= SCALE_CRITICAL_TOL * p.lambda2() {
        ScaleRegime::ScaleCritical
    } else if gap < 0.0 {
        ScaleRegime::ScaleSeparated
    } else {
        ScaleRegime::ScaleProximal
    };
    let rho_sign = if p.rho() >= 0.0 {
        RhoSign::NonNegative
    } else {
        RhoSign::Negative
    };
    Regime { scale, rho_sign }
}

/// Which term-structure curve the line family describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Forward,
    Yield,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveKind::Forward => f.write_str("forward"),
            CurveKind::Yield => f.write_str("yield"),
        }
    }
}

impl FromStr for CurveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "forward" | "f" => Ok(CurveKind::Forward),
            "yield" | "y" => Ok(CurveKind::Yield),
            other => Err(Error::Config(format!(
                "unknown curve kind {other:?}, expected forward|yield"
            ))),
        }
    }
}

/// Parameter sets with well-known state-space pictures.
pub mod presets {
    use super::{validate_params, ModelParams, RawParams};

    fn build(l1: f64, l2: f64, s1: f64, s2: f64, rho: f64, t1: f64, t2: f64) -> ModelParams {
        validate_params(RawParams {
            lambda1: l1,
            lambda2: l2,
            sigma1: s1,
            sigma2: s2,
            rho,
            theta1: t1,
            theta2: t2,
            kappa: 0.0,
        })
        .expect("preset parameters are valid")
    }

    /// Scale-proximal, positive correlation: five regions.
    pub fn proximal_positive() -> ModelParams {
        build(1.0, 1.5, 1.0, 1.0, 0.5, 0.0, 0.0)
    }

    /// Scale-separated with a single cusp and an asymptotic end.
    pub fn separated() -> ModelParams {
        build(1.0, 2.3, 1.0, 0.5, 0.5, 0.0, 0.0)
    }

    /// Scale-proximal, negative correlation: two cusps, one self-intersection.
    pub fn proximal_negative() -> ModelParams {
        build(1.0, 1.86, 1.0, 0.65, -0.5, 0.0, 0.0)
    }

    /// Strongly anti-correlated calibration used for shape probabilities.
    pub fn anticorrelated() -> ModelParams {
        build(0.178, 0.401, 0.0372, 0.037, -0.996, 0.0, 0.01297)
    }
}

//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Which of the structural assumptions on the line family failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Assumption {
    /// `b(x)` and `c(x)` never vanish on `(0, ∞)`.
    NonVanishingSlopes,
    /// Finite limits of the (rescaled) coefficients at `0` and `∞`.
    FiniteLimits,
    /// The limiting lines are not parallel.
    LimitLinesIntersect,
    /// `W(b, c)` has no zeros.
    NonVanishingWronskian,
    /// `W(a, b, c)` has finitely many zeros.
    FinitelyManyRegressionPoints,
    /// A horizontal line is oblique to every member of the family.
    ObliqueHelperLine,
}

impl std::fmt::Display for Assumption {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Assumption::NonVanishingSlopes => "A1: b(x), c(x) non-vanishing",
            Assumption::FiniteLimits => "A2: finite limits at 0 and infinity",
            Assumption::LimitLinesIntersect => "A3: limit lines not parallel",
            Assumption::NonVanishingWronskian => "A4: W(b,c) non-vanishing",
            Assumption::FinitelyManyRegressionPoints => "A5: finitely many zeros of W(a,b,c)",
            Assumption::ObliqueHelperLine => "A6: horizontal helper line is oblique",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("lambda1 must be positive and strictly smaller than lambda2 (got lambda1={lambda1}, lambda2={lambda2})")]
    OrderViolation { lambda1: f64, lambda2: f64 },

    #[error("volatility {name} must be positive (got {value})")]
    NonPositiveVol { name: &'static str, value: f64 },

    #[error("correlation must lie in [-1, 1] (got {0})")]
    CorrelationOutOfRange(f64),

    #[error("parameter {0} is not a finite number")]
    NonFinite(&'static str),

    #[error("config error: {0}")]
    Config(String),

    #[error("maturity must be positive (got {0})")]
    Domain(f64),

    #[error("numerical limit did not converge: {0}")]
    Convergence(String),

    #[error("assumption violated: {which} ({detail})")]
    AssumptionViolation { which: Assumption, detail: String },

    #[error("point ({z1}, {z2}) lies on the augmented envelope")]
    OnCurve { z1: f64, z2: f64 },

    #[error("sign scan is indeterminate: {0}")]
    Indeterminate(String),

    #[error("inconsistent parity between extrema count and quadrant: {0}")]
    InconsistentParity(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::OrderViolation { .. }
            | Error::NonPositiveVol { .. }
            | Error::CorrelationOutOfRange(_)
            | Error::NonFinite(_)
            | Error::Config(_)
            | Error::Io(_) => 2,
            Error::AssumptionViolation { .. } => 3,
            Error::Domain(_)
            | Error::Convergence(_)
            | Error::OnCurve { .. }
            | Error::Indeterminate(_)
            | Error::InconsistentParity(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

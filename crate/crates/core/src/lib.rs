//! State-contingent shapes of forward and yield curves in the two-factor
//! Vasicek model.
//!
//! For a state `z = (z₁, z₂)` the slope of the forward (or yield) curve at
//! maturity `x` is affine in `z`, so the states with an extremum at `x` form a
//! line `ℓₓ`. The envelope of the family `(ℓₓ)`, closed up through the
//! intersection of the limit lines `ℓ₀` and `ℓ_∞`, decides the number of local
//! extrema through its winding number around `z`.
//!
//! Modules, bottom up:
//! * [`model`]: parameters, validation, regimes
//! * [`coeffs`]: the line family, limit lines, Wronskians
//! * [`envelope`]: envelope curve, cusps, augmented polyline, special points
//! * [`classify`]: quadrants, winding numbers, shape labels, brute-force oracle
//! * [`arrangement`]: planar subdivision by the envelope and the limit lines
//! * [`decompose`]: region map, transition graph, classification table
//! * [`stochastic`]: stationary sampling and shape probabilities
//! * [`svg`]: state-space and term-structure figures

pub mod arrangement;
pub mod classify;
pub mod coeffs;
pub mod config;
pub mod decompose;
pub mod envelope;
pub mod error;
pub mod geom;
pub mod model;
pub mod roots;
pub mod stochastic;
pub mod svg;

pub use classify::{Classifier, Quadrant, ShapeLabel, ShapeResult};
pub use coeffs::{CoeffEval, LimitEnd, Line, LineFamily};
pub use decompose::{decompose, Decomposition, RegionMap, TransitionGraph};
pub use envelope::{AugmentedEnvelope, EnvelopePoint, SpecialPoints};
pub use error::{Error, Result};
pub use geom::Point;
pub use model::{CurveKind, ModelParams, RawParams, Regime};
pub use stochastic::{estimate_shape_probabilities, ShapeProbabilities};

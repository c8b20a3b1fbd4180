//! Flat `key = value` parameter files.
//!
//! ```text
//! # scale-proximal example
//! lambda1 = 1.0
//! lambda2 = 1.5
//! sigma1 = 1
//! sigma2 = 1
//! rho = 0.5
//! theta1 = 0
//! theta2 = 0
//! kappa = 0
//! curve = forward
//! ```
//!
//! `theta1`, `theta2` and `kappa` default to zero and `curve` to `forward`;
//! the remaining keys are required. `#` starts a comment.

use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{validate_params, CurveKind, ModelParams, RawParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub params: ModelParams,
    pub curve: CurveKind,
}

pub fn parse_config(text: &str) -> Result<Config> {
    let mut vals: [Option<f64>; 8] = [None; 8];
    const KEYS: [&str; 8] = [
        "lambda1", "lambda2", "sigma1", "sigma2", "rho", "theta1", "theta2", "kappa",
    ];
    let mut curve = CurveKind::Forward;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim();
        let value = value.trim().trim_matches('"');
        if key == "curve" {
            curve = value.parse()?;
            continue;
        }
        let idx = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| Error::Config(format!("line {}: unknown key {key:?}", lineno + 1)))?;
        if vals[idx].is_some() {
            return Err(Error::Config(format!(
                "line {}: duplicate key {key:?}",
                lineno + 1
            )));
        }
        let v: f64 = value.parse().map_err(|_| {
            Error::Config(format!(
                "line {}: {key} = {value:?} is not a number",
                lineno + 1
            ))
        })?;
        vals[idx] = Some(v);
    }
    let req = |i: usize| vals[i].ok_or_else(|| Error::Config(format!("missing key {:?}", KEYS[i])));
    let raw = RawParams {
        lambda1: req(0)?,
        lambda2: req(1)?,
        sigma1: req(2)?,
        sigma2: req(3)?,
        rho: req(4)?,
        theta1: vals[5].unwrap_or(0.0),
        theta2: vals[6].unwrap_or(0.0),
        kappa: vals[7].unwrap_or(0.0),
    };
    Ok(Config {
        params: validate_params(raw)?,
        curve,
    })
}

pub fn load_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// Render parameters back into the file format.
pub fn render_config(p: &ModelParams, curve: CurveKind) -> String {
    format!(
        "lambda1 = {}\nlambda2 = {}\nsigma1 = {}\nsigma2 = {}\nrho = {}\ntheta1 = {}\ntheta2 = {}\nkappa = {}\ncurve = {}\n",
        p.lambda1(),
        p.lambda2(),
        p.sigma1(),
        p.sigma2(),
        p.rho(),
        p.theta1(),
        p.theta2(),
        p.kappa(),
        curve
    )
}

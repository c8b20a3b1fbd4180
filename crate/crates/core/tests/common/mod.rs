//! Random parameter sets per regime cell, shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vasicek_envelope::model::{validate_params, ModelParams, RawParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    ProximalPositive,
    ProximalNegative,
    SeparatedPositive,
    SeparatedNegative,
    CriticalPositive,
    CriticalNegative,
}

pub const CELLS: [Cell; 6] = [
    Cell::ProximalPositive,
    Cell::ProximalNegative,
    Cell::SeparatedPositive,
    Cell::SeparatedNegative,
    Cell::CriticalPositive,
    Cell::CriticalNegative,
];

pub fn random_params(rng: &mut impl Rng, cell: Cell) -> ModelParams {
    let lambda1 = rng.random_range(0.1..1.5);
    let ratio = match cell {
        Cell::ProximalPositive | Cell::ProximalNegative => rng.random_range(1.1..1.9),
        Cell::SeparatedPositive | Cell::SeparatedNegative => rng.random_range(2.1..4.0),
        Cell::CriticalPositive | Cell::CriticalNegative => 2.0,
    };
    let negative = matches!(
        cell,
        Cell::ProximalNegative | Cell::SeparatedNegative | Cell::CriticalNegative
    );
    let rho: f64 = rng.random_range(0.05..0.99);
    let sigma1 = rng.random_range(0.01..0.3);
    validate_params(RawParams {
        lambda1,
        lambda2: ratio * lambda1,
        sigma1,
        sigma2: sigma1 * rng.random_range(0.25..4.0),
        rho: if negative { -rho } else { rho },
        theta1: rng.random_range(-0.05..0.05),
        theta2: rng.random_range(-0.05..0.05),
        kappa: rng.random_range(-0.02..0.06),
    })
    .expect("generated parameters are valid")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

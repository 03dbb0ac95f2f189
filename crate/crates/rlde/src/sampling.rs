//! Population initialization strategies.
//!
//! The five variants below are the agent's first design object; their index
//! order is part of the action encoding and must not change.
//!
//! RNG use per strategy, for reproducibility: `Random`, `Uniform`, `Normal`
//! and `TentMapping` consume `NP * D` uniform draws in row-major order;
//! `LatinHypercube` consumes, per dimension, `NP` stratum offsets followed by
//! one Fisher-Yates shuffle of the column.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::DetRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitStrategy {
    #[serde(rename = "random")]
    Random,
    #[serde(rename = "latin-hypercube")]
    LatinHypercube,
    #[serde(rename = "uniform")]
    Uniform,
    #[serde(rename = "normal")]
    Normal,
    #[serde(rename = "tent-mapping")]
    TentMapping,
}

/// Action-index order of the strategies (head 0 of the agent).
pub const INIT_STRATEGIES: [InitStrategy; 5] = [
    InitStrategy::Random,
    InitStrategy::LatinHypercube,
    InitStrategy::Uniform,
    InitStrategy::Normal,
    InitStrategy::TentMapping,
];

const TENT_ALPHA: f64 = 0.7;

/// Tent map on a pre-draw u in [0, 1).
pub fn tent_map(u: f64) -> f64 {
    if u < TENT_ALPHA {
        u / TENT_ALPHA
    } else {
        (1.0 - u) / (1.0 - TENT_ALPHA)
    }
}

/// Draws an `NP x D` population matrix inside `[lb, ub]`.
pub fn initialize(
    strategy: InitStrategy,
    np: usize,
    d: usize,
    lb: f64,
    ub: f64,
    rng: &mut DetRng,
) -> Result<Vec<Vec<f64>>> {
    if np == 0 {
        return Err(Error::invalid("population size must be positive"));
    }
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if lb >= ub {
        return Err(Error::invalid(format!("bounds must satisfy lb < ub, got [{lb}, {ub}]")));
    }
    let span = ub - lb;
    let mut pop = vec![vec![0.0; d]; np];
    match strategy {
        InitStrategy::Random | InitStrategy::Uniform => {
            for row in pop.iter_mut() {
                for v in row.iter_mut() {
                    *v = rng.random::<f64>() * span + lb;
                }
            }
        }
        InitStrategy::Normal => {
            // the literal formula: a uniform draw confined to the central
            // sixth above the midpoint
            for row in pop.iter_mut() {
                for v in row.iter_mut() {
                    *v = rng.random::<f64>() * (span / 6.0) + (ub + lb) / 2.0;
                }
            }
        }
        InitStrategy::TentMapping => {
            for row in pop.iter_mut() {
                for v in row.iter_mut() {
                    *v = lb + tent_map(rng.random::<f64>()) * span;
                }
            }
        }
        InitStrategy::LatinHypercube => {
            for j in 0..d {
                let mut column: Vec<f64> = (0..np)
                    .map(|k| (k as f64 + rng.random::<f64>()) / np as f64)
                    .collect();
                for i in (1..np).rev() {
                    let swap_with = rng.random_range(0..=i);
                    column.swap(i, swap_with);
                }
                for (row, v) in pop.iter_mut().zip(column) {
                    row[j] = lb + v * span;
                }
            }
        }
    }
    Ok(pop)
}

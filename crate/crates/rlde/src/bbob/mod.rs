//! Noiseless BBOB-2009-style benchmark suite with deterministic instance
//! generation and reproducible evaluation.
//!
//! Instances are fully determined by `(function_id, dimension, instance_seed)`:
//! every random field (optimum location, optimum value, rotations, peak data)
//! is drawn from its own generator keyed on those three values plus a role
//! tag, so fields can be re-derived independently and are never stored.

mod functions;
pub mod transforms;

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::rng::{derived_rng, next_gaussian, DetRng};

/// Search-space bounds shared by all functions.
pub const LOWER_BOUND: f64 = -5.0;
pub const UPPER_BOUND: f64 = 5.0;

/// A square orthonormal matrix, stored row-major. `None`-like identity is
/// represented explicitly so instances compare field-by-field.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation {
    data: Vec<f64>,
    n: usize,
}

impl Rotation {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Rotation { data, n }
    }

    /// Gram-Schmidt orthonormalization of a matrix of standard-normal draws.
    pub fn random(n: usize, rng: &mut DetRng) -> Self {
        loop {
            let mut rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| next_gaussian(rng)).collect())
                .collect();
            let mut ok = true;
            for i in 0..n {
                for j in 0..i {
                    let dot: f64 = (0..n).map(|k| rows[i][k] * rows[j][k]).sum();
                    for k in 0..n {
                        rows[i][k] -= dot * rows[j][k];
                    }
                }
                let norm: f64 = rows[i].iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm < 1e-9 {
                    ok = false;
                    break;
                }
                for v in rows[i].iter_mut() {
                    *v /= norm;
                }
            }
            if ok {
                let mut data = Vec::with_capacity(n * n);
                for row in rows {
                    data.extend(row);
                }
                return Rotation { data, n };
            }
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// y = M x
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            out[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// y = M^T x
    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                out[j] += self.data[i * n + j] * x[i];
            }
        }
        out
    }
}

/// One peak of the Gallagher functions (f21, f22): location, height, and the
/// permuted diagonal of its scaling matrix (already divided by `alpha^(1/4)`).
#[derive(Clone, Debug, PartialEq)]
pub struct GallagherPeak {
    pub location: Vec<f64>,
    pub weight: f64,
    pub scaling: Vec<f64>,
}

/// One instantiated benchmark function.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    pub function_id: u8,
    pub dimension: usize,
    pub instance_seed: u64,
    pub x_opt: Vec<f64>,
    pub f_opt: f64,
    pub rotation_r: Rotation,
    pub rotation_q: Rotation,
    pub lower: f64,
    pub upper: f64,
    pub(crate) peaks: Vec<GallagherPeak>,
}

/// Serializable descriptor; heavy fields are always re-derived.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct InstanceDescriptor {
    pub function_id: u8,
    pub dimension: usize,
    pub instance_seed: u64,
}

impl ProblemInstance {
    pub fn descriptor(&self) -> InstanceDescriptor {
        InstanceDescriptor {
            function_id: self.function_id,
            dimension: self.dimension,
            instance_seed: self.instance_seed,
        }
    }
}

impl InstanceDescriptor {
    pub fn instantiate(&self) -> Result<ProblemInstance> {
        make_instance(self.function_id, self.dimension, self.instance_seed)
    }
}

fn role_rng(function_id: u8, dimension: usize, seed: u64, role: &str) -> DetRng {
    derived_rng(&[u64::from(function_id), dimension as u64, seed], role)
}

/// Uniform draw in [-4, 4], rounded to 4 decimals.
fn draw_xopt_component(rng: &mut DetRng) -> f64 {
    let u: f64 = rng.random();
    ((u * 8.0 - 4.0) * 1e4).round() / 1e4
}

fn draw_sign(rng: &mut DetRng) -> f64 {
    let u: f64 = rng.random();
    if u >= 0.5 {
        1.0
    } else {
        -1.0
    }
}

/// Builds a fully specified instance. Deterministic in its arguments.
pub fn make_instance(function_id: u8, dimension: usize, instance_seed: u64) -> Result<ProblemInstance> {
    if !(1..=24).contains(&function_id) {
        return Err(Error::invalid(format!(
            "function_id must be in 1..=24, got {function_id}"
        )));
    }
    if dimension < 2 {
        return Err(Error::invalid(format!(
            "dimension must be >= 2, got {dimension}"
        )));
    }
    let d = dimension;
    let fid = function_id;

    let needs_r = matches!(fid, 6 | 7 | 9..=19 | 21..=24);
    let needs_q = matches!(fid, 6 | 7 | 13 | 15 | 16 | 17 | 18 | 23 | 24);

    let rotation_r = if needs_r {
        Rotation::random(d, &mut role_rng(fid, d, instance_seed, "rot_r"))
    } else {
        Rotation::identity(d)
    };
    let rotation_q = if needs_q {
        Rotation::random(d, &mut role_rng(fid, d, instance_seed, "rot_q"))
    } else {
        Rotation::identity(d)
    };

    let f_opt = {
        let mut rng = role_rng(fid, d, instance_seed, "f_opt");
        let u: f64 = rng.random();
        ((u * 2000.0 - 1000.0) * 100.0).round() / 100.0
    };

    let mut peaks = Vec::new();
    let x_opt = {
        let mut rng = role_rng(fid, d, instance_seed, "x_opt");
        match fid {
            5 => (0..d).map(|_| 5.0 * draw_sign(&mut rng)).collect(),
            4 => {
                let mut x: Vec<f64> = (0..d).map(|_| draw_xopt_component(&mut rng)).collect();
                // odd coordinates (1-based) of the optimum are non-negative
                for v in x.iter_mut().step_by(2) {
                    *v = v.abs();
                }
                x
            }
            8 => (0..d).map(|_| draw_xopt_component(&mut rng) * 0.75).collect(),
            9 | 19 => {
                let scale = (d as f64).sqrt() / 8.0;
                let c = scale.max(1.0);
                let half = vec![0.5 / c; d];
                rotation_r.apply_transpose(&half)
            }
            20 => (0..d)
                .map(|_| 4.2096874633 / 2.0 * draw_sign(&mut rng))
                .collect(),
            24 => (0..d).map(|_| 2.5 / 2.0 * draw_sign(&mut rng)).collect(),
            21 | 22 => {
                let (n_peaks, opt_range) = if fid == 21 { (101, 4.0) } else { (21, 3.92) };
                peaks = functions::make_gallagher_peaks(
                    n_peaks,
                    opt_range,
                    d,
                    &mut role_rng(fid, d, instance_seed, "gallagher"),
                );
                peaks[0].location.clone()
            }
            _ => (0..d).map(|_| draw_xopt_component(&mut rng)).collect(),
        }
    };

    Ok(ProblemInstance {
        function_id: fid,
        dimension: d,
        instance_seed,
        x_opt,
        f_opt,
        rotation_r,
        rotation_q,
        lower: LOWER_BOUND,
        upper: UPPER_BOUND,
        peaks,
    })
}

/// Evaluates the instance's objective at `x`.
///
/// `x` may lie outside [-5, 5]; the functions that penalize excursions do so
/// through their boundary-penalty term.
pub fn evaluate(instance: &ProblemInstance, x: &[f64]) -> Result<f64> {
    if x.len() != instance.dimension {
        return Err(Error::invalid(format!(
            "point has length {}, expected {}",
            x.len(),
            instance.dimension
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("point has a non-finite component".to_string()));
    }
    Ok(functions::raw_evaluate(instance, x))
}

/// Distance of an objective value from the instance optimum.
pub fn gap(instance: &ProblemInstance, f_value: f64) -> f64 {
    f_value - instance.f_opt
}

/// The fixed train/test partition of the 24 functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteSplit {
    pub train_ids: BTreeSet<u8>,
    pub test_ids: BTreeSet<u8>,
}

/// Six functions are held out for testing; the remaining 18 train the agent.
pub fn suite_split() -> SuiteSplit {
    let test_ids: BTreeSet<u8> = [1, 5, 6, 10, 15, 20].into_iter().collect();
    let train_ids: BTreeSet<u8> = (1..=24).filter(|id| !test_ids.contains(id)).collect();
    SuiteSplit { train_ids, test_ids }
}

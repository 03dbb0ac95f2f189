//! The 24 noiseless benchmark functions.
//!
//! Each function is written as `f_opt + core(z)` with `core(x_opt) = 0`, so
//! the instance optimum is exact by construction. Rotations, the oscillation
//! and asymmetry transforms, and the boundary penalty follow the standard
//! BBOB-2009 definitions.

use rand::Rng;
use std::f64::consts::PI;

use super::transforms::{f_pen, lambda_scale, t_asy, t_osz, t_osz_scalar};
use super::{GallagherPeak, ProblemInstance};
use crate::rng::DetRng;

pub(super) fn raw_evaluate(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let core = match inst.function_id {
        1 => sphere(inst, x),
        2 => ellipsoidal(inst, x, false),
        3 => rastrigin_separable(inst, x),
        4 => bueche_rastrigin(inst, x),
        5 => linear_slope(inst, x),
        6 => attractive_sector(inst, x),
        7 => step_ellipsoidal(inst, x),
        8 => rosenbrock(inst, x, false),
        9 => rosenbrock(inst, x, true),
        10 => ellipsoidal(inst, x, true),
        11 => discus(inst, x),
        12 => bent_cigar(inst, x),
        13 => sharp_ridge(inst, x),
        14 => different_powers(inst, x),
        15 => rastrigin_rotated(inst, x),
        16 => weierstrass(inst, x),
        17 => schaffers_f7(inst, x, 10.0),
        18 => schaffers_f7(inst, x, 1000.0),
        19 => griewank_rosenbrock(inst, x),
        20 => schwefel(inst, x),
        21 | 22 => gallagher(inst, x),
        23 => katsuura(inst, x),
        24 => lunacek_bi_rastrigin(inst, x),
        _ => unreachable!("function ids validated at construction"),
    };
    inst.f_opt + core
}

fn shifted(inst: &ProblemInstance, x: &[f64]) -> Vec<f64> {
    x.iter().zip(&inst.x_opt).map(|(a, b)| a - b).collect()
}

fn sq_norm(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum()
}

/// f1
fn sphere(inst: &ProblemInstance, x: &[f64]) -> f64 {
    sq_norm(&shifted(inst, x))
}

/// f2 (separable) and f10 (rotated)
fn ellipsoidal(inst: &ProblemInstance, x: &[f64], rotated: bool) -> f64 {
    let d = inst.dimension;
    let mut z = shifted(inst, x);
    if rotated {
        z = inst.rotation_r.apply(&z);
    }
    t_osz(&mut z);
    z.iter()
        .enumerate()
        .map(|(i, v)| 1e6_f64.powf(i as f64 / (d - 1) as f64) * v * v)
        .sum()
}

/// f3
fn rastrigin_separable(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let mut z = shifted(inst, x);
    t_osz(&mut z);
    t_asy(&mut z, 0.2);
    lambda_scale(&mut z, 10.0);
    rastrigin_core(&z)
}

fn rastrigin_core(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let cos_sum: f64 = z.iter().map(|v| (2.0 * PI * v).cos()).sum();
    10.0 * (d - cos_sum) + sq_norm(z)
}

/// f4
fn bueche_rastrigin(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let d = inst.dimension;
    let mut z = shifted(inst, x);
    t_osz(&mut z);
    for (i, v) in z.iter_mut().enumerate() {
        let mut s = 10.0_f64.powf(0.5 * i as f64 / (d - 1) as f64);
        // odd 1-based coordinates get a tenfold factor on the positive side
        if i % 2 == 0 && *v > 0.0 {
            s *= 10.0;
        }
        *v *= s;
    }
    rastrigin_core(&z) + 100.0 * f_pen(x)
}

/// f5
fn linear_slope(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let d = inst.dimension;
    let mut total = 0.0;
    for i in 0..d {
        let s = inst.x_opt[i].signum() * 10.0_f64.powf(i as f64 / (d - 1) as f64);
        let z = if x[i] * inst.x_opt[i] < 25.0 { x[i] } else { inst.x_opt[i] };
        total += 5.0 * s.abs() - s * z;
    }
    total
}

/// f6
fn attractive_sector(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let mut z = inst.rotation_r.apply(&shifted(inst, x));
    lambda_scale(&mut z, 10.0);
    z = inst.rotation_q.apply(&z);
    let mut sum = 0.0;
    for (zi, xo) in z.iter().zip(&inst.x_opt) {
        let s = if zi * xo > 0.0 { 100.0 } else { 1.0 };
        sum += (s * zi) * (s * zi);
    }
    t_osz_scalar(sum).powf(0.9)
}

/// f7
fn step_ellipsoidal(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let d = inst.dimension;
    let mut zhat = inst.rotation_r.apply(&shifted(inst, x));
    lambda_scale(&mut zhat, 10.0);
    let ztilde: Vec<f64> = zhat
        .iter()
        .map(|&v| {
            if v.abs() > 0.5 {
                (0.5 + v).floor()
            } else {
                (0.5 + 10.0 * v).floor() / 10.0
            }
        })
        .collect();
    let z = inst.rotation_q.apply(&ztilde);
    let quad: f64 = z
        .iter()
        .enumerate()
        .map(|(i, v)| 100.0_f64.powf(i as f64 / (d - 1) as f64) * v * v)
        .sum();
    0.1 * (zhat[0].abs() / 1e4).max(quad) + f_pen(x)
}

/// f8 (shifted) and f9 (rotated)
fn rosenbrock(inst: &ProblemInstance, x: &[f64], rotated: bool) -> f64 {
    let d = inst.dimension;
    let c = ((d as f64).sqrt() / 8.0).max(1.0);
    let z: Vec<f64> = if rotated {
        inst.rotation_r.apply(x).iter().map(|v| c * v + 0.5).collect()
    } else {
        shifted(inst, x).iter().map(|v| c * v + 1.0).collect()
    };
    let mut total = 0.0;
    for i in 0..d - 1 {
        let a = z[i] * z[i] - z[i + 1];
        let b = z[i] - 1.0;
        total += 100.0 * a * a + b * b;
    }
    total
}

/// f11
fn discus(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let mut z = inst.rotation_r.apply(&shifted(inst, x));
    t_osz(&mut z);
    1e6 * z[0] * z[0] + z[1..].iter().map(|v| v * v).sum::<f64>()
}

/// f12
fn bent_cigar(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let mut z = inst.rotation_r.apply(&shifted(inst, x));
    t_asy(&mut z, 0.5);
    let z = inst.rotation_r.apply(&z);
    z[0] * z[0] + 1e6 * z[1..].iter().map(|v| v * v).sum::<f64>()
}

/// f13
fn sharp_ridge(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let mut z = inst.rotation_r.apply(&shifted(inst, x));
    lambda_scale(&mut z, 10.0);
    let z = inst.rotation_q.apply(&z);
    z[0] * z[0] + 100.0 * z[1..].iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// f14
fn different_powers(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let d = inst.dimension;
    let z = inst.rotation_r.apply(&shifted(inst, x));
    z.iter()
        .enumerate()
        .map(|(i, v)| v.abs().powf(2.0 + 4.0 * i as f64 / (d - 1) as f64))
        .sum::<f64>()
        .sqrt()
}

/// f15
fn rastrigin_rotated(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let mut z = inst.rotation_r.apply(&shifted(inst, x));
    t_osz(&mut z);
    t_asy(&mut z, 0.2);
    z = inst.rotation_q.apply(&z);
    lambda_scale(&mut z, 10.0);
    z = inst.rotation_r.apply(&z);
    rastrigin_core(&z)
}

/// f16
fn weierstrass(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let d = inst.dimension;
    let mut z = inst.rotation_r.apply(&shifted(inst, x));
    t_osz(&mut z);
    z = inst.rotation_q.apply(&z);
    lambda_scale(&mut z, 0.01);
    z = inst.rotation_r.apply(&z);
    let f0: f64 = (0..12).map(|k| 0.5_f64.powi(k) * (PI * 3.0_f64.powi(k)).cos()).sum();
    let mean: f64 = z
        .iter()
        .map(|zi| {
            (0..12)
                .map(|k| 0.5_f64.powi(k) * (2.0 * PI * 3.0_f64.powi(k) * (zi + 0.5)).cos())
                .sum::<f64>()
        })
        .sum::<f64>()
        / d as f64;
    10.0 * (mean - f0).powi(3) + 10.0 / d as f64 * f_pen(x)
}

/// f17 (alpha = 10) and f18 (alpha = 1000)
fn schaffers_f7(inst: &ProblemInstance, x: &[f64], alpha: f64) -> f64 {
    let d = inst.dimension;
    let mut z = inst.rotation_r.apply(&shifted(inst, x));
    t_asy(&mut z, 0.5);
    z = inst.rotation_q.apply(&z);
    lambda_scale(&mut z, alpha);
    let mut acc = 0.0;
    for i in 0..d - 1 {
        let s = (z[i] * z[i] + z[i + 1] * z[i + 1]).sqrt();
        acc += s.sqrt() + s.sqrt() * (50.0 * s.powf(0.2)).sin().powi(2);
    }
    (acc / (d - 1) as f64).powi(2) + 10.0 * f_pen(x)
}

/// f19
fn griewank_rosenbrock(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let d = inst.dimension;
    let c = ((d as f64).sqrt() / 8.0).max(1.0);
    let z: Vec<f64> = inst.rotation_r.apply(x).iter().map(|v| c * v + 0.5).collect();
    let mut acc = 0.0;
    for i in 0..d - 1 {
        let a = z[i] * z[i] - z[i + 1];
        let b = z[i] - 1.0;
        let s = 100.0 * a * a + b * b;
        acc += s / 4000.0 - s.cos();
    }
    10.0 / (d - 1) as f64 * acc + 10.0
}

/// f20
fn schwefel(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let d = inst.dimension;
    let xhat: Vec<f64> = x
        .iter()
        .zip(&inst.x_opt)
        .map(|(xi, xo)| 2.0 * xo.signum() * xi)
        .collect();
    let mut zhat = vec![0.0; d];
    zhat[0] = xhat[0];
    for i in 1..d {
        zhat[i] = xhat[i] + 0.25 * (xhat[i - 1] - 2.0 * inst.x_opt[i - 1].abs());
    }
    let mut z: Vec<f64> = zhat
        .iter()
        .zip(&inst.x_opt)
        .map(|(zi, xo)| zi - 2.0 * xo.abs())
        .collect();
    lambda_scale(&mut z, 10.0);
    let z: Vec<f64> = z
        .iter()
        .zip(&inst.x_opt)
        .map(|(zi, xo)| 100.0 * (zi + 2.0 * xo.abs()))
        .collect();
    let sum: f64 = z.iter().map(|zi| zi * zi.abs().sqrt().sin()).sum();
    let scaled: Vec<f64> = z.iter().map(|zi| zi / 100.0).collect();
    -sum / (100.0 * d as f64) + 4.189828872724339 + 100.0 * f_pen(&scaled)
}

/// f21 / f22 peak setup; `opt_range` bounds the first peak (the optimum).
pub(super) fn make_gallagher_peaks(
    n_peaks: usize,
    opt_range: f64,
    dimension: usize,
    rng: &mut DetRng,
) -> Vec<GallagherPeak> {
    let d = dimension;
    let mut locations: Vec<Vec<f64>> = Vec::with_capacity(n_peaks);
    locations.push((0..d).map(|_| rng.random::<f64>() * 2.0 * opt_range - opt_range).collect());
    for _ in 1..n_peaks {
        locations.push((0..d).map(|_| rng.random::<f64>() * 9.8 - 4.9).collect());
    }

    // condition numbers: 1000^2 for the optimum, a random permutation of the
    // geometric grid for the rest
    let m = n_peaks - 1;
    let mut alphas: Vec<f64> = (0..m)
        .map(|j| 1000.0_f64.powf(2.0 * j as f64 / (m - 1) as f64))
        .collect();
    for i in (1..alphas.len()).rev() {
        let j = rng.random_range(0..=i);
        alphas.swap(i, j);
    }

    let mut peaks = Vec::with_capacity(n_peaks);
    for (i, location) in locations.into_iter().enumerate() {
        let alpha = if i == 0 { 1000.0 * 1000.0 } else { alphas[i - 1] };
        let weight = if i == 0 {
            10.0
        } else {
            1.1 + 8.0 * (i as f64 - 1.0) / (n_peaks as f64 - 2.0)
        };
        let mut diag: Vec<f64> = (0..d)
            .map(|j| alpha.powf(0.5 * j as f64 / (d - 1) as f64) / alpha.powf(0.25))
            .collect();
        for k in (1..diag.len()).rev() {
            let j = rng.random_range(0..=k);
            diag.swap(k, j);
        }
        peaks.push(GallagherPeak { location, weight, scaling: diag });
    }
    peaks
}

/// f21 / f22
fn gallagher(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let d = inst.dimension as f64;
    let mut best = f64::NEG_INFINITY;
    for peak in &inst.peaks {
        let diff: Vec<f64> = x.iter().zip(&peak.location).map(|(a, b)| a - b).collect();
        let w = inst.rotation_r.apply(&diff);
        let quad: f64 = w.iter().zip(&peak.scaling).map(|(v, c)| c * v * v).sum();
        let value = peak.weight * (-quad / (2.0 * d)).exp();
        if value > best {
            best = value;
        }
    }
    t_osz_scalar(10.0 - best).powi(2) + f_pen(x)
}

/// f23
fn katsuura(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let d = inst.dimension;
    let mut z = inst.rotation_r.apply(&shifted(inst, x));
    lambda_scale(&mut z, 100.0);
    let z = inst.rotation_q.apply(&z);
    let dd = d as f64;
    let mut product = 1.0;
    for (i, zi) in z.iter().enumerate() {
        let mut inner = 0.0;
        for j in 1..=32 {
            let p = 2.0_f64.powi(j) * zi;
            inner += (p - p.round()).abs() / 2.0_f64.powi(j);
        }
        product *= (1.0 + (i as f64 + 1.0) * inner).powf(10.0 / dd.powf(1.2));
    }
    10.0 / (dd * dd) * product - 10.0 / (dd * dd) + f_pen(x)
}

/// f24
fn lunacek_bi_rastrigin(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let d = inst.dimension;
    let dd = d as f64;
    let mu0 = 2.5;
    let s = 1.0 - 1.0 / (2.0 * (dd + 20.0).sqrt() - 8.2);
    let mu1 = -((mu0 * mu0 - 1.0) / s).sqrt();
    let xhat: Vec<f64> = x
        .iter()
        .zip(&inst.x_opt)
        .map(|(xi, xo)| 2.0 * xo.signum() * xi)
        .collect();
    let sum0: f64 = xhat.iter().map(|v| (v - mu0) * (v - mu0)).sum();
    let sum1: f64 = xhat.iter().map(|v| (v - mu1) * (v - mu1)).sum();
    let centered: Vec<f64> = xhat.iter().map(|v| v - mu0).collect();
    let mut z = inst.rotation_r.apply(&centered);
    lambda_scale(&mut z, 100.0);
    let z = inst.rotation_q.apply(&z);
    let cos_sum: f64 = z.iter().map(|v| (2.0 * PI * v).cos()).sum();
    sum0.min(dd + s * sum1) + 10.0 * (dd - cos_sum) + 1e4 * f_pen(x)
}

#[cfg(test)]
mod tests {
    use crate::bbob::{evaluate, make_instance};

    // The full (function, dimension, seed) sweep lives in the acceptance
    // suite; here a smoke pass over every id at one shape.
    #[test]
    fn every_function_hits_its_optimum() {
        for fid in 1..=24u8 {
            let inst = make_instance(fid, 5, 7).unwrap();
            let f = evaluate(&inst, &inst.x_opt).unwrap();
            assert!(
                (f - inst.f_opt).abs() <= 1e-9,
                "f{fid}: |f(x_opt) - f_opt| = {}",
                (f - inst.f_opt).abs()
            );
        }
    }

    #[test]
    fn evaluation_is_pure() {
        for fid in [3u8, 7, 16, 21, 24] {
            let inst = make_instance(fid, 5, 1).unwrap();
            let x = vec![1.1, -2.2, 0.3, 4.0, -0.9];
            let a = evaluate(&inst, &x).unwrap();
            let b = evaluate(&inst, &x).unwrap();
            assert_eq!(a.to_bits(), b.to_bits(), "f{fid}");
        }
    }

    #[test]
    fn values_are_finite_at_wild_points() {
        let points = [vec![7.0; 5], vec![-8.0; 5], vec![0.0; 5], vec![4.9999; 5]];
        for fid in 1..=24u8 {
            let inst = make_instance(fid, 5, 2).unwrap();
            for p in &points {
                assert!(evaluate(&inst, p).unwrap().is_finite(), "f{fid} at {p:?}");
            }
        }
    }

    #[test]
    fn x_opt_stays_in_declared_range() {
        // within [-4, 4] except the boundary optimum of f5
        for fid in 1..=24u8 {
            let inst = make_instance(fid, 10, 13).unwrap();
            let limit = if fid == 5 { 5.0 } else { 4.0 };
            for v in &inst.x_opt {
                assert!(v.abs() <= limit + 1e-12, "f{fid} x_opt component {v}");
            }
        }
    }

    #[test]
    fn local_optimality_at_desk_scale() {
        use crate::rng::seed_rng;
        use rand::Rng;
        let mut rng = seed_rng(42);
        for fid in (1..=24u8).filter(|&f| f != 5) {
            let inst = make_instance(fid, 5, 3).unwrap();
            for _ in 0..100 {
                let delta: Vec<f64> = (0..5).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
                let norm = delta.iter().map(|v| v * v).sum::<f64>().sqrt();
                let scale = rng.random::<f64>() * 1e-3 / norm;
                let x: Vec<f64> =
                    inst.x_opt.iter().zip(&delta).map(|(a, b)| a + b * scale).collect();
                let f = evaluate(&inst, &x).unwrap();
                assert!(f >= inst.f_opt - 1e-9, "f{fid} dipped below optimum: {}", f - inst.f_opt);
            }
        }
    }
}

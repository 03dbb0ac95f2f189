//! Meta-model features: adjusted R-squared and coefficient statistics of
//! four least-squares fits (linear, linear with interactions, quadratic,
//! quadratic with interactions).

use nalgebra::{DMatrix, DVector};

use super::stats::safe_ratio;

/// Column layout of a design matrix: intercept, the D linear terms, then the
/// requested extras. Interactions are ordered lexicographically (i < j).
#[derive(Clone, Copy)]
struct ModelShape {
    squares: bool,
    interactions: bool,
}

pub struct FitResult {
    /// Non-intercept coefficients in design order.
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub adjusted_r2: f64,
    /// Set when the design matrix was rank-deficient and the minimum-norm
    /// solution was used.
    pub rank_deficient: bool,
}

fn design_row(point: &[f64], shape: ModelShape) -> Vec<f64> {
    let d = point.len();
    let mut row = Vec::with_capacity(1 + 2 * d + d * (d - 1) / 2);
    row.push(1.0);
    row.extend_from_slice(point);
    if shape.squares {
        row.extend(point.iter().map(|v| v * v));
    }
    if shape.interactions {
        for i in 0..d {
            for j in i + 1..d {
                row.push(point[i] * point[j]);
            }
        }
    }
    row
}

fn fit(x: &[Vec<f64>], y: &[f64], shape: ModelShape) -> FitResult {
    let n = x.len();
    let rows: Vec<Vec<f64>> = x.iter().map(|p| design_row(p, shape)).collect();
    let p = rows[0].len();
    let design = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
    let target = DVector::from_column_slice(y);

    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let eps = smax * 1e-12;
    let rank = svd.singular_values.iter().filter(|s| **s > eps).count();
    let beta = svd.solve(&target, eps).expect("svd solve with computed u/v");

    let residuals = &design * &beta - &target;
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    let predictors = p - 1;
    let adjusted_r2 = if n > predictors + 1 {
        1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n as f64 - predictors as f64 - 1.0)
    } else {
        r2
    };

    FitResult {
        coefficients: beta.iter().skip(1).copied().collect(),
        intercept: beta[0],
        adjusted_r2,
        rank_deficient: rank < p,
    }
}

/// The nine meta-model features.
pub fn metamodel_features(x: &[Vec<f64>], y: &[f64]) -> [f64; 9] {
    let d = x[0].len();
    let linear = fit(x, y, ModelShape { squares: false, interactions: false });
    let linear_inter = fit(x, y, ModelShape { squares: false, interactions: true });
    let quadratic = fit(x, y, ModelShape { squares: true, interactions: false });
    let quadratic_inter = fit(x, y, ModelShape { squares: true, interactions: true });

    let abs_lin: Vec<f64> = linear.coefficients.iter().map(|c| c.abs()).collect();
    let lin_min = abs_lin.iter().cloned().fold(f64::INFINITY, f64::min);
    let lin_max = abs_lin.iter().cloned().fold(0.0_f64, f64::max);

    // the D pure-square coefficients sit after the D linear terms
    let abs_quad: Vec<f64> = quadratic.coefficients[d..2 * d].iter().map(|c| c.abs()).collect();
    let quad_min = abs_quad.iter().cloned().fold(f64::INFINITY, f64::min);
    let quad_max = abs_quad.iter().cloned().fold(0.0_f64, f64::max);

    [
        linear.adjusted_r2,
        linear.intercept,
        lin_min,
        lin_max,
        safe_ratio(lin_max, lin_min),
        linear_inter.adjusted_r2,
        quadratic.adjusted_r2,
        safe_ratio(quad_max, quad_min),
        quadratic_inter.adjusted_r2,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seed_rng;
    use rand::Rng;

    fn random_points(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = seed_rng(seed);
        (0..n).map(|_| (0..d).map(|_| rng.random::<f64>() * 10.0 - 5.0).collect()).collect()
    }

    #[test]
    fn exact_linear_data_recovers_the_model() {
        let x = random_points(80, 3, 1);
        let y: Vec<f64> = x.iter().map(|p| 4.0 - 2.0 * p[0] + 0.5 * p[1] + 3.0 * p[2]).collect();
        let feats = metamodel_features(&x, &y);
        assert!((feats[0] - 1.0).abs() < 1e-8, "linear adj r2 {}", feats[0]);
        assert!((feats[1] - 4.0).abs() < 1e-8, "intercept {}", feats[1]);
        assert!((feats[2] - 0.5).abs() < 1e-8);
        assert!((feats[3] - 3.0).abs() < 1e-8);
        assert!((feats[4] - 6.0).abs() < 1e-8);
    }

    #[test]
    fn unshifted_sphere_is_recovered_by_the_quadratic_model() {
        let x = random_points(120, 3, 2);
        let y: Vec<f64> = x.iter().map(|p| p.iter().map(|v| v * v).sum()).collect();
        let feats = metamodel_features(&x, &y);
        assert!((feats[6] - 1.0).abs() < 1e-8, "quad adj r2 {}", feats[6]);
        assert!((feats[7] - 1.0).abs() < 1e-8, "quad coefficient ratio {}", feats[7]);
    }

    #[test]
    fn pure_noise_has_low_linear_fit() {
        // Monte-Carlo oracle: independent y leaves nothing to explain
        let mut rng = seed_rng(3);
        let mut worst: f64 = f64::NEG_INFINITY;
        for rep in 0..20 {
            let x = random_points(300, 3, 100 + rep);
            let y: Vec<f64> = (0..300).map(|_| rng.random::<f64>()).collect();
            let feats = metamodel_features(&x, &y);
            worst = worst.max(feats[0]);
        }
        assert!(worst <= 0.1, "noise adj r2 reached {worst}");
    }

    #[test]
    fn rank_deficient_designs_fall_back_to_minimum_norm() {
        // duplicate coordinate makes the design singular
        let base = random_points(40, 2, 4);
        let x: Vec<Vec<f64>> = base.iter().map(|p| vec![p[0], p[1], p[1]]).collect();
        let y: Vec<f64> = base.iter().map(|p| p[0] + p[1]).collect();
        let linear = fit(&x, &y, ModelShape { squares: false, interactions: false });
        assert!(linear.rank_deficient);
        assert!(linear.coefficients.iter().all(|c| c.is_finite()));
        assert!((linear.adjusted_r2 - 1.0).abs() < 1e-8);
    }
}

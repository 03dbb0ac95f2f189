//! Exploratory landscape analysis: the fixed-order 62-value fingerprint that
//! serves as the agent's state.
//!
//! Layout (also the `features` CSV header order):
//!   [0]      problem dimension
//!   [1..4)   objective distribution: skewness, kurtosis, n_peaks
//!   [4..13)  levelset: (mmce_lda, mmce_qda, ratio) for q in {0.1, 0.25, 0.5}
//!   [13..22) meta-model: linear adj-R2 / intercept / min |coef| / max |coef|
//!            / max-min ratio, linear+interactions adj-R2, quadratic adj-R2,
//!            quadratic coefficient ratio, quadratic+interactions adj-R2
//!   [22..27) nearest-better clustering
//!   [27..32) information content
//!   [32..48) dispersion: (ratio_mean, ratio_median, diff_mean, diff_median)
//!            for q in {0.02, 0.05, 0.10, 0.25}
//!   [48..54) principal components
//!   [54..62) per-cell linear models
//!
//! The layout is a frozen contract: the agent's input width and the
//! checkpoint normalization statistics both depend on it.

pub mod dispersion;
pub mod ic;
pub mod levelset;
pub mod limo;
pub mod metamodel;
pub mod nbc;
pub mod pca;
pub mod stats;
pub mod ydist;

use serde::{Deserialize, Serialize};

use crate::bbob::{evaluate, ProblemInstance};
use crate::rng::DetRng;
use crate::sampling::{initialize, InitStrategy};

/// Width of the fingerprint.
pub const FEATURE_COUNT: usize = 62;

/// Design points per dimension for the one-time landscape sample.
pub const SAMPLE_POINTS_PER_DIM: usize = 50;

/// The evaluated design sample the features are computed from.
#[derive(Clone, Debug)]
pub struct ElaSample {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

/// The 62-entry fingerprint plus the indices whose raw value was non-finite
/// and imputed to 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub imputed: Vec<usize>,
}

/// Draws the 50 * D point Latin-hypercube design and evaluates it once.
pub fn sample_for_ela(instance: &ProblemInstance, rng: &mut DetRng) -> ElaSample {
    let n = SAMPLE_POINTS_PER_DIM * instance.dimension;
    let x = initialize(
        InitStrategy::LatinHypercube,
        n,
        instance.dimension,
        instance.lower,
        instance.upper,
        rng,
    )
    .expect("sample shape is always valid");
    let y = x
        .iter()
        .map(|row| evaluate(instance, row).expect("sample points match the instance"))
        .collect();
    ElaSample { x, y }
}

/// Computes the full fingerprint from a sample.
pub fn features_from_sample(sample: &ElaSample, dimension: usize, lower: f64, upper: f64) -> FeatureVector {
    let mut values = Vec::with_capacity(FEATURE_COUNT);
    values.push(dimension as f64);
    let (skew, kurt, peaks) = ydist::ydist_features(&sample.y);
    values.extend([skew, kurt, peaks]);
    values.extend(levelset::levelset_features(&sample.x, &sample.y));
    values.extend(metamodel::metamodel_features(&sample.x, &sample.y));
    values.extend(nbc::nbc_features(&sample.x, &sample.y));
    values.extend(ic::ic_features(&sample.x, &sample.y));
    values.extend(dispersion::dispersion_features(&sample.x, &sample.y));
    values.extend(pca::pca_features(&sample.x, &sample.y));
    values.extend(limo::limo_features(&sample.x, &sample.y, lower, upper));
    debug_assert_eq!(values.len(), FEATURE_COUNT);

    let mut imputed = Vec::new();
    for (i, v) in values.iter_mut().enumerate() {
        if !v.is_finite() {
            *v = 0.0;
            imputed.push(i);
        }
    }
    FeatureVector { values, imputed }
}

/// Samples the instance and computes its fingerprint. Consumes exactly
/// 50 * D objective evaluations.
pub fn assemble_state(instance: &ProblemInstance, rng: &mut DetRng) -> FeatureVector {
    let sample = sample_for_ela(instance, rng);
    features_from_sample(&sample, instance.dimension, instance.lower, instance.upper)
}

/// Per-feature z-score statistics accumulated over a training set, stored in
/// the agent checkpoint. Normalized values are clipped to [-5, 5].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl NormStats {
    pub fn from_features(vectors: &[FeatureVector]) -> NormStats {
        let n = vectors.len().max(1) as f64;
        let mut mean = vec![0.0; FEATURE_COUNT];
        for v in vectors {
            for (m, x) in mean.iter_mut().zip(&v.values) {
                *m += x / n;
            }
        }
        let mut std = vec![0.0; FEATURE_COUNT];
        for v in vectors {
            for (s, (x, m)) in std.iter_mut().zip(v.values.iter().zip(&mean)) {
                *s += (x - m) * (x - m) / n;
            }
        }
        for s in std.iter_mut() {
            *s = s.sqrt();
        }
        NormStats { mean, std }
    }

    pub fn normalize(&self, features: &FeatureVector) -> Vec<f64> {
        features
            .values
            .iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(x, (m, s))| {
                let denom = if *s > 1e-12 { *s } else { 1.0 };
                ((x - m) / denom).clamp(-5.0, 5.0)
            })
            .collect()
    }
}

/// Column names for the `features` CSV output, index-aligned with the layout.
pub fn feature_names() -> Vec<String> {
    let mut names = vec!["dimension".to_string()];
    names.extend(["ydist.skewness", "ydist.kurtosis", "ydist.n_peaks"].map(String::from));
    for q in ["10", "25", "50"] {
        names.push(format!("levelset.mmce_lda_q{q}"));
        names.push(format!("levelset.mmce_qda_q{q}"));
        names.push(format!("levelset.ratio_q{q}"));
    }
    names.extend(
        [
            "metamodel.lin_adj_r2",
            "metamodel.lin_intercept",
            "metamodel.lin_coef_min",
            "metamodel.lin_coef_max",
            "metamodel.lin_coef_ratio",
            "metamodel.lin_inter_adj_r2",
            "metamodel.quad_adj_r2",
            "metamodel.quad_coef_ratio",
            "metamodel.quad_inter_adj_r2",
        ]
        .map(String::from),
    );
    names.extend(
        [
            "nbc.sd_ratio",
            "nbc.mean_ratio",
            "nbc.dist_correlation",
            "nbc.ratio_cv",
            "nbc.fitness_indegree_correlation",
        ]
        .map(String::from),
    );
    names.extend(
        ["ic.h_max", "ic.settling_sensitivity", "ic.eps_max", "ic.partial_ratio", "ic.m0"]
            .map(String::from),
    );
    for q in ["02", "05", "10", "25"] {
        names.push(format!("dispersion.ratio_mean_q{q}"));
        names.push(format!("dispersion.ratio_median_q{q}"));
        names.push(format!("dispersion.diff_mean_q{q}"));
        names.push(format!("dispersion.diff_median_q{q}"));
    }
    names.extend(
        [
            "pca.expl_var90_cov_x",
            "pca.expl_var90_corr_x",
            "pca.expl_var90_cov_xy",
            "pca.expl_var90_corr_xy",
            "pca.first_pc_cov_x",
            "pca.first_pc_cov_xy",
        ]
        .map(String::from),
    );
    names.extend(
        [
            "limo.avg_coef_length",
            "limo.length_mean",
            "limo.length_sd",
            "limo.pairwise_correlation",
            "limo.ratio_mean",
            "limo.ratio_sd",
            "limo.sd_ratio",
            "limo.sd_mean",
        ]
        .map(String::from),
    );
    debug_assert_eq!(names.len(), FEATURE_COUNT);
    names
}

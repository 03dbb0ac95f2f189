//! Dispersion features: pairwise-distance spread of the best-quantile points
//! against the whole sample, detecting funnel structure.

use super::stats::{euclidean, mean, median, safe_ratio};

pub const DISPERSION_QUANTILES: [f64; 4] = [0.02, 0.05, 0.10, 0.25];

/// Sixteen values, four per quantile in {2%, 5%, 10%, 25%}:
/// `[ratio_mean, ratio_median, diff_mean, diff_median]`.
pub fn dispersion_features(x: &[Vec<f64>], y: &[f64]) -> [f64; 16] {
    let n = x.len();
    let all = pairwise_distances(&(0..n).collect::<Vec<_>>(), x);
    let mean_all = mean(&all);
    let median_all = median(&all);

    // indices sorted by objective, ties toward the lower index
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| {
        y[*a].partial_cmp(&y[*b]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(b))
    });

    let mut out = [0.0; 16];
    for (qi, q) in DISPERSION_QUANTILES.iter().enumerate() {
        let count = best_subset_size(*q, n);
        let subset = &order[..count];
        let dists = pairwise_distances(subset, x);
        let mean_best = mean(&dists);
        let median_best = median(&dists);
        out[4 * qi] = safe_ratio(mean_best, mean_all);
        out[4 * qi + 1] = safe_ratio(median_best, median_all);
        out[4 * qi + 2] = mean_best - mean_all;
        out[4 * qi + 3] = median_best - median_all;
    }
    out
}

/// ceil(q * n) with a guard against upward float drift, floored at 2 points.
pub fn best_subset_size(q: f64, n: usize) -> usize {
    (((q * n as f64) - 1e-9).ceil() as usize).clamp(2, n)
}

fn pairwise_distances(indices: &[usize], x: &[Vec<f64>]) -> Vec<f64> {
    let k = indices.len();
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in a + 1..k {
            out.push(euclidean(&x[indices[a]], &x[indices[b]]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seed_rng;
    use rand::Rng;

    #[test]
    fn subset_sizes_round_up_without_drift() {
        assert_eq!(best_subset_size(0.02, 100), 2);
        assert_eq!(best_subset_size(0.05, 100), 5);
        assert_eq!(best_subset_size(0.25, 100), 25);
        assert_eq!(best_subset_size(0.02, 40), 2); // floor of 2
        assert_eq!(best_subset_size(0.10, 55), 6);
    }

    #[test]
    fn full_subset_degenerates_to_unit_ratio_zero_diff() {
        let mut rng = seed_rng(1);
        let x: Vec<Vec<f64>> =
            (0..30).map(|_| (0..2).map(|_| rng.random::<f64>()).collect()).collect();
        let n = x.len();
        let all = pairwise_distances(&(0..n).collect::<Vec<_>>(), &x);
        // forcing q = 1 makes best == all
        let count = best_subset_size(1.0, n);
        assert_eq!(count, n);
        let best = pairwise_distances(&(0..count).collect::<Vec<_>>(), &x);
        assert_eq!(safe_ratio(mean(&best), mean(&all)), 1.0);
        assert_eq!(mean(&best) - mean(&all), 0.0);
        assert_eq!(median(&best) - median(&all), 0.0);
    }

    #[test]
    fn sphere_best_points_cluster() {
        // Monte-Carlo oracle: near-optimal points of ||x||^2 concentrate
        // around the origin, so their spread is below the global spread.
        let mut rng = seed_rng(2);
        let mut below = 0;
        let reps = 20;
        for _ in 0..reps {
            let x: Vec<Vec<f64>> = (0..200)
                .map(|_| (0..3).map(|_| rng.random::<f64>() * 10.0 - 5.0).collect())
                .collect();
            let y: Vec<f64> = x.iter().map(|p| p.iter().map(|v| v * v).sum()).collect();
            let feats = dispersion_features(&x, &y);
            if feats[4] < 1.0 {
                below += 1; // ratio_mean at q = 0.05
            }
        }
        assert!(below >= reps - 1, "only {below}/{reps} repetitions clustered");
    }
}

//! Nearest-better-clustering features: statistics comparing each point's
//! nearest neighbor with its nearest strictly-better neighbor.

use super::stats::{euclidean, mean, pearson, safe_ratio, sample_sd};

/// The five NBC features:
/// `[sd(nn)/sd(nb), mean(nn)/mean(nb), corr(nn, nb), cv(nb/nn), corr(fitness, indegree)]`.
///
/// The global best point (and any point without a strictly better one) takes
/// its nearest-neighbor distance as its nearest-better distance, and emits no
/// edge into the better-neighbor graph.
pub fn nbc_features(x: &[Vec<f64>], y: &[f64]) -> [f64; 5] {
    let n = x.len();
    let mut nn_dist = vec![f64::INFINITY; n];
    let mut nb_dist = vec![f64::INFINITY; n];
    let mut nb_target: Vec<Option<usize>> = vec![None; n];

    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = euclidean(&x[i], &x[j]);
            if d < nn_dist[i] {
                nn_dist[i] = d;
            }
            if y[j] < y[i] && d < nb_dist[i] {
                nb_dist[i] = d;
                nb_target[i] = Some(j);
            }
        }
        if nb_target[i].is_none() {
            nb_dist[i] = nn_dist[i];
        }
    }

    let mut indegree = vec![0.0; n];
    for target in nb_target.iter().flatten() {
        indegree[*target] += 1.0;
    }

    let ratios: Vec<f64> = nn_dist.iter().zip(&nb_dist).map(|(nn, nb)| safe_ratio(*nb, *nn)).collect();
    let ratio_mean = mean(&ratios);
    let cv = if ratio_mean == 0.0 { 0.0 } else { sample_sd(&ratios) / ratio_mean };

    [
        safe_ratio(sample_sd(&nn_dist), sample_sd(&nb_dist)),
        safe_ratio(mean(&nn_dist), mean(&nb_dist)),
        pearson(&nn_dist, &nb_dist),
        cv,
        pearson(y, &indegree),
    ]
}

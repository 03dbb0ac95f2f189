//! Information content of the fitness sequence along a deterministic tour of
//! the sample.
//!
//! Points are ordered by a greedy nearest-neighbor tour starting at the first
//! sample point. Consecutive slopes `dy / ||dx||` are mapped to symbols in
//! {-1, 0, 1} under a tolerance eps; the entropy of adjacent unequal symbol
//! pairs (base 6) is swept over a logarithmic eps grid.

use super::stats::euclidean;

const EPS_GRID_LEN: usize = 100;
const SETTLING_THRESHOLD: f64 = 0.05;
/// Returned when no grid eps settles the sequence: one decade above the grid.
const SETTLING_SENTINEL: f64 = 6.0;

/// `[h_max, settling sensitivity, eps_max, partial-information ratio, m0]`.
pub fn ic_features(x: &[Vec<f64>], y: &[f64]) -> [f64; 5] {
    let slopes = tour_slopes(x, y);
    let m0 = partial_information(&slopes, 0.0) as f64;

    let grid: Vec<f64> = (0..EPS_GRID_LEN)
        .map(|i| 10.0_f64.powf(-5.0 + 10.0 * i as f64 / (EPS_GRID_LEN - 1) as f64))
        .collect();

    let mut h_max = 0.0;
    let mut eps_max = grid[0];
    let mut settling = SETTLING_SENTINEL;
    let mut settled = false;
    for &eps in &grid {
        let h = information_content(&slopes, eps);
        if h > h_max {
            h_max = h;
            eps_max = eps;
        }
        if !settled && h < SETTLING_THRESHOLD {
            settling = eps.log10();
            settled = true;
        }
    }
    let m_at_max = partial_information(&slopes, eps_max) as f64;
    let ratio = if m0 == 0.0 {
        if m_at_max == 0.0 {
            1.0
        } else {
            10.0
        }
    } else {
        m_at_max / m0
    };

    [h_max, settling, eps_max, ratio, m0]
}

/// Slopes along the greedy tour; coincident consecutive points are skipped.
pub fn tour_slopes(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let order = greedy_tour(x);
    let mut slopes = Vec::with_capacity(order.len().saturating_sub(1));
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        let dist = euclidean(&x[a], &x[b]);
        if dist == 0.0 {
            continue;
        }
        slopes.push((y[b] - y[a]) / dist);
    }
    slopes
}

/// Greedy nearest-neighbor ordering starting at index 0; distance ties break
/// toward the lower index.
pub fn greedy_tour(x: &[Vec<f64>]) -> Vec<usize> {
    let n = x.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut current = 0usize;
    visited[0] = true;
    order.push(0);
    for _ in 1..n {
        let mut best = usize::MAX;
        let mut best_dist = f64::INFINITY;
        for j in 0..n {
            if visited[j] {
                continue;
            }
            let d = euclidean(&x[current], &x[j]);
            if d < best_dist {
                best_dist = d;
                best = j;
            }
        }
        visited[best] = true;
        order.push(best);
        current = best;
    }
    order
}

fn symbols(slopes: &[f64], eps: f64) -> Vec<i8> {
    slopes
        .iter()
        .map(|s| {
            if *s > eps {
                1
            } else if *s < -eps {
                -1
            } else {
                0
            }
        })
        .collect()
}

/// Entropy (base 6) of adjacent unequal symbol pairs.
pub fn information_content(slopes: &[f64], eps: f64) -> f64 {
    let sym = symbols(slopes, eps);
    if sym.len() < 2 {
        return 0.0;
    }
    let mut counts = [[0usize; 3]; 3];
    for w in sym.windows(2) {
        counts[(w[0] + 1) as usize][(w[1] + 1) as usize] += 1;
    }
    let total = (sym.len() - 1) as f64;
    let mut h = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            if a == b || counts[a][b] == 0 {
                continue;
            }
            let p = counts[a][b] as f64 / total;
            h -= p * p.log(6.0);
        }
    }
    h
}

/// Number of sign blocks after dropping neutral symbols and collapsing
/// repeats: the partial information of the sequence at tolerance eps.
pub fn partial_information(slopes: &[f64], eps: f64) -> usize {
    let mut blocks = 0usize;
    let mut last: i8 = 0;
    for s in symbols(slopes, eps) {
        if s != 0 && s != last {
            blocks += 1;
            last = s;
        }
    }
    blocks
}

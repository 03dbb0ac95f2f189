//! Principal-component features of the design: how many components explain
//! 90% of the variance, and the first component's share, under covariance
//! and correlation scaling, with and without the objective column.

use nalgebra::DMatrix;

/// `[expl90_cov_x, expl90_corr_x, expl90_cov_xy, expl90_corr_xy,
///   first_pc_cov_x, first_pc_cov_xy]`.
///
/// "expl90" is the smallest k whose top-k eigenvalues reach 90% of the
/// trace, divided by the matrix size.
pub fn pca_features(x: &[Vec<f64>], y: &[f64]) -> [f64; 6] {
    let plain = column_matrix(x, None);
    let augmented = column_matrix(x, Some(y));

    let ev_cov_x = eigenvalues(&covariance(&plain));
    let ev_corr_x = eigenvalues(&correlation(&plain));
    let ev_cov_xy = eigenvalues(&covariance(&augmented));
    let ev_corr_xy = eigenvalues(&correlation(&augmented));

    [
        explained_90(&ev_cov_x),
        explained_90(&ev_corr_x),
        explained_90(&ev_cov_xy),
        explained_90(&ev_corr_xy),
        first_share(&ev_cov_x),
        first_share(&ev_cov_xy),
    ]
}

fn column_matrix(x: &[Vec<f64>], y: Option<&[f64]>) -> Vec<Vec<f64>> {
    let d = x[0].len();
    let mut cols: Vec<Vec<f64>> = (0..d).map(|j| x.iter().map(|row| row[j]).collect()).collect();
    if let Some(y) = y {
        cols.push(y.to_vec());
    }
    cols
}

/// Sample covariance (n-1 denominator) of the columns.
fn covariance(cols: &[Vec<f64>]) -> DMatrix<f64> {
    let m = cols.len();
    let n = cols[0].len();
    let means: Vec<f64> = cols.iter().map(|c| c.iter().sum::<f64>() / n as f64).collect();
    DMatrix::from_fn(m, m, |i, j| {
        let mut acc = 0.0;
        for k in 0..n {
            acc += (cols[i][k] - means[i]) * (cols[j][k] - means[j]);
        }
        acc / (n - 1) as f64
    })
}

/// Correlation matrix; rows and columns of zero-variance columns are 0.
fn correlation(cols: &[Vec<f64>]) -> DMatrix<f64> {
    let cov = covariance(cols);
    let m = cov.nrows();
    let sd: Vec<f64> = (0..m).map(|i| cov[(i, i)].sqrt()).collect();
    DMatrix::from_fn(m, m, |i, j| {
        if sd[i] == 0.0 || sd[j] == 0.0 {
            0.0
        } else {
            cov[(i, j)] / (sd[i] * sd[j])
        }
    })
}

/// Eigenvalues sorted descending, tiny negatives clamped to zero.
fn eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> =
        m.clone().symmetric_eigen().eigenvalues.iter().map(|v| v.max(0.0)).collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

fn explained_90(eigenvalues: &[f64]) -> f64 {
    let total: f64 = eigenvalues.iter().sum();
    let mut acc = 0.0;
    for (k, ev) in eigenvalues.iter().enumerate() {
        acc += ev;
        if acc >= 0.9 * total {
            return (k + 1) as f64 / eigenvalues.len() as f64;
        }
    }
    1.0
}

fn first_share(eigenvalues: &[f64]) -> f64 {
    let total: f64 = eigenvalues.iter().sum();
    if total == 0.0 {
        0.0
    } else {
        eigenvalues[0] / total
    }
}

//! Levelset features: how well linear and quadratic discriminants separate
//! the sample into below/above an objective quantile.
//!
//! For each quantile q in {0.1, 0.25, 0.5} the sample is labelled by
//! `y <= quantile_q(y)`, both classifiers are scored by stratified 5-fold
//! cross-validation, and the three outputs per q are
//! `(MMCE_LDA, MMCE_QDA, MMCE_LDA / MMCE_QDA)` with 0/0 -> 1 and
//! positive/0 -> 10.

use nalgebra::{Cholesky, DMatrix, DVector};

use super::stats::{quantile, safe_ratio};

pub const LEVELSET_QUANTILES: [f64; 3] = [0.1, 0.25, 0.5];
const FOLDS: usize = 5;

pub fn levelset_features(x: &[Vec<f64>], y: &[f64]) -> [f64; 9] {
    let mut out = [0.0; 9];
    for (qi, q) in LEVELSET_QUANTILES.iter().enumerate() {
        let labels = labels_for_quantile(y, *q);
        let (lda, qda) = cross_validated_mmce(x, &labels);
        out[3 * qi] = lda;
        out[3 * qi + 1] = qda;
        out[3 * qi + 2] = safe_ratio(lda, qda);
    }
    out
}

/// true = at or below the quantile.
pub fn labels_for_quantile(y: &[f64], q: f64) -> Vec<bool> {
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let threshold = quantile(&sorted, q);
    y.iter().map(|v| *v <= threshold).collect()
}

/// Stratified fold of each point: within each class, members are assigned
/// round-robin in index order.
fn fold_assignment(labels: &[bool]) -> Vec<usize> {
    let mut fold = vec![0usize; labels.len()];
    let mut counters = [0usize; 2];
    for (i, &l) in labels.iter().enumerate() {
        let c = usize::from(l);
        fold[i] = counters[c] % FOLDS;
        counters[c] += 1;
    }
    fold
}

/// Mean misclassification error of LDA and QDA over the folds. A fold whose
/// training half contains a single class contributes 0 for both classifiers.
fn cross_validated_mmce(x: &[Vec<f64>], labels: &[bool]) -> (f64, f64) {
    let folds = fold_assignment(labels);
    let mut lda_rates = Vec::new();
    let mut qda_rates = Vec::new();
    for f in 0..FOLDS {
        let test: Vec<usize> = (0..x.len()).filter(|i| folds[*i] == f).collect();
        let train: Vec<usize> = (0..x.len()).filter(|i| folds[*i] != f).collect();
        if test.is_empty() {
            continue;
        }
        let n_pos = train.iter().filter(|i| labels[**i]).count();
        if n_pos == 0 || n_pos == train.len() {
            lda_rates.push(0.0);
            qda_rates.push(0.0);
            continue;
        }
        let lda = LdaModel::fit(x, labels, &train);
        let qda = QdaModel::fit(x, labels, &train);
        let mut lda_err = 0usize;
        let mut qda_err = 0usize;
        for &i in &test {
            if lda.predict(&x[i]) != labels[i] {
                lda_err += 1;
            }
            if qda.predict(&x[i]) != labels[i] {
                qda_err += 1;
            }
        }
        lda_rates.push(lda_err as f64 / test.len() as f64);
        qda_rates.push(qda_err as f64 / test.len() as f64);
    }
    let avg = |rates: &[f64]| {
        if rates.is_empty() {
            0.0
        } else {
            rates.iter().sum::<f64>() / rates.len() as f64
        }
    };
    (avg(&lda_rates), avg(&qda_rates))
}

fn class_mean(x: &[Vec<f64>], members: &[usize]) -> DVector<f64> {
    let d = x[0].len();
    let mut m = DVector::zeros(d);
    for &i in members {
        for j in 0..d {
            m[j] += x[i][j];
        }
    }
    m / members.len() as f64
}

fn scatter(x: &[Vec<f64>], members: &[usize], mean: &DVector<f64>) -> DMatrix<f64> {
    let d = x[0].len();
    let mut s = DMatrix::zeros(d, d);
    for &i in members {
        let diff = DVector::from_iterator(d, x[i].iter().copied()) - mean;
        s += &diff * diff.transpose();
    }
    s
}

/// Ridge keeping covariances decomposable: 1e-6 * trace/D plus an absolute
/// floor for all-zero scatters.
fn ridge(cov: &mut DMatrix<f64>) {
    let d = cov.nrows();
    let bump = 1e-6 * cov.trace() / d as f64 + 1e-12;
    for i in 0..d {
        cov[(i, i)] += bump;
    }
}

struct LdaModel {
    weights: DVector<f64>,
    threshold: f64,
}

impl LdaModel {
    fn fit(x: &[Vec<f64>], labels: &[bool], train: &[usize]) -> Self {
        let pos: Vec<usize> = train.iter().copied().filter(|i| labels[*i]).collect();
        let neg: Vec<usize> = train.iter().copied().filter(|i| !labels[*i]).collect();
        let mu1 = class_mean(x, &pos);
        let mu0 = class_mean(x, &neg);
        let mut pooled =
            (scatter(x, &pos, &mu1) + scatter(x, &neg, &mu0)) / (train.len() as f64 - 2.0).max(1.0);
        ridge(&mut pooled);
        let diff = &mu1 - &mu0;
        let weights = Cholesky::new(pooled)
            .map(|c| c.solve(&diff))
            .unwrap_or_else(|| diff.clone());
        let prior = (pos.len() as f64 / neg.len() as f64).ln();
        let threshold = weights.dot(&((&mu0 + &mu1) / 2.0)) - prior;
        LdaModel { weights, threshold }
    }

    fn predict(&self, point: &[f64]) -> bool {
        let x = DVector::from_iterator(point.len(), point.iter().copied());
        self.weights.dot(&x) > self.threshold
    }
}

struct QdaClass {
    mean: DVector<f64>,
    chol: Cholesky<f64, nalgebra::Dyn>,
    log_det: f64,
    log_prior: f64,
}

impl QdaClass {
    fn score(&self, x: &DVector<f64>) -> f64 {
        let diff = x - &self.mean;
        let solved = self.chol.solve(&diff);
        -0.5 * self.log_det - 0.5 * diff.dot(&solved) + self.log_prior
    }
}

struct QdaModel {
    classes: [QdaClass; 2],
}

impl QdaModel {
    fn fit(x: &[Vec<f64>], labels: &[bool], train: &[usize]) -> Self {
        let build = |members: &[usize], total: usize| {
            let mean = class_mean(x, members);
            let mut cov = scatter(x, members, &mean) / (members.len() as f64 - 1.0).max(1.0);
            ridge(&mut cov);
            let chol = Cholesky::new(cov).expect("ridged covariance is positive definite");
            let log_det = 2.0 * (0..mean.len()).map(|i| chol.l()[(i, i)].ln()).sum::<f64>();
            QdaClass {
                mean,
                chol,
                log_det,
                log_prior: (members.len() as f64 / total as f64).ln(),
            }
        };
        let pos: Vec<usize> = train.iter().copied().filter(|i| labels[*i]).collect();
        let neg: Vec<usize> = train.iter().copied().filter(|i| !labels[*i]).collect();
        QdaModel { classes: [build(&neg, train.len()), build(&pos, train.len())] }
    }

    fn predict(&self, point: &[f64]) -> bool {
        let x = DVector::from_iterator(point.len(), point.iter().copied());
        self.classes[1].score(&x) > self.classes[0].score(&x)
    }
}

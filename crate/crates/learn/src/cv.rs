//! Preprocessing pipeline, stratified cross-validation and grid search.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::mi::{mutual_information_scores, select_top_k, DEFAULT_BINS};
use crate::{check_rect, Kernel, LearnError, Matrix, Pca, Standardizer, SvmModel};

pub const DEFAULT_FOLDS: usize = 10;
pub const DEFAULT_MI_K: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub kernel: Kernel,
    pub c: f64,
    pub pca_k: usize,
    pub mi_k: usize,
}

impl std::fmt::Display for PipelineParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} C={} pca={} mi={}", self.kernel, self.c, self.pca_k, self.mi_k)
    }
}

/// standardize → MI top-k → PCA → SVM, all fit on the same rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pipeline {
    pub params: PipelineParams,
    pub standardizer: Standardizer,
    pub mi_mask: Vec<usize>,
    pub pca: Pca,
    pub svm: SvmModel,
}

impl Pipeline {
    /// `mi_k` is clamped to the column count and `pca_k` to
    /// `min(pca_k, mi_k, rows − 1)`.
    pub fn fit(x: &Matrix, y: &[bool], params: PipelineParams) -> Result<Pipeline, LearnError> {
        let d = check_rect(x)?;
        let standardizer = Standardizer::fit(x)?;
        let z = standardizer.apply_all(x);
        let mi_k = params.mi_k.min(d);
        let scores = mutual_information_scores(&z, y, DEFAULT_BINS)?;
        let mi_mask = select_top_k(&scores, mi_k)?;
        let masked: Vec<Vec<f64>> = z.iter().map(|r| mi_mask.iter().map(|&j| r[j]).collect()).collect();
        let pca_k = params.pca_k.min(mi_k).min(x.len() - 1).max(1);
        let pca = Pca::fit(&masked, pca_k)?;
        let projected = pca.transform_all(&masked);
        let svm = SvmModel::train(&projected, y, params.kernel, params.c)?;
        Ok(Pipeline { params, standardizer, mi_mask, pca, svm })
    }

    fn project(&self, x: &[f64]) -> Vec<f64> {
        let z = self.standardizer.apply(x);
        let masked: Vec<f64> = self.mi_mask.iter().map(|&j| z[j]).collect();
        self.pca.transform(&masked)
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        self.svm.decision(&self.project(x))
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        self.svm.predict(&self.project(x))
    }
}

/// Fold index per row. Each class is shuffled and dealt round-robin, with
/// the deal continuing across classes so fold sizes differ by at most one.
pub fn stratified_folds(y: &[bool], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assign = vec![0; y.len()];
    let mut next = 0;
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            assign[i] = next % folds;
            next += 1;
        }
    }
    assign
}

/// Stratified split into (train, test) with `round(n·fraction)` test rows
/// drawn proportionally from each class.
pub fn stratified_holdout(y: &[bool], fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        idx.shuffle(&mut rng);
        let t = (idx.len() as f64 * fraction).round() as usize;
        test.extend_from_slice(&idx[..t]);
        train.extend_from_slice(&idx[t..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    /// Mean per-fold accuracy over evaluated folds; `None` when every fold
    /// was skipped.
    pub accuracy: Option<f64>,
    pub fold_accuracies: Vec<f64>,
    pub skipped: usize,
}

fn rows(x: &Matrix, idx: &[usize]) -> Vec<Vec<f64>> {
    idx.iter().map(|&i| x[i].clone()).collect()
}

pub fn cross_validate(x: &Matrix, y: &[bool], params: PipelineParams, folds: usize, seed: u64) -> Result<CvReport, LearnError> {
    check_rect(x)?;
    if x.len() != y.len() {
        return Err(LearnError::Invalid("feature and label counts differ".into()));
    }
    if folds < 2 || x.len() < folds {
        return Err(LearnError::Invalid(format!("{folds} folds over {} rows", x.len())));
    }
    if !y.iter().any(|&b| b) || y.iter().all(|&b| b) {
        return Err(LearnError::SingleClass);
    }
    let assign = stratified_folds(y, folds, seed);
    let mut fold_accuracies = Vec::new();
    let mut skipped = 0;
    for f in 0..folds {
        let (test, train): (Vec<usize>, Vec<usize>) = (0..x.len()).partition(|&i| assign[i] == f);
        let ty: Vec<bool> = train.iter().map(|&i| y[i]).collect();
        if test.is_empty() || !ty.iter().any(|&b| b) || ty.iter().all(|&b| b) {
            log::warn!("fold {f}: training split lacks a class, skipped");
            skipped += 1;
            continue;
        }
        let model = Pipeline::fit(&rows(x, &train), &ty, params)?;
        let correct = test.iter().filter(|&&i| model.predict(&x[i]) == y[i]).count();
        fold_accuracies.push(correct as f64 / test.len() as f64);
    }
    let accuracy = (!fold_accuracies.is_empty()).then(|| fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64);
    Ok(CvReport { accuracy, fold_accuracies, skipped })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub points: Vec<PipelineParams>,
}

impl Default for Grid {
    /// linear × C, then rbf × C × γ, each crossed with the PCA sizes.
    fn default() -> Self {
        let cs = [0.1, 1.0, 10.0];
        let gammas = [0.01, 0.1, 1.0];
        let pca = [5, 10, 20, 30];
        let mut kernels = Vec::new();
        for &c in &cs {
            kernels.push((Kernel::Linear, c));
        }
        for &c in &cs {
            for &gamma in &gammas {
                kernels.push((Kernel::Rbf { gamma }, c));
            }
        }
        let mut points = Vec::new();
        for (kernel, c) in kernels {
            for &pca_k in &pca {
                points.push(PipelineParams { kernel, c, pca_k, mi_k: DEFAULT_MI_K });
            }
        }
        Grid { points }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub best: PipelineParams,
    pub accuracy: f64,
    /// Accuracy per grid point, in grid order.
    pub scores: Vec<Option<f64>>,
}

/// Exhaustive search; the first point reaching the best accuracy wins.
pub fn grid_search(x: &Matrix, y: &[bool], grid: &Grid, folds: usize, seed: u64) -> Result<GridResult, LearnError> {
    if grid.points.is_empty() {
        return Err(LearnError::Invalid("empty grid".into()));
    }
    let mut scores = Vec::with_capacity(grid.points.len());
    let mut best: Option<(usize, f64)> = None;
    for (i, &p) in grid.points.iter().enumerate() {
        let acc = cross_validate(x, y, p, folds, seed)?.accuracy;
        scores.push(acc);
        if let Some(a) = acc {
            if best.is_none_or(|(_, b)| a > b) {
                best = Some((i, a));
            }
        }
    }
    let (i, accuracy) = best.ok_or_else(|| LearnError::Invalid("no fold could be evaluated".into()))?;
    Ok(GridResult { best: grid.points[i], accuracy, scores })
}

/// F1 of the positive (Good) class; 0 when there are no true positives.
pub fn f1_good(truth: &[bool], predicted: &[bool]) -> f64 {
    let tp = truth.iter().zip(predicted).filter(|(t, p)| **t && **p).count() as f64;
    let fp = truth.iter().zip(predicted).filter(|(t, p)| !**t && **p).count() as f64;
    let fneg = truth.iter().zip(predicted).filter(|(t, p)| **t && !**p).count() as f64;
    if tp == 0.0 {
        0.0
    } else {
        2.0 * tp / (2.0 * tp + fp + fneg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_are_balanced_and_stratified() {
        let y: Vec<bool> = (0..23).map(|i| i % 3 == 0).collect();
        let a = stratified_folds(&y, 5, 1);
        for f in 0..5 {
            let size = a.iter().filter(|&&v| v == f).count();
            assert!((4..=5).contains(&size));
            let pos = (0..23).filter(|&i| a[i] == f && y[i]).count();
            assert!((1..=2).contains(&pos));
        }
    }

    #[test]
    fn holdout_takes_a_quarter_per_class() {
        let y: Vec<bool> = (0..40).map(|i| i < 16).collect();
        let (train, test) = stratified_holdout(&y, 0.25, 9);
        assert_eq!(test.len(), 10);
        assert_eq!(test.iter().filter(|&&i| y[i]).count(), 4);
        assert_eq!(train.len() + test.len(), 40);
    }

    #[test]
    fn default_grid_enumeration() {
        let g = Grid::default();
        assert_eq!(g.points.len(), (3 + 9) * 4);
        assert_eq!(g.points[0].kernel, Kernel::Linear);
        assert_eq!((g.points[0].c, g.points[0].pca_k), (0.1, 5));
        assert!(g.points.iter().all(|p| p.mi_k == 40));
    }

    #[test]
    fn f1_values() {
        assert_eq!(f1_good(&[true, true, false], &[true, false, false]), 2.0 / 3.0);
        assert_eq!(f1_good(&[false, false], &[false, false]), 0.0);
    }
}

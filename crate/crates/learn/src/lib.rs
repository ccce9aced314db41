//! Learning which order set to use for an ontology: per-configuration binary
//! SVMs over standardized, MI-filtered, PCA-projected feature vectors.

pub mod bundle;
pub mod cv;
pub mod mi;
pub mod pca;
pub mod standardize;
pub mod svm;

use thiserror::Error;

pub use bundle::{priority_ranking, select_from_predictions, select_order_config, train_bundle, ConfigEntry, ConfigModel, ModelBundle, Selection, SelectionCase, TrainOptions};
pub use cv::{cross_validate, f1_good, grid_search, stratified_folds, stratified_holdout, CvReport, Grid, GridResult, Pipeline, PipelineParams};
pub use mi::{discretize, mutual_information, mutual_information_scores, select_top_k};
pub use pca::Pca;
pub use standardize::Standardizer;
pub use svm::{kkt_violation, Kernel, Solution, SvmModel};

#[derive(Debug, Error, PartialEq)]
pub enum LearnError {
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("labels contain a single class")]
    SingleClass,
    #[error("k = {k} is out of range (at most {max})")]
    KOutOfRange { k: usize, max: usize },
    #[error("rows have inconsistent lengths")]
    Ragged,
    #[error("{0}")]
    Invalid(String),
}

/// Rows of a design matrix.
pub type Matrix = [Vec<f64>];

fn check_rect(x: &Matrix) -> Result<usize, LearnError> {
    let d = x.first().map_or(0, Vec::len);
    if x.iter().any(|r| r.len() != d) {
        return Err(LearnError::Ragged);
    }
    Ok(d)
}

//! Per-configuration models, the Good-label priority ranking and the
//! runtime selection rule.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use tableau_core::bench::{Label, LabelTable, CONFIG_COUNT};
use tableau_core::features::FeatureVector;
use tableau_core::tableau::STUDIED_ORDERS;

use crate::cv::{f1_good, grid_search, stratified_holdout, DEFAULT_FOLDS};
use crate::{Grid, LearnError, Pipeline, PipelineParams};

pub const BUNDLE_VERSION: u32 = 1;
pub const DEFAULT_HOLDOUT: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConfigModel {
    Pipeline(Box<Pipeline>),
    /// Every training row carried the same label.
    Constant { good: bool },
}

impl ConfigModel {
    pub fn predict(&self, x: &[f64]) -> bool {
        match self {
            ConfigModel::Pipeline(p) => p.predict(x),
            ConfigModel::Constant { good } => *good,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEntry {
    /// 1..=7.
    pub label: usize,
    pub config: String,
    pub params: Option<PipelineParams>,
    pub model: ConfigModel,
    pub cv_accuracy: f64,
    pub holdout_f1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub version: u32,
    pub seed: u64,
    pub configs: Vec<ConfigEntry>,
    /// Config labels ordered by descending CV accuracy; ties keep the lower
    /// label first.
    pub priority: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub grid: Grid,
    pub folds: usize,
    pub seed: u64,
    /// Fraction of rows held out for the F1 estimate; 0 trains on all rows.
    pub holdout: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions { grid: Grid::default(), folds: DEFAULT_FOLDS, seed: 0, holdout: DEFAULT_HOLDOUT }
    }
}

pub fn priority_ranking(accuracies: &[f64]) -> Vec<usize> {
    let mut labels: Vec<usize> = (1..=accuracies.len()).collect();
    labels.sort_by(|&a, &b| accuracies[b - 1].total_cmp(&accuracies[a - 1]).then(a.cmp(&b)));
    labels
}

fn train_config(label: usize, x: &[Vec<f64>], y: &[bool], opts: &TrainOptions) -> Result<ConfigEntry, LearnError> {
    let config = STUDIED_ORDERS[label - 1].to_string();
    let goods = y.iter().filter(|&&b| b).count();
    if goods == 0 || goods == y.len() {
        log::warn!("config {label}: single class in training data, using a constant classifier");
        return Ok(ConfigEntry {
            label,
            config,
            params: None,
            model: ConfigModel::Constant { good: goods > 0 },
            cv_accuracy: 1.0,
            holdout_f1: None,
        });
    }
    let seed = opts.seed.wrapping_add(label as u64);
    let (train, test) = if opts.holdout > 0.0 {
        stratified_holdout(y, opts.holdout, seed)
    } else {
        ((0..y.len()).collect(), Vec::new())
    };
    let tx: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
    let ty: Vec<bool> = train.iter().map(|&i| y[i]).collect();
    if !ty.iter().any(|&b| b) || ty.iter().all(|&b| b) {
        return Err(LearnError::Invalid(format!("config {label}: holdout left the training split with one class")));
    }
    let folds = opts.folds.min(tx.len());
    let grid = grid_search(&tx, &ty, &opts.grid, folds, seed)?;
    log::info!("config {label}: best {} accuracy {:.3}", grid.best, grid.accuracy);
    let pipeline = Pipeline::fit(&tx, &ty, grid.best)?;
    let holdout_f1 = (!test.is_empty()).then(|| {
        let truth: Vec<bool> = test.iter().map(|&i| y[i]).collect();
        let pred: Vec<bool> = test.iter().map(|&i| pipeline.predict(&x[i])).collect();
        f1_good(&truth, &pred)
    });
    Ok(ConfigEntry {
        label,
        config,
        params: Some(grid.best),
        model: ConfigModel::Pipeline(Box::new(pipeline)),
        cv_accuracy: grid.accuracy,
        holdout_f1,
    })
}

/// Joins features and labels on ontology id (rows missing from either side
/// are dropped) and trains one classifier per configuration.
pub fn train_bundle(features: &[(String, FeatureVector)], labels: &LabelTable, opts: &TrainOptions) -> Result<ModelBundle, LearnError> {
    let by_id: HashMap<&str, &[Label; CONFIG_COUNT]> = labels.rows.iter().map(|(id, l)| (id.as_str(), l)).collect();
    let joined: Vec<(Vec<f64>, &[Label; CONFIG_COUNT])> = features
        .iter()
        .filter_map(|(id, fv)| by_id.get(id.as_str()).map(|l| (fv.0.to_vec(), *l)))
        .collect();
    if joined.len() < 2 {
        return Err(LearnError::TooFewRows { needed: 2, got: joined.len() });
    }
    let x: Vec<Vec<f64>> = joined.iter().map(|(r, _)| r.clone()).collect();
    let configs = (1..=CONFIG_COUNT)
        .map(|label| {
            let y: Vec<bool> = joined.iter().map(|(_, l)| l[label - 1] == Label::Good).collect();
            train_config(label, &x, &y, opts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let accuracies: Vec<f64> = configs.iter().map(|c| c.cv_accuracy).collect();
    Ok(ModelBundle { version: BUNDLE_VERSION, seed: opts.seed, configs, priority: priority_ranking(&accuracies) })
}

impl ModelBundle {
    pub fn accuracies(&self) -> Vec<f64> {
        self.configs.iter().map(|c| c.cv_accuracy).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn from_json(s: &str) -> Result<ModelBundle, LearnError> {
        let b: ModelBundle = serde_json::from_str(s).map_err(|e| LearnError::Invalid(format!("bundle: {e}")))?;
        if b.version != BUNDLE_VERSION {
            return Err(LearnError::Invalid(format!("bundle version {} (expected {BUNDLE_VERSION})", b.version)));
        }
        let mut sorted = b.priority.clone();
        sorted.sort_unstable();
        if b.configs.len() != CONFIG_COUNT || sorted != (1..=CONFIG_COUNT).collect::<Vec<_>>() {
            return Err(LearnError::Invalid("bundle must hold all seven configurations".into()));
        }
        Ok(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionCase {
    SingleGood,
    RankedGood,
    NoGood,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    /// Chosen config label, 1..=7.
    pub config: usize,
    pub case: SelectionCase,
    pub predictions: Vec<bool>,
}

impl Selection {
    pub fn config_string(&self) -> &'static str {
        STUDIED_ORDERS[self.config - 1]
    }
}

/// One Good: take it. Several: the one ranked best in `priority`. None: the
/// configuration whose classifier has the lowest accuracy, as the one most
/// likely to have missed a Good.
pub fn select_from_predictions(predictions: &[bool], priority: &[usize], accuracies: &[f64]) -> Selection {
    let goods: Vec<usize> = (1..=predictions.len()).filter(|&l| predictions[l - 1]).collect();
    let (config, case) = match goods.len() {
        1 => (goods[0], SelectionCase::SingleGood),
        0 => {
            let worst = (1..=accuracies.len())
                .min_by(|&a, &b| accuracies[a - 1].total_cmp(&accuracies[b - 1]).then(a.cmp(&b)))
                .expect("non-empty");
            (worst, SelectionCase::NoGood)
        }
        _ => {
            let best = *priority.iter().find(|l| goods.contains(l)).expect("priority covers every label");
            (best, SelectionCase::RankedGood)
        }
    };
    Selection { config, case, predictions: predictions.to_vec() }
}

pub fn select_order_config(fv: &FeatureVector, bundle: &ModelBundle) -> Selection {
    let preds: Vec<bool> = bundle.configs.iter().map(|c| c.model.predict(&fv.0)).collect();
    select_from_predictions(&preds, &bundle.priority, &bundle.accuracies())
}

//! Runtime sweeps over the seven order sets, corpus filtering, threshold
//! derivation and Good/Bad labelling.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::io::SourceDocument;
use crate::kb::KbError;
use crate::services::classify_hierarchy;
use crate::tableau::OrderConfig;

pub const CONFIG_COUNT: usize = 7;
pub const DEFAULT_DELTA_MS: f64 = 200.0;
/// Spread cut-off for large real-world corpora.
pub const CORPUS_DELTA_MS: f64 = 2000.0;
pub const DEFAULT_REPEATS: usize = 3;

/// One configuration's measured runtime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Runtime {
    Millis(f64),
    Timeout,
}

impl Runtime {
    pub fn millis(self) -> Option<f64> {
        match self {
            Runtime::Millis(ms) => Some(ms),
            Runtime::Timeout => None,
        }
    }

    pub fn is_timeout(self) -> bool {
        matches!(self, Runtime::Timeout)
    }

    /// Timeouts compare as +∞.
    fn as_f64(self) -> f64 {
        self.millis().unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeRecord {
    pub id: String,
    pub runtimes: [Runtime; CONFIG_COUNT],
}

impl RuntimeRecord {
    pub fn new(id: impl Into<String>, runtimes: [Runtime; CONFIG_COUNT]) -> Self {
        RuntimeRecord { id: id.into(), runtimes }
    }

    pub fn from_millis(id: impl Into<String>, ms: [f64; CONFIG_COUNT]) -> Self {
        RuntimeRecord::new(id, ms.map(Runtime::Millis))
    }
}

/// Arithmetic mean of repeated runs; any timeout voids the slot.
pub fn average_runs(runs: &[Runtime]) -> Runtime {
    let mut sum = 0.0;
    for r in runs {
        match r {
            Runtime::Millis(ms) => sum += ms,
            Runtime::Timeout => return Runtime::Timeout,
        }
    }
    if runs.is_empty() {
        return Runtime::Timeout;
    }
    Runtime::Millis(sum / runs.len() as f64)
}

/// Classifies the ontology `repeats` times under each configuration in turn.
pub fn benchmark_ontology(
    id: &str,
    doc: &SourceDocument,
    configs: &[OrderConfig],
    repeats: usize,
    timeout_ms: u64,
) -> Result<RuntimeRecord, KbError> {
    assert_eq!(configs.len(), CONFIG_COUNT, "a sweep needs exactly seven configurations");
    let kb = doc.knowledge_base();
    let mut runtimes = [Runtime::Timeout; CONFIG_COUNT];
    for (slot, cfg) in configs.iter().enumerate() {
        let mut runs = Vec::with_capacity(repeats.max(1));
        for _ in 0..repeats.max(1) {
            let res = classify_hierarchy(&kb, cfg, timeout_ms)?;
            if res.timed_out() {
                runs.push(Runtime::Timeout);
                break;
            }
            runs.push(Runtime::Millis(res.elapsed_ms));
        }
        runtimes[slot] = average_runs(&runs);
        log::debug!("{id} config {} -> {:?}", cfg, runtimes[slot]);
    }
    Ok(RuntimeRecord::new(id, runtimes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExclusionReason {
    /// No timeouts and max − min below delta.
    NarrowSpread,
    AllTimeout,
}

impl fmt::Display for ExclusionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExclusionReason::NarrowSpread => "narrow-spread",
            ExclusionReason::AllTimeout => "all-timeout",
        })
    }
}

pub fn exclusion_reason(record: &RuntimeRecord, delta_ms: f64) -> Option<ExclusionReason> {
    if record.runtimes.iter().all(|r| r.is_timeout()) {
        return Some(ExclusionReason::AllTimeout);
    }
    let max = record.runtimes.iter().map(|r| r.as_f64()).fold(f64::NEG_INFINITY, f64::max);
    let min = record.runtimes.iter().map(|r| r.as_f64()).fold(f64::INFINITY, f64::min);
    (max - min < delta_ms).then_some(ExclusionReason::NarrowSpread)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilterResult {
    pub kept: Vec<RuntimeRecord>,
    pub excluded: Vec<(RuntimeRecord, ExclusionReason)>,
}

pub fn filter_corpus(records: &[RuntimeRecord], delta_ms: f64) -> FilterResult {
    let mut out = FilterResult::default();
    for r in records {
        match exclusion_reason(r, delta_ms) {
            Some(reason) => out.excluded.push((r.clone(), reason)),
            None => out.kept.push(r.clone()),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigMoments {
    pub mean: f64,
    pub std: f64,
    pub mean_plus_std: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    /// `None` for a configuration without any finished run.
    pub configs: Vec<Option<ConfigMoments>>,
    pub threshold_ms: u64,
}

impl ThresholdReport {
    /// Averages the available `mean + std` values and floors the result.
    pub fn from_moments(moments: Vec<Option<(f64, f64)>>) -> ThresholdReport {
        let configs: Vec<Option<ConfigMoments>> = moments
            .into_iter()
            .map(|m| m.map(|(mean, std)| ConfigMoments { mean, std, mean_plus_std: mean + std, samples: 0 }))
            .collect();
        let present: Vec<f64> = configs.iter().flatten().map(|m| m.mean_plus_std).collect();
        let threshold_ms = if present.is_empty() {
            0
        } else {
            (present.iter().sum::<f64>() / present.len() as f64).floor() as u64
        };
        ThresholdReport { configs, threshold_ms }
    }
}

/// Population mean and standard deviation per configuration over finished
/// runs; the threshold is the floored average of the `mean + std` values.
pub fn compute_threshold(records: &[RuntimeRecord]) -> ThresholdReport {
    let mut moments = Vec::with_capacity(CONFIG_COUNT);
    let mut counts = Vec::with_capacity(CONFIG_COUNT);
    for slot in 0..CONFIG_COUNT {
        let xs: Vec<f64> = records.iter().filter_map(|r| r.runtimes[slot].millis()).collect();
        counts.push(xs.len());
        if xs.is_empty() {
            moments.push(None);
            continue;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        moments.push(Some((mean, var.sqrt())));
    }
    let mut report = ThresholdReport::from_moments(moments);
    for (m, n) in report.configs.iter_mut().zip(counts) {
        if let Some(m) = m {
            m.samples = n;
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Good,
    Bad,
}

impl Label {
    pub fn is_good(self) -> bool {
        self == Label::Good
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Good => "Good",
            Label::Bad => "Bad",
        })
    }
}

impl std::str::FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Good" => Ok(Label::Good),
            "Bad" => Ok(Label::Bad),
            other => Err(format!("unknown label `{other}`")),
        }
    }
}

/// Labels per ontology, one per configuration (slot 0 is config 1).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LabelTable {
    pub rows: Vec<(String, [Label; CONFIG_COUNT])>,
}

pub fn label_for(runtime: Runtime, threshold_ms: u64) -> Label {
    match runtime {
        Runtime::Millis(ms) if ms < threshold_ms as f64 => Label::Good,
        _ => Label::Bad,
    }
}

pub fn assign_labels(records: &[RuntimeRecord], threshold_ms: u64) -> LabelTable {
    LabelTable {
        rows: records.iter().map(|r| (r.id.clone(), r.runtimes.map(|rt| label_for(rt, threshold_ms)))).collect(),
    }
}

//! Exact retrieval index, Hit@K / Coverage@K and the evaluation drivers.

mod index;
mod report;

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::catalog::Catalog;
use crate::conditions::Condition;
use crate::encoder::EncoderModel;
use crate::meta::sha256_hex;
use crate::taskgen::{dataset_to_jsonl, Metric, QuerySample, Task};

pub use index::{build_index, ItemIndex};
pub use report::{comparison_table, load_report, write_report, EvalReport, TaskScore};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("sample {0} has no positives")]
    EmptyPositives(String),
    #[error("unknown item \"{0}\"")]
    UnknownItem(String),
    #[error("sample {sample}: {task} is scored by coverage but the sample has no condition")]
    MissingCondition { sample: String, task: Task },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// 1.0 if any of the first `k` ranked ids is a positive.
pub fn hit_at_k(ranked: &[String], positives: &[String], k: usize) -> Result<f64, EvalError> {
    if k == 0 {
        return Err(EvalError::ZeroK);
    }
    if positives.is_empty() {
        return Err(EvalError::EmptyPositives(String::new()));
    }
    let hit = ranked.iter().take(k).any(|id| positives.contains(id));
    Ok(if hit { 1.0 } else { 0.0 })
}

/// Fraction of the first `k` slots holding an item that satisfies `cond`.
/// The denominator is always `k`.
pub fn coverage_at_k(ranked: &[String], cond: &Condition, catalog: &Catalog, k: usize) -> Result<f64, EvalError> {
    if k == 0 {
        return Err(EvalError::ZeroK);
    }
    let mut n = 0;
    for id in ranked.iter().take(k) {
        let it = catalog.get(id).ok_or_else(|| EvalError::UnknownItem(id.clone()))?;
        if cond.eval(it) {
            n += 1;
        }
    }
    Ok(n as f64 / k as f64)
}

/// Metric value of one sample against a built index.
pub fn score_sample(
    index: &ItemIndex,
    catalog: &Catalog,
    model: &EncoderModel,
    sample: &QuerySample,
    k: usize,
) -> Result<f64, EvalError> {
    let ranked: Vec<String> = index
        .topk(&model.embed_query(&sample.query), k)
        .into_iter()
        .map(|(id, _)| id)
        .collect();
    match sample.task.metric() {
        Metric::Hit => hit_at_k(&ranked, &sample.positives, k).map_err(|e| match e {
            EvalError::EmptyPositives(_) => EvalError::EmptyPositives(sample.sample_id.clone()),
            e => e,
        }),
        Metric::Coverage => {
            let cond = sample.condition.as_ref().ok_or_else(|| EvalError::MissingCondition {
                sample: sample.sample_id.clone(),
                task: sample.task,
            })?;
            coverage_at_k(&ranked, cond, catalog, k)
        }
    }
}

/// Options that only affect report labelling.
#[derive(Debug, Clone, Default)]
pub struct EvalOptions {
    /// Name for the model column in comparison tables.
    pub model_label: Option<String>,
    /// Forces the OOD label with this name.
    pub ood_label: Option<String>,
    pub seed: Option<u64>,
}

/// Per-task mean metric over `dataset`.
pub fn evaluate(
    dataset: &[QuerySample],
    catalog: &Catalog,
    model: &EncoderModel,
    k: usize,
    opts: &EvalOptions,
) -> Result<EvalReport, EvalError> {
    let index = build_index(catalog, model);
    evaluate_with_index(dataset, catalog, model, &index, k, opts)
}

pub fn evaluate_with_index(
    dataset: &[QuerySample],
    catalog: &Catalog,
    model: &EncoderModel,
    index: &ItemIndex,
    k: usize,
    opts: &EvalOptions,
) -> Result<EvalReport, EvalError> {
    if k == 0 {
        return Err(EvalError::ZeroK);
    }
    if dataset.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    let started = std::time::Instant::now();
    let values: Vec<f64> = dataset
        .par_iter()
        .map(|s| score_sample(index, catalog, model, s, k))
        .collect::<Result<_, _>>()?;
    let mut sums: BTreeMap<Task, (f64, usize)> = BTreeMap::new();
    for (s, v) in dataset.iter().zip(&values) {
        let e = sums.entry(s.task).or_insert((0.0, 0));
        e.0 += v;
        e.1 += 1;
    }
    let tasks = sums
        .into_iter()
        .map(|(task, (sum, n))| TaskScore {
            task: task.name().to_string(),
            metric: metric_name(task.metric(), k),
            value: sum / n as f64,
            samples: n,
        })
        .collect();
    let ood = match (&opts.ood_label, &model.trained_on) {
        (Some(_), _) => true,
        (None, Some(d)) => d != &catalog.name,
        (None, None) => false,
    };
    Ok(EvalReport {
        meta: None,
        model: opts.model_label.clone().unwrap_or_else(|| default_model_label(model)),
        model_fingerprint: model.fingerprint(),
        trained_on: model.trained_on.clone(),
        domain: catalog.name.clone(),
        ood,
        ood_label: if ood {
            Some(opts.ood_label.clone().unwrap_or_else(|| format!("{}->{}", model.trained_on.clone().unwrap_or_default(), catalog.name)))
        } else {
            None
        },
        k,
        dataset_hash: sha256_hex(dataset_to_jsonl(dataset, None).as_bytes()),
        seed: opts.seed,
        tasks,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    })
}

pub fn metric_name(metric: Metric, k: usize) -> String {
    match metric {
        Metric::Hit => format!("hit@{k}"),
        Metric::Coverage => format!("coverage@{k}"),
    }
}

fn default_model_label(model: &EncoderModel) -> String {
    match &model.trained_on {
        Some(d) => format!("trained:{d}"),
        None => "untrained".into(),
    }
}

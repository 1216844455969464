//! Contrastive trainer: one positive, seven mined negatives per sample.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{info_nce_loss, tokenize, EncoderError, EncoderModel};
use crate::catalog::Catalog;
use crate::seed;
use crate::taskgen::QuerySample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub warmup_fraction: f64,
    pub seed: u64,
    /// Serial gradient computation. Parallel mode reduces in the same
    /// fixed order, so both produce the same weights.
    pub deterministic: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 3,
            batch_size: 64,
            learning_rate: 1e-3,
            warmup_fraction: 0.1,
            seed: 0,
            deterministic: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), EncoderError> {
        if self.batch_size == 0 {
            return Err(EncoderError::Invalid("batch_size must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.warmup_fraction) {
            return Err(EncoderError::Invalid("warmup_fraction must be in [0, 1)".into()));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(EncoderError::Invalid("learning_rate must be finite and >= 0".into()));
        }
        Ok(())
    }

    /// Learning rate for 0-based `step` of `total`: linear warmup, then
    /// linear decay towards zero.
    pub fn lr_at(&self, step: usize, total: usize) -> f64 {
        let warmup = (self.warmup_fraction * total as f64).ceil() as usize;
        if step < warmup {
            self.learning_rate * (step + 1) as f64 / warmup as f64
        } else {
            self.learning_rate * (total - step) as f64 / (total - warmup) as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: EncoderModel,
    /// Mean sample loss per epoch.
    pub epoch_losses: Vec<f64>,
    pub steps: usize,
}

struct Prepared<'a> {
    id: &'a str,
    query: Vec<u32>,
    positives: Vec<usize>,
    negatives: Vec<usize>,
}

type Parts<'t> = Vec<(&'t [u32], Vec<f64>)>;

fn sample_grad<'t>(
    model: &EncoderModel,
    items: &'t [Vec<u32>],
    s: &'t Prepared<'_>,
    pos: usize,
) -> Result<(f64, Parts<'t>), EncoderError> {
    let texts: Vec<&'t [u32]> = std::iter::once(s.query.as_slice())
        .chain(std::iter::once(items[pos].as_slice()))
        .chain(s.negatives.iter().map(|&n| items[n].as_slice()))
        .collect();
    let pooled: Vec<Vec<f64>> = texts.iter().map(|t| model.pooled(t)).collect();
    let negs: Vec<&[f64]> = pooled[2..].iter().map(Vec::as_slice).collect();
    let lg = info_nce_loss(&pooled[0], &pooled[1], &negs, model.temperature).map_err(|e| EncoderError::Sample {
        sample: s.id.to_string(),
        message: e.to_string(),
    })?;
    if !lg.loss.is_finite() {
        return Err(EncoderError::NonFinite(s.id.to_string()));
    }
    let grads = std::iter::once(lg.d_query)
        .chain(std::iter::once(lg.d_pos))
        .chain(lg.d_negs);
    let parts = texts
        .into_iter()
        .zip(grads)
        .map(|(t, mut g)| {
            let n = t.len() as f64;
            g.iter_mut().for_each(|x| *x /= n);
            (t, g)
        })
        .collect();
    Ok((lg.loss, parts))
}

/// Trains a copy of `init` on `dataset` with SGD over InfoNCE.
pub fn train(
    dataset: &[QuerySample],
    catalog: &Catalog,
    init: &EncoderModel,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, EncoderError> {
    cfg.validate()?;
    init.validate()?;
    let mut model = init.clone();
    if cfg.epochs == 0 || dataset.is_empty() {
        return Ok(TrainOutcome {
            model,
            epoch_losses: Vec::new(),
            steps: 0,
        });
    }
    let tok = &model.tokenizer;
    let items: Vec<Vec<u32>> = catalog
        .items()
        .iter()
        .map(|it| tokenize(&it.text(), tok, tok.max_item_tokens))
        .collect();
    let resolve = |sid: &str, id: &str| {
        catalog.position(id).ok_or_else(|| EncoderError::Sample {
            sample: sid.to_string(),
            message: format!("unknown item \"{id}\""),
        })
    };
    let mut prepared = Vec::with_capacity(dataset.len());
    for s in dataset {
        let p = Prepared {
            id: &s.sample_id,
            query: tokenize(&s.query, tok, tok.max_query_tokens),
            positives: s.positives.iter().map(|id| resolve(&s.sample_id, id)).collect::<Result<_, _>>()?,
            negatives: s.negatives.iter().map(|id| resolve(&s.sample_id, id)).collect::<Result<_, _>>()?,
        };
        if p.positives.is_empty() {
            return Err(EncoderError::Sample {
                sample: s.sample_id.clone(),
                message: "no positives".into(),
            });
        }
        prepared.push(p);
    }

    let per_epoch = prepared.len().div_ceil(cfg.batch_size);
    let total = per_epoch * cfg.epochs;
    let dim = model.dim;
    let mut grad = vec![0.0f64; model.table.len()];
    let mut touched_flag = vec![false; model.tokenizer.bucket_count];
    let mut touched: Vec<u32> = Vec::new();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut step = 0;

    for epoch in 0..cfg.epochs {
        let mut order: Vec<usize> = (0..prepared.len()).collect();
        order.shuffle(&mut seed::rng(seed::derive(&[cfg.seed, epoch as u64])));
        let mut loss_sum = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let pick = |i: usize| {
                let s = &prepared[i];
                let j = seed::derive(&[cfg.seed, epoch as u64, i as u64]) % s.positives.len() as u64;
                s.positives[j as usize]
            };
            let results: Vec<(f64, Parts<'_>)> = if cfg.deterministic {
                batch
                    .iter()
                    .map(|&i| sample_grad(&model, &items, &prepared[i], pick(i)))
                    .collect::<Result<_, _>>()?
            } else {
                batch
                    .par_iter()
                    .map(|&i| sample_grad(&model, &items, &prepared[i], pick(i)))
                    .collect::<Result<_, _>>()?
            };
            for (loss, parts) in &results {
                loss_sum += loss;
                for (tokens, g) in parts {
                    for &t in tokens.iter() {
                        let row = &mut grad[t as usize * dim..(t as usize + 1) * dim];
                        row.iter_mut().zip(g).for_each(|(a, b)| *a += b);
                        if !touched_flag[t as usize] {
                            touched_flag[t as usize] = true;
                            touched.push(t);
                        }
                    }
                }
            }
            let scale = cfg.lr_at(step, total) / batch.len() as f64;
            for &t in &touched {
                let r = t as usize * dim..(t as usize + 1) * dim;
                for (w, g) in model.table[r.clone()].iter_mut().zip(&mut grad[r]) {
                    *w = (*w as f64 - scale * *g) as f32;
                    *g = 0.0;
                }
                touched_flag[t as usize] = false;
            }
            touched.clear();
            step += 1;
        }
        epoch_losses.push(loss_sum / prepared.len() as f64);
    }
    model.trained_on = Some(catalog.name.clone());
    Ok(TrainOutcome {
        model,
        epoch_losses,
        steps: step,
    })
}

//! Hashed bag-of-tokens text encoder.
//!
//! A text is tokenized into hashed word and character-trigram buckets; its
//! embedding is the mean of the bucket rows, L2-normalized. Queries and
//! items share the table, so retrieval is a cosine between the two.

mod loss;
mod model_io;
mod tokenize;
mod train;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::catalog::Item;
use crate::seed;

pub use loss::{info_nce_loss, LossGrad};
pub use model_io::{load_model, model_from_bytes, model_to_bytes, save_model, MODEL_FORMAT_VERSION};
pub use tokenize::{token_strings, tokenize, TokenizerConfig};
pub use train::{train, TrainConfig, TrainOutcome};

/// Standard deviation of the initial table entries.
pub const DEFAULT_INIT_STD: f32 = 0.003;

#[derive(Debug, thiserror::Error)]
pub enum EncoderError {
    #[error("zero-norm vector (empty text reached the loss)")]
    ZeroNorm,
    #[error("invalid encoder input: {0}")]
    Invalid(String),
    #[error("non-finite loss at sample {0}")]
    NonFinite(String),
    #[error("sample {sample}: {message}")]
    Sample { sample: String, message: String },
    #[error("model file {path}: {message}")]
    Format { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderModel {
    pub tokenizer: TokenizerConfig,
    pub dim: usize,
    pub temperature: f64,
    /// Row-major `bucket_count x dim`.
    pub table: Vec<f32>,
    /// Catalog name of the training data, if trained.
    pub trained_on: Option<String>,
}

impl EncoderModel {
    /// Randomly initialized model: entries drawn from N(0, `init_std`).
    pub fn seeded(tokenizer: TokenizerConfig, dim: usize, temperature: f64, init_std: f32, seed: u64) -> Result<Self, EncoderError> {
        tokenizer.validate().map_err(EncoderError::Invalid)?;
        if dim == 0 {
            return Err(EncoderError::Invalid("dim must be at least 1".into()));
        }
        if temperature.is_nan() || temperature <= 0.0 {
            return Err(EncoderError::Invalid(format!("temperature must be positive, got {temperature}")));
        }
        let normal = Normal::new(0.0f32, init_std)
            .map_err(|e| EncoderError::Invalid(format!("init std {init_std}: {e}")))?;
        let mut rng = seed::rng(seed);
        let table = (0..tokenizer.bucket_count * dim).map(|_| normal.sample(&mut rng)).collect();
        Ok(Self {
            tokenizer,
            dim,
            temperature,
            table,
            trained_on: None,
        })
    }

    /// Default geometry: 65536 buckets, 64 dimensions, temperature 0.05.
    pub fn with_seed(seed: u64) -> Self {
        Self::seeded(TokenizerConfig::default(), 64, 0.05, DEFAULT_INIT_STD, seed).expect("default config is valid")
    }

    pub fn validate(&self) -> Result<(), EncoderError> {
        self.tokenizer.validate().map_err(EncoderError::Invalid)?;
        if self.table.len() != self.tokenizer.bucket_count * self.dim {
            return Err(EncoderError::Invalid("table size does not match geometry".into()));
        }
        if self.temperature.is_nan() || self.temperature <= 0.0 {
            return Err(EncoderError::Invalid("temperature must be positive".into()));
        }
        if self.table.iter().any(|x| !x.is_finite()) {
            return Err(EncoderError::Invalid("non-finite weight".into()));
        }
        Ok(())
    }

    pub fn row(&self, bucket: u32) -> &[f32] {
        let start = bucket as usize * self.dim;
        &self.table[start..start + self.dim]
    }

    /// Mean of the token rows, unnormalized. Empty input gives zeros.
    pub fn pooled(&self, tokens: &[u32]) -> Vec<f64> {
        let mut acc = vec![0.0f64; self.dim];
        if tokens.is_empty() {
            return acc;
        }
        for &t in tokens {
            for (a, &x) in acc.iter_mut().zip(self.row(t)) {
                *a += x as f64;
            }
        }
        let n = tokens.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        acc
    }

    pub fn embed_tokens(&self, tokens: &[u32]) -> Vec<f64> {
        normalize(self.pooled(tokens))
    }

    /// Unit-norm embedding of `text`, or zeros when it has no tokens.
    pub fn embed(&self, text: &str, limit: usize) -> Vec<f64> {
        self.embed_tokens(&tokenize(text, &self.tokenizer, limit))
    }

    pub fn embed_query(&self, text: &str) -> Vec<f64> {
        self.embed(text, self.tokenizer.max_query_tokens)
    }

    pub fn embed_item(&self, item: &Item) -> Vec<f64> {
        self.embed(&item.text(), self.tokenizer.max_item_tokens)
    }

    /// SHA-256 over geometry and weights; metadata does not contribute.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&self.tokenizer).expect("tokenizer serializes"));
        h.update((self.dim as u64).to_le_bytes());
        h.update(self.temperature.to_le_bytes());
        for x in &self.table {
            h.update(x.to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    /// Multiplies every weight by `factor`.
    pub fn scaled(&self, factor: f32) -> Self {
        Self {
            table: self.table.iter().map(|x| x * factor).collect(),
            ..self.clone()
        }
    }
}

pub fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    v
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct ModelHeader {
    pub version: u32,
    pub dim: usize,
    pub bucket_count: usize,
    pub temperature: f64,
    pub tokenizer: TokenizerConfig,
    #[serde(default)]
    pub trained_on: Option<String>,
    #[serde(default)]
    pub meta: Option<crate::meta::ArtifactMeta>,
}

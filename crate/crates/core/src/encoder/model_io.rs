//! Model file: one JSON header line, then the table as little-endian f32.

use std::path::Path;

use super::{EncoderError, EncoderModel, ModelHeader};
use crate::meta::ArtifactMeta;

pub const MODEL_FORMAT_VERSION: u32 = 1;

pub fn model_to_bytes(model: &EncoderModel, meta: Option<&ArtifactMeta>) -> Vec<u8> {
    let header = ModelHeader {
        version: MODEL_FORMAT_VERSION,
        dim: model.dim,
        bucket_count: model.tokenizer.bucket_count,
        temperature: model.temperature,
        tokenizer: model.tokenizer.clone(),
        trained_on: model.trained_on.clone(),
        meta: meta.cloned(),
    };
    let mut out = serde_json::to_vec(&header).expect("header serializes");
    out.push(b'\n');
    out.reserve(model.table.len() * 4);
    for x in &model.table {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

/// Parses a model file; returns the model and the artifact metadata it carries.
pub fn model_from_bytes(bytes: &[u8], path: &str) -> Result<(EncoderModel, Option<ArtifactMeta>), EncoderError> {
    let err = |message: String| EncoderError::Format {
        path: path.to_string(),
        message,
    };
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| err("missing header line".into()))?;
    let header: ModelHeader =
        serde_json::from_slice(&bytes[..nl]).map_err(|e| err(format!("bad header: {e}")))?;
    if header.version != MODEL_FORMAT_VERSION {
        return Err(err(format!("unsupported format version {}", header.version)));
    }
    if header.bucket_count != header.tokenizer.bucket_count {
        return Err(err("bucket_count disagrees with tokenizer".into()));
    }
    let body = &bytes[nl + 1..];
    let want = header.bucket_count * header.dim * 4;
    if body.len() != want {
        return Err(err(format!("expected {want} table bytes, found {}", body.len())));
    }
    let table = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    let model = EncoderModel {
        tokenizer: header.tokenizer,
        dim: header.dim,
        temperature: header.temperature,
        table,
        trained_on: header.trained_on,
    };
    model.validate().map_err(|e| err(e.to_string()))?;
    Ok((model, header.meta))
}

pub fn save_model(path: &Path, model: &EncoderModel, meta: Option<&ArtifactMeta>) -> Result<(), EncoderError> {
    std::fs::write(path, model_to_bytes(model, meta)).map_err(|source| EncoderError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<(EncoderModel, Option<ArtifactMeta>), EncoderError> {
    let bytes = std::fs::read(path).map_err(|source| EncoderError::Io {
        path: path.display().to_string(),
        source,
    })?;
    model_from_bytes(&bytes, &path.display().to_string())
}

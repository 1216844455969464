//! Metadata header carried by every artifact the toolkit writes.
//!
//! Line-oriented files start with a single `{"_meta": {...}}` record; readers
//! skip it. The header never contains timestamps so reruns stay byte-identical.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactMeta {
    pub tool: String,
    pub version: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    /// Input artifact name -> sha256 hex digest.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub inputs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
struct MetaLine {
    #[serde(rename = "_meta")]
    meta: ArtifactMeta,
}

impl ArtifactMeta {
    pub fn new(kind: &str) -> Self {
        Self {
            tool: "forge".into(),
            version: crate::TOOL_VERSION.into(),
            kind: kind.into(),
            seed: None,
            domain: None,
            inputs: BTreeMap::new(),
            extra: BTreeMap::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_domain(mut self, domain: impl Into<String>) -> Self {
        self.domain = Some(domain.into());
        self
    }

    pub fn with_input(mut self, name: &str, digest: String) -> Self {
        self.inputs.insert(name.into(), digest);
        self
    }

    pub fn with_extra(mut self, key: &str, value: serde_json::Value) -> Self {
        self.extra.insert(key.into(), value);
        self
    }

    /// Serialized header line, without the trailing newline.
    pub fn to_line(&self) -> String {
        serde_json::to_string(&MetaLine { meta: self.clone() }).expect("meta serializes")
    }

    /// Parses a header line; `None` when the line is an ordinary record.
    pub fn from_line(line: &str) -> Option<Self> {
        let trimmed = line.trim_start();
        if !trimmed.starts_with("{\"_meta\"") {
            return None;
        }
        serde_json::from_str::<MetaLine>(trimmed).ok().map(|m| m.meta)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_line_roundtrip() {
        let m = ArtifactMeta::new("catalog")
            .with_seed(42)
            .with_domain("xbox-like")
            .with_input("templates", "ab".into());
        let line = m.to_line();
        assert!(line.starts_with("{\"_meta\""));
        assert_eq!(ArtifactMeta::from_line(&line), Some(m));
        assert_eq!(ArtifactMeta::from_line("{\"id\":\"g1\"}"), None);
    }
}

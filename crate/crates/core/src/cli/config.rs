//! Run configuration file: TOML with one section per pipeline stage.
//!
//! Every key is optional. Command-line flags override file values, and
//! file values override the built-in defaults below.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::encoder::{TokenizerConfig, DEFAULT_INIT_STD};
use crate::taskgen::{MixConfig, Task};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub paths: PathsConfig,
    pub seeds: SeedsConfig,
    pub synth: SynthConfig,
    pub mix: MixSection,
    pub train: TrainSection,
    pub tokenizer: TokenizerConfig,
    pub eval: EvalSection,
    pub llm: LlmSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub catalog: Option<PathBuf>,
    pub interactions: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub conversations: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeedsConfig {
    pub synth: u64,
    pub generate: u64,
    pub init: u64,
    pub train: u64,
    pub conversations: u64,
}

impl Default for SeedsConfig {
    fn default() -> Self {
        Self {
            synth: 42,
            generate: 42,
            init: 42,
            train: 42,
            conversations: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub items: usize,
    pub users: usize,
    pub domain: String,
    pub id_prefix: String,
    pub alternate_titles: bool,
    /// Conversations written next to the catalog; 0 writes none.
    pub conversations: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            items: 500,
            users: 300,
            domain: "synthetic".into(),
            id_prefix: "g".into(),
            alternate_titles: false,
            conversations: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixSection {
    pub train_total: usize,
    pub test_total: usize,
    /// Equal test share per task instead of the training proportions.
    pub test_uniform: bool,
    /// Training proportions per task; empty means the default mix.
    pub proportions: BTreeMap<Task, f64>,
}

impl Default for MixSection {
    fn default() -> Self {
        Self {
            train_total: 1200,
            test_total: 400,
            test_uniform: true,
            proportions: BTreeMap::new(),
        }
    }
}

impl MixSection {
    pub fn train_mix(&self, total: usize) -> MixConfig {
        if self.proportions.is_empty() {
            MixConfig::default_for(total)
        } else {
            MixConfig {
                total,
                proportions: self.proportions.clone(),
            }
        }
    }

    pub fn test_mix(&self, total: usize) -> MixConfig {
        if self.test_uniform {
            MixConfig::uniform(total)
        } else {
            self.train_mix(total)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub warmup_fraction: f64,
    pub dim: usize,
    pub temperature: f64,
    pub init_std: f32,
}

impl Default for TrainSection {
    fn default() -> Self {
        Self {
            epochs: 3,
            batch_size: 64,
            learning_rate: 1e-3,
            warmup_fraction: 0.1,
            dim: 64,
            temperature: 0.05,
            init_std: DEFAULT_INIT_STD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub k: usize,
}

impl Default for EvalSection {
    fn default() -> Self {
        Self { k: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmSection {
    /// `fallback` or `remote`.
    pub backend: String,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub auth_env: Option<String>,
    pub max_in_flight: usize,
}

impl Default for LlmSection {
    fn default() -> Self {
        Self {
            backend: "fallback".into(),
            endpoint: None,
            model: None,
            auth_env: None,
            max_in_flight: 4,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

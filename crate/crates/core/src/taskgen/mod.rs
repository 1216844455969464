//! Query generation for the ten retrieval task families.
//!
//! Every sample pairs a natural-language query with its positives, seven
//! verified negatives and, for the attribute-logic tasks, the [`Condition`]
//! that defines relevance.

mod attributes;
mod dataset;
mod generate;
mod misspell;
mod templates;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::CatalogError;
use crate::conditions::{Condition, ConditionError};
use crate::llm::LlmError;

pub use attributes::{attribute_condition, draw_attributes, render_attrs, sample_attributes, AttrDraw, AttrMode};
pub use dataset::{generate_dataset, load_dataset, parse_dataset, task_counts, write_dataset, dataset_to_jsonl};
pub use generate::{generate_sample, GenContext};
pub use misspell::{apply_edit, misspell, Edit};
pub use templates::{load_templates, parse_templates, Template, TemplateSet};

/// Negatives attached to every sample.
pub const NEGATIVES_PER_SAMPLE: usize = 7;
/// Upper bound on stored positives for multi-positive tasks.
pub const MAX_POSITIVES: usize = 50;
/// Attempts per sample before generation gives up.
pub const MAX_ATTEMPTS: u64 = 32;

#[derive(Debug, thiserror::Error)]
pub enum TaskgenError {
    #[error("template {id}: {message}")]
    Template { id: String, message: String },
    #[error("template pool: {0}")]
    Pool(String),
    #[error("misspelling \"{name}\": {message}")]
    Misspell { name: String, message: String },
    #[error("item \"{0}\" has no attributes besides title and description")]
    NoAttributes(String),
    #[error("{task} has no eligible {what}")]
    Unsatisfiable { task: Task, what: String },
    #[error("{task} sample {index}: gave up after {attempts} attempts: {last}")]
    Exhausted {
        task: Task,
        index: usize,
        attempts: u64,
        last: String,
    },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("invalid mix: {0}")]
    Mix(String),
    #[error("dataset line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Condition(#[from] ConditionError),
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub type Result<T, E = TaskgenError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Task {
    UH2I,
    I2I,
    US2I,
    FA2I,
    SA2I,
    AS2I,
    NM2I,
    VC2I,
    NA2I,
    UQ2I,
}

/// Metric used to score a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "hit@k")]
    Hit,
    #[serde(rename = "coverage@k")]
    Coverage,
}

impl Task {
    pub const ALL: [Task; 10] = [
        Task::UH2I,
        Task::I2I,
        Task::US2I,
        Task::FA2I,
        Task::SA2I,
        Task::AS2I,
        Task::NM2I,
        Task::VC2I,
        Task::NA2I,
        Task::UQ2I,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::UH2I => "UH2I",
            Task::I2I => "I2I",
            Task::US2I => "US2I",
            Task::FA2I => "FA2I",
            Task::SA2I => "SA2I",
            Task::AS2I => "AS2I",
            Task::NM2I => "NM2I",
            Task::VC2I => "VC2I",
            Task::NA2I => "NA2I",
            Task::UQ2I => "UQ2I",
        }
    }

    /// Placeholders a template for this task must contain, and no others.
    pub fn placeholders(self) -> &'static [&'static str] {
        match self {
            Task::UH2I => &["HISTORY"],
            Task::I2I => &["ITEM"],
            Task::US2I | Task::AS2I => &["SUMMARY"],
            Task::FA2I | Task::SA2I => &["ATTRS"],
            Task::NM2I => &["NAME"],
            Task::VC2I | Task::NA2I => &["CONDITION"],
            Task::UQ2I => &["CONDITION", "HISTORY"],
        }
    }

    /// Whether samples of this task carry a condition.
    pub fn has_condition(self) -> bool {
        matches!(self, Task::FA2I | Task::SA2I | Task::VC2I | Task::NA2I | Task::UQ2I)
    }

    /// Tasks built from user interaction histories.
    pub fn is_behavioral(self) -> bool {
        matches!(self, Task::UH2I | Task::US2I | Task::UQ2I)
    }

    pub fn metric(self) -> Metric {
        match self {
            Task::FA2I | Task::SA2I | Task::VC2I | Task::NA2I => Metric::Coverage,
            _ => Metric::Hit,
        }
    }

    fn code(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Task::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown task \"{s}\""))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }

    fn code(self) -> u64 {
        match self {
            Split::Train => 1,
            Split::Test => 2,
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One generated query with its ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuerySample {
    pub sample_id: String,
    pub task: Task,
    pub split: Split,
    pub query: String,
    pub positives: Vec<String>,
    pub negatives: Vec<String>,
    pub condition: Option<Condition>,
    pub template_id: String,
    pub seed: u64,
}

impl QuerySample {
    /// Structural checks that hold for every well-formed sample.
    pub fn check(&self) -> std::result::Result<(), String> {
        if self.query.trim().is_empty() {
            return Err("empty query".into());
        }
        if self.positives.is_empty() {
            return Err("no positives".into());
        }
        if self.negatives.len() != NEGATIVES_PER_SAMPLE {
            return Err(format!(
                "expected {NEGATIVES_PER_SAMPLE} negatives, found {}",
                self.negatives.len()
            ));
        }
        if let Some(n) = self.negatives.iter().find(|n| self.positives.contains(n)) {
            return Err(format!("item \"{n}\" is both positive and negative"));
        }
        if self.condition.is_some() != self.task.has_condition() {
            return Err(format!(
                "{} samples {} a condition",
                self.task,
                if self.task.has_condition() { "require" } else { "must not carry" }
            ));
        }
        if let Some(c) = &self.condition {
            c.validate().map_err(|e| e.to_string())?;
        }
        Ok(())
    }
}

/// Sample budget and its split across tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixConfig {
    pub total: usize,
    pub proportions: BTreeMap<Task, f64>,
}

impl MixConfig {
    /// UH2I 1/3, I2I 1/6, the other eight tasks 1/16 each.
    pub fn default_for(total: usize) -> Self {
        let proportions = Task::ALL
            .into_iter()
            .map(|t| {
                let p = match t {
                    Task::UH2I => 1.0 / 3.0,
                    Task::I2I => 1.0 / 6.0,
                    _ => 1.0 / 16.0,
                };
                (t, p)
            })
            .collect();
        Self { total, proportions }
    }

    /// Equal share for every task.
    pub fn uniform(total: usize) -> Self {
        let p = 1.0 / Task::ALL.len() as f64;
        Self {
            total,
            proportions: Task::ALL.into_iter().map(|t| (t, p)).collect(),
        }
    }

    /// Same proportions, different total.
    pub fn with_total(&self, total: usize) -> Self {
        Self {
            total,
            proportions: self.proportions.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((t, p)) = self.proportions.iter().find(|(_, p)| !(p.is_finite() && **p >= 0.0)) {
            return Err(TaskgenError::Mix(format!("{t} has proportion {p}")));
        }
        let sum: f64 = self.proportions.values().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(TaskgenError::Mix(format!("proportions sum to {sum}, expected 1")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_mix_is_valid() {
        MixConfig::default_for(10).validate().unwrap();
        let mut m = MixConfig::default_for(10);
        m.proportions.insert(Task::UH2I, 0.5);
        assert!(m.validate().is_err());
    }

    #[test]
    fn task_names_roundtrip() {
        for t in Task::ALL {
            assert_eq!(t.name().parse::<Task>().unwrap(), t);
            assert_eq!(serde_json::to_string(&t).unwrap(), format!("\"{}\"", t.name()));
        }
        assert!("X2I".parse::<Task>().is_err());
    }

    #[test]
    fn metric_mapping() {
        let cov: Vec<Task> = Task::ALL.into_iter().filter(|t| t.metric() == Metric::Coverage).collect();
        assert_eq!(cov, [Task::FA2I, Task::SA2I, Task::VC2I, Task::NA2I]);
    }
}

//! Query templates.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{Result, Split, Task, TaskgenError};
use crate::meta::ArtifactMeta;

const BUILTIN: &str = include_str!("../../data/templates.jsonl");

/// Templates per (task, split) in a complete pool.
pub const TEMPLATES_PER_SPLIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Template {
    pub id: String,
    pub task: Task,
    pub split: Split,
    pub pattern: String,
}

fn placeholder_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\{([A-Z_]+)\}").unwrap())
}

impl Template {
    pub fn placeholders(&self) -> BTreeSet<&str> {
        placeholder_re()
            .captures_iter(&self.pattern)
            .map(|c| c.get(1).unwrap().as_str())
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let err = |message: String| TaskgenError::Template {
            id: self.id.clone(),
            message,
        };
        if self.id.is_empty() {
            return Err(err("empty id".into()));
        }
        let found = self.placeholders();
        let want: BTreeSet<&str> = self.task.placeholders().iter().copied().collect();
        if found != want {
            return Err(err(format!(
                "{} needs placeholders {:?}, pattern has {:?}",
                self.task, want, found
            )));
        }
        Ok(())
    }

    /// Substitutes `{NAME}` placeholders.
    pub fn fill(&self, vars: &[(&str, &str)]) -> String {
        vars.iter().fold(self.pattern.clone(), |acc, (k, v)| {
            acc.replace(&format!("{{{k}}}"), v)
        })
    }
}

/// Validated template pool indexed by (task, split).
#[derive(Debug, Clone)]
pub struct TemplateSet {
    all: Vec<Template>,
    by_key: BTreeMap<(Task, Split), Vec<usize>>,
}

impl TemplateSet {
    pub fn new(templates: Vec<Template>) -> Result<Self> {
        let mut ids = BTreeSet::new();
        let mut patterns: BTreeMap<Task, BTreeMap<&str, Split>> = BTreeMap::new();
        let mut by_key: BTreeMap<(Task, Split), Vec<usize>> = BTreeMap::new();
        for (i, t) in templates.iter().enumerate() {
            t.validate()?;
            if !ids.insert(t.id.as_str()) {
                return Err(TaskgenError::Pool(format!("duplicate template id \"{}\"", t.id)));
            }
            if let Some(prev) = patterns.entry(t.task).or_default().insert(&t.pattern, t.split) {
                if prev != t.split {
                    return Err(TaskgenError::Pool(format!(
                        "template {} reuses a {prev} pattern in the {} split",
                        t.id, t.split
                    )));
                }
            }
            by_key.entry((t.task, t.split)).or_default().push(i);
        }
        Ok(Self { all: templates, by_key })
    }

    /// The shipped pool: 20 train and 20 test templates per task.
    pub fn builtin() -> Self {
        parse_templates(BUILTIN).expect("built-in templates are valid")
    }

    pub fn templates(&self) -> &[Template] {
        &self.all
    }

    pub fn get(&self, task: Task, split: Split) -> Vec<&Template> {
        self.by_key
            .get(&(task, split))
            .map(|ix| ix.iter().map(|&i| &self.all[i]).collect())
            .unwrap_or_default()
    }

    /// Every (task, split) has exactly [`TEMPLATES_PER_SPLIT`] templates.
    pub fn check_complete(&self) -> Result<()> {
        for task in Task::ALL {
            for split in [Split::Train, Split::Test] {
                let n = self.get(task, split).len();
                if n != TEMPLATES_PER_SPLIT {
                    return Err(TaskgenError::Pool(format!(
                        "{task}/{split} has {n} templates, expected {TEMPLATES_PER_SPLIT}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_jsonl(&self, meta: Option<&ArtifactMeta>) -> String {
        let mut out = String::new();
        if let Some(m) = meta {
            out.push_str(&m.to_line());
            out.push('\n');
        }
        for t in &self.all {
            out.push_str(&serde_json::to_string(t).expect("template serializes"));
            out.push('\n');
        }
        out
    }
}

pub fn parse_templates(text: &str) -> Result<TemplateSet> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || ArtifactMeta::from_line(line).is_some() {
            continue;
        }
        let t: Template = serde_json::from_str(line).map_err(|e| TaskgenError::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(t);
    }
    TemplateSet::new(out)
}

pub fn load_templates(path: &Path) -> Result<TemplateSet> {
    let text = std::fs::read_to_string(path).map_err(|source| TaskgenError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_templates(&text)
}

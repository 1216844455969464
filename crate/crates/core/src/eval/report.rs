use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::meta::ArtifactMeta;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskScore {
    pub task: String,
    pub metric: String,
    pub value: f64,
    pub samples: usize,
}

/// Per-task scores plus run metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Artifact header; set by the CLI when writing report files.
    #[serde(rename = "_meta", default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<ArtifactMeta>,
    pub model: String,
    pub model_fingerprint: String,
    pub trained_on: Option<String>,
    pub domain: String,
    pub ood: bool,
    pub ood_label: Option<String>,
    pub k: usize,
    pub dataset_hash: String,
    pub seed: Option<u64>,
    pub tasks: Vec<TaskScore>,
    /// Not written to report files, so reruns stay byte-identical.
    #[serde(skip)]
    pub wall_clock_secs: f64,
}

impl EvalReport {
    pub fn value(&self, task: &str) -> Option<f64> {
        self.tasks.iter().find(|t| t.task == task).map(|t| t.value)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Same scores and labels, ignoring timing.
    pub fn same_scores(&self, other: &EvalReport) -> bool {
        self.tasks == other.tasks
    }
}

pub fn write_report(path: &Path, report: &EvalReport) -> Result<(), EvalError> {
    std::fs::write(path, report.to_json()).map_err(|e| EvalError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_report(path: &Path) -> Result<EvalReport, EvalError> {
    let io = |message: String| EvalError::Io {
        path: path.display().to_string(),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(|e| io(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| io(format!("not a report: {e}")))
}

/// Markdown table with one column per (model, domain) and one row per
/// task. Two reports get an extra delta column.
pub fn comparison_table(reports: &[EvalReport]) -> String {
    let mut columns: Vec<String> = Vec::new();
    let mut cells: BTreeMap<(String, usize), f64> = BTreeMap::new();
    let mut rows: Vec<(String, String)> = Vec::new();
    for r in reports {
        let mut col = format!("{} on {}", r.model, r.domain);
        if r.ood {
            col.push_str(" (OOD)");
        }
        let ci = columns.iter().position(|c| *c == col).unwrap_or_else(|| {
            columns.push(col);
            columns.len() - 1
        });
        for t in &r.tasks {
            if !rows.iter().any(|(task, _)| *task == t.task) {
                rows.push((t.task.clone(), t.metric.clone()));
            }
            cells.insert((t.task.clone(), ci), t.value);
        }
    }
    let delta = columns.len() == 2;
    let mut out = String::from("| task | metric |");
    for c in &columns {
        out.push_str(&format!(" {c} |"));
    }
    if delta {
        out.push_str(" delta |");
    }
    out.push_str("\n|---|---|");
    out.push_str(&"---:|".repeat(columns.len() + delta as usize));
    out.push('\n');
    for (task, metric) in rows {
        out.push_str(&format!("| {task} | {metric} |"));
        for ci in 0..columns.len() {
            match cells.get(&(task.clone(), ci)) {
                Some(v) => out.push_str(&format!(" {v:.3} |")),
                None => out.push_str(" - |"),
            }
        }
        if delta {
            match (cells.get(&(task.clone(), 0)), cells.get(&(task.clone(), 1))) {
                (Some(a), Some(b)) => out.push_str(&format!(" {:+.3} |", b - a)),
                _ => out.push_str(" - |"),
            }
        }
        out.push('\n');
    }
    out
}

//! Whole-dataset generation and the dataset file format.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;

use super::generate::{generate_sample, GenContext};
use super::{MixConfig, QuerySample, Result, Split, Task, TaskgenError};
use crate::meta::ArtifactMeta;

/// Per-task sample counts by largest remainder, so they sum to `mix.total`
/// and each is within 1 of its exact share.
pub fn task_counts(mix: &MixConfig) -> Result<BTreeMap<Task, usize>> {
    mix.validate()?;
    let exact: Vec<(Task, f64)> = mix
        .proportions
        .iter()
        .map(|(&t, &p)| (t, p * mix.total as f64))
        .collect();
    let mut counts: BTreeMap<Task, usize> = exact.iter().map(|&(t, x)| (t, x.floor() as usize)).collect();
    let assigned: usize = counts.values().sum();
    let mut order: Vec<(Task, f64)> = exact.iter().map(|&(t, x)| (t, x - x.floor())).collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for (t, _) in order.into_iter().take(mix.total.saturating_sub(assigned)) {
        *counts.get_mut(&t).unwrap() += 1;
    }
    Ok(counts)
}

fn generate_split(ctx: &GenContext<'_>, split: Split, mix: &MixConfig, seed: u64) -> Result<Vec<QuerySample>> {
    let jobs: Vec<(Task, usize)> = task_counts(mix)?
        .into_iter()
        .flat_map(|(t, n)| (0..n).map(move |i| (t, i)))
        .collect();
    jobs.into_par_iter()
        .map(|(task, i)| generate_sample(ctx, task, split, i, seed))
        .collect()
}

/// Train and test sets. Samples are ordered by task, then by per-task index,
/// independent of thread scheduling.
pub fn generate_dataset(
    ctx: &GenContext<'_>,
    train_mix: &MixConfig,
    test_mix: &MixConfig,
    seed: u64,
) -> Result<(Vec<QuerySample>, Vec<QuerySample>)> {
    ctx.templates.check_complete()?;
    let train = generate_split(ctx, Split::Train, train_mix, seed)?;
    let test = generate_split(ctx, Split::Test, test_mix, seed)?;
    Ok((train, test))
}

pub fn dataset_to_jsonl(samples: &[QuerySample], meta: Option<&ArtifactMeta>) -> String {
    let mut out = String::new();
    if let Some(m) = meta {
        out.push_str(&m.to_line());
        out.push('\n');
    }
    for s in samples {
        out.push_str(&serde_json::to_string(s).expect("sample serializes"));
        out.push('\n');
    }
    out
}

pub fn write_dataset(path: &Path, samples: &[QuerySample], meta: Option<&ArtifactMeta>) -> Result<()> {
    std::fs::write(path, dataset_to_jsonl(samples, meta)).map_err(|source| TaskgenError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_dataset(text: &str) -> Result<(Option<ArtifactMeta>, Vec<QuerySample>)> {
    let mut meta = None;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if i == 0 {
            if let Some(m) = ArtifactMeta::from_line(line) {
                meta = Some(m);
                continue;
            }
        }
        let malformed = |message: String| TaskgenError::Malformed { line: i + 1, message };
        let s: QuerySample = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
        s.check().map_err(|m| malformed(format!("{}: {m}", s.sample_id)))?;
        out.push(s);
    }
    Ok((meta, out))
}

pub fn load_dataset(path: &Path) -> Result<(Option<ArtifactMeta>, Vec<QuerySample>)> {
    let text = std::fs::read_to_string(path).map_err(|source| TaskgenError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dataset(&text)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::catalog::synth_catalog;
    use crate::llm::GenBackend;
    use crate::taskgen::TemplateSet;

    #[test]
    fn default_counts_for_1200() {
        let c = task_counts(&MixConfig::default_for(1200)).unwrap();
        assert_eq!(c[&Task::UH2I], 400);
        assert_eq!(c[&Task::I2I], 200);
        for t in &Task::ALL[2..] {
            assert_eq!(c[t], 75);
        }
    }

    #[test]
    fn counts_sum_and_stay_within_one() {
        for total in [0, 1, 7, 10, 99, 400, 1001] {
            let mix = MixConfig::default_for(total);
            let c = task_counts(&mix).unwrap();
            assert_eq!(c.values().sum::<usize>(), total);
            for (t, n) in &c {
                let exact = mix.proportions[t] * total as f64;
                assert!((*n as f64 - exact).abs() < 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn dataset_is_deterministic_and_split_clean() {
        let (cat, log) = synth_catalog(42, 150, 100).unwrap();
        let tpl = TemplateSet::builtin();
        let backend = GenBackend::DeterministicFallback;
        let ctx = GenContext::new(&cat, &log, &tpl, &backend).unwrap();
        let (train, test) = generate_dataset(&ctx, &MixConfig::default_for(160), &MixConfig::default_for(60), 11).unwrap();
        assert_eq!(train.len(), 160);
        assert_eq!(test.len(), 60);
        let (train2, test2) = generate_dataset(&ctx, &MixConfig::default_for(160), &MixConfig::default_for(60), 11).unwrap();
        assert_eq!(dataset_to_jsonl(&train, None), dataset_to_jsonl(&train2, None));
        assert_eq!(dataset_to_jsonl(&test, None), dataset_to_jsonl(&test2, None));
        let train_tpl: BTreeSet<_> = train.iter().map(|s| &s.template_id).collect();
        assert!(test.iter().all(|s| !train_tpl.contains(&s.template_id)));

        let meta = ArtifactMeta::new("dataset").with_seed(11);
        let (m, back) = parse_dataset(&dataset_to_jsonl(&test, Some(&meta))).unwrap();
        assert_eq!(m.unwrap().seed, Some(11));
        assert_eq!(back, test);
    }

    #[test]
    fn malformed_sample_reports_line() {
        let err = parse_dataset("{\"sample_id\":1}\n").unwrap_err();
        assert!(matches!(err, TaskgenError::Malformed { line: 1, .. }));
    }
}

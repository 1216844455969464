//! Generate the ten query task families and print one sample of each.

use forge::catalog::synth_catalog;
use forge::llm::GenBackend;
use forge::taskgen::{generate_dataset, task_counts, GenContext, MixConfig, TemplateSet};

pub fn main() -> anyhow::Result<()> {
    let (catalog, log) = synth_catalog(42, 500, 300)?;
    let templates = TemplateSet::builtin();
    let backend = GenBackend::DeterministicFallback;
    let ctx = GenContext::new(&catalog, &log, &templates, &backend)?;

    let train_mix = MixConfig::default_for(1200);
    let (train, test) = generate_dataset(&ctx, &train_mix, &MixConfig::uniform(400), 42)?;
    println!("train {} samples, test {} samples", train.len(), test.len());
    for (task, n) in task_counts(&train_mix)? {
        print!("{task}={n} ");
    }
    println!();

    let mut seen = Vec::new();
    for s in &test {
        if seen.contains(&s.task) {
            continue;
        }
        seen.push(s.task);
        let first = catalog.get(&s.positives[0]).unwrap();
        println!("\n[{}] {}", s.task, s.query);
        println!("  template {}", s.template_id);
        println!("  {} positives, e.g. {}", s.positives.len(), first.title);
        if let Some(c) = &s.condition {
            println!("  condition {}", serde_json::to_string(c)?);
        }
        let negs: Vec<&str> = s.negatives.iter().map(|id| catalog.get(id).unwrap().title.as_str()).collect();
        println!("  negatives {}", negs.join(" | "));
    }
    Ok(())
}

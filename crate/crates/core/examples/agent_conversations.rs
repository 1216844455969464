//! Scripted recommender conversations: retrieval straight from the raw
//! transcript.

use forge::agent::{context_to_query, eval_conversations, synth_conversations, ContextMode};
use forge::catalog::synth_catalog;
use forge::encoder::{train, EncoderModel, TrainConfig};
use forge::llm::GenBackend;
use forge::taskgen::{generate_dataset, GenContext, MixConfig, TemplateSet};

pub fn main() -> anyhow::Result<()> {
    let (catalog, log) = synth_catalog(42, 500, 300)?;
    let backend = GenBackend::DeterministicFallback;
    let convs = synth_conversations(&catalog, &log, 50, 7, &backend)?;

    let c = &convs[0];
    println!("{}\n-> target {} ({})\n", context_to_query(c, ContextMode::Full), c.target, catalog.get(&c.target).unwrap().title);

    let templates = TemplateSet::builtin();
    let ctx = GenContext::new(&catalog, &log, &templates, &backend)?;
    let (train_set, _) = generate_dataset(&ctx, &MixConfig::default_for(1200), &MixConfig::uniform(400), 42)?;
    let init = EncoderModel::with_seed(42);
    let trained = train(&train_set, &catalog, &init, &TrainConfig { seed: 42, ..TrainConfig::default() })?.model;

    for mode in [ContextMode::Full, ContextMode::UserOnly] {
        let before = eval_conversations(&convs, &catalog, &init, 5, mode)?.tasks[0].value;
        let after = eval_conversations(&convs, &catalog, &trained, 5, mode)?.tasks[0].value;
        println!("{mode:?}: hit@5 untrained {before:.2}, trained {after:.2}");
    }
    Ok(())
}

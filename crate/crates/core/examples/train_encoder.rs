//! Train the hashed n-gram encoder on the default benchmark and compare it
//! with its seed initialization.
//!
//! ```text
//! cargo run --release -p forge --example train_encoder
//! ```

use std::time::Instant;

use forge::catalog::synth_catalog;
use forge::encoder::{model_to_bytes, train, EncoderModel, TrainConfig};
use forge::eval::{comparison_table, evaluate, EvalOptions};
use forge::llm::GenBackend;
use forge::taskgen::{generate_dataset, GenContext, MixConfig, TemplateSet};

pub fn main() -> anyhow::Result<()> {
    let (catalog, log) = synth_catalog(42, 500, 300)?;
    let templates = TemplateSet::builtin();
    let backend = GenBackend::DeterministicFallback;
    let ctx = GenContext::new(&catalog, &log, &templates, &backend)?;
    let (train_set, test_set) = generate_dataset(&ctx, &MixConfig::default_for(1200), &MixConfig::uniform(400), 42)?;

    let init = EncoderModel::with_seed(42);
    let cfg = TrainConfig {
        seed: 42,
        ..TrainConfig::default()
    };
    let started = Instant::now();
    let outcome = train(&train_set, &catalog, &init, &cfg)?;
    println!(
        "{} steps in {:.2}s, epoch losses {:?}",
        outcome.steps,
        started.elapsed().as_secs_f64(),
        outcome.epoch_losses.iter().map(|l| format!("{l:.3}")).collect::<Vec<_>>()
    );
    println!("model file {} bytes\n", model_to_bytes(&outcome.model, None).len());

    let opts = EvalOptions::default();
    let before = evaluate(&test_set, &catalog, &init, 5, &opts)?;
    let after = evaluate(&test_set, &catalog, &outcome.model, 5, &opts)?;
    print!("{}", comparison_table(&[before, after]));
    Ok(())
}

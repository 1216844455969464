//! Train on one synthetic store, test on a disjoint one.
//!
//! Behavioral tasks depend on the other store's users and do not carry
//! over; attribute tasks do.

use forge::catalog::{synth_catalog_with, Catalog, InteractionLog, SynthOptions};
use forge::encoder::{train, EncoderModel, TrainConfig};
use forge::eval::{comparison_table, evaluate, EvalOptions};
use forge::llm::GenBackend;
use forge::taskgen::{generate_dataset, GenContext, MixConfig, QuerySample, TemplateSet};

fn store(opts: &SynthOptions, seed: u64) -> anyhow::Result<(Catalog, InteractionLog, Vec<QuerySample>, Vec<QuerySample>)> {
    let (catalog, log) = synth_catalog_with(opts)?;
    let templates = TemplateSet::builtin();
    let backend = GenBackend::DeterministicFallback;
    let ctx = GenContext::new(&catalog, &log, &templates, &backend)?;
    let (tr, te) = generate_dataset(&ctx, &MixConfig::default_for(1200), &MixConfig::uniform(400), seed)?;
    Ok((catalog, log, tr, te))
}

pub fn main() -> anyhow::Result<()> {
    let (cat_a, _, train_a, _) = store(&SynthOptions::new(42, 500, 300), 42)?;
    let b_opts = SynthOptions::new(43, 500, 300).domain("store-b", "x").alternate_titles(true);
    let (cat_b, _, train_b, test_b) = store(&b_opts, 43)?;

    let init = EncoderModel::with_seed(42);
    let cfg = TrainConfig {
        seed: 42,
        ..TrainConfig::default()
    };
    let from_a = train(&train_a, &cat_a, &init, &cfg)?.model;
    let from_b = train(&train_b, &cat_b, &init, &cfg)?.model;

    let opts = EvalOptions::default();
    let reports = [
        evaluate(&test_b, &cat_b, &init, 5, &opts)?,
        evaluate(&test_b, &cat_b, &from_a, 5, &opts)?,
        evaluate(&test_b, &cat_b, &from_b, 5, &opts)?,
    ];
    print!("{}", comparison_table(&reports));
    let [untrained, ood, inside] = &reports;
    let v = |r: &forge::EvalReport, t: &str| r.value(t).unwrap();
    println!(
        "\nUH2I in-domain {:.3} > OOD {:.3}; NA2I OOD {:.3} > untrained {:.3}",
        v(inside, "UH2I"),
        v(ood, "UH2I"),
        v(ood, "NA2I"),
        v(untrained, "NA2I")
    );
    Ok(())
}

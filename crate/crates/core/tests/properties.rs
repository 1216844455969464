//! Cross-module invariants as property tests.

mod common;

use std::collections::BTreeSet;

use common::edit_distance;
use forge::agent::{context_to_query, ContextMode, Conversation, Turn};
use forge::catalog::{catalog_to_jsonl, parse_catalog, synth_catalog};
use forge::conditions::{mine_negatives, CmpOp, Condition};
use forge::encoder::{model_to_bytes, train, EncoderModel, TokenizerConfig, TrainConfig};
use forge::eval::coverage_at_k;
use forge::llm::{fallback_generate, summarize_item, GenBackend, GenRequest};
use forge::taskgen::{generate_dataset, misspell, GenContext, MixConfig, TemplateSet, NEGATIVES_PER_SAMPLE};
use proptest::prelude::*;

fn small_model(seed: u64) -> EncoderModel {
    let tok = TokenizerConfig {
        bucket_count: 4096,
        ..TokenizerConfig::default()
    };
    EncoderModel::seeded(tok, 16, 0.05, 0.1, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn catalog_roundtrips_and_synth_is_pure(seed in any::<u64>(), items in 10usize..60, users in 1usize..30) {
        let (c, _) = synth_catalog(seed, items, users).unwrap();
        let text = catalog_to_jsonl(&c, None);
        prop_assert_eq!(&parse_catalog(&text, &c.name).unwrap(), &c);
        let (again, _) = synth_catalog(seed, items, users).unwrap();
        prop_assert_eq!(catalog_to_jsonl(&again, None), text);
    }

    #[test]
    fn misspellings_stay_within_two_edits(cat_seed in 0u64..8, pick in any::<usize>(), seed in any::<u64>()) {
        let (c, _) = synth_catalog(cat_seed, 40, 5).unwrap();
        let title = &c.items()[pick % c.len()].title;
        let m = misspell(title, seed, &c).unwrap();
        let d = edit_distance(title, &m);
        prop_assert!((1..=2).contains(&d), "{} -> {} at distance {}", title, m, d);
        prop_assert!(c.items().iter().all(|it| it.title.to_lowercase() != m.to_lowercase()));
    }

    #[test]
    fn embeddings_are_unit_or_zero(text in "\\PC{0,80}", seed in 0u64..4) {
        let v = small_model(seed).embed(&text, 512);
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(n == 0.0 || (n - 1.0).abs() < 1e-6, "norm {}", n);
    }

    #[test]
    fn uniform_scaling_keeps_cosines(a in "[a-z ]{1,40}", b in "[a-z ]{1,40}", factor in 0.01f32..100.0) {
        let m = small_model(1);
        let s = m.scaled(factor);
        let cos = |m: &EncoderModel| {
            let (x, y) = (m.embed_query(&a), m.embed_query(&b));
            x.iter().zip(&y).map(|(p, q)| p * q).sum::<f64>()
        };
        prop_assert!((cos(&m) - cos(&s)).abs() < 1e-6);
    }

    #[test]
    fn coverage_is_a_fraction(ids in proptest::collection::vec(0usize..30, 0..12), k in 1usize..10, max_price in 0.0f64..80.0) {
        let (c, _) = synth_catalog(3, 30, 5).unwrap();
        let ranked: Vec<String> = ids.iter().map(|&i| c.items()[i].id.clone()).collect();
        let cond = Condition::num_cmp("price", CmpOp::Le, max_price);
        let v = coverage_at_k(&ranked, &cond, &c, k).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn negatives_avoid_positives_and_fail_the_condition(seed in any::<u64>(), genre in 0usize..4, excluded in proptest::collection::btree_set(0usize..60, 0..5)) {
        let (c, _) = synth_catalog(11, 60, 5).unwrap();
        let genres = c.category_vocabulary("genre");
        let cond = Condition::has_category("genre", &genres[genre % genres.len()]);
        let excluded: BTreeSet<String> = excluded.iter().map(|&i| c.items()[i].id.clone()).collect();
        if let Ok(negs) = mine_negatives(&c, &excluded, Some(&cond), 7, seed) {
            for n in &negs {
                prop_assert!(!excluded.contains(n));
                prop_assert!(!cond.eval(c.get(n).unwrap()));
            }
        }
    }

    #[test]
    fn fallback_is_referentially_transparent(body in "[ -~]{0,60}", seed in any::<u64>()) {
        let req = GenRequest::new(format!("SUMMARIZE_USER genres=puzzle {body}"), seed);
        prop_assert_eq!(fallback_generate(&req), fallback_generate(&req));
    }

    #[test]
    fn item_summaries_hide_the_title(pick in 0usize..50, seed in any::<u64>(), mask in 1u8..32) {
        let (c, _) = synth_catalog(4, 50, 5).unwrap();
        let item = &c.items()[pick];
        let fields: Vec<String> = item.fields.keys().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, f)| f.clone()).collect();
        prop_assume!(!fields.is_empty());
        let s = summarize_item(item, &fields, &GenBackend::DeterministicFallback, seed).unwrap();
        prop_assert!(!s.to_lowercase().contains(&item.title.to_lowercase()), "{}", s);
    }

    #[test]
    fn transcripts_map_to_distinct_queries(a in proptest::collection::vec("[a-z ]{0,12}", 1..4), b in proptest::collection::vec("[a-z ]{0,12}", 1..4)) {
        let conv = |texts: &[String]| Conversation {
            conv_id: "c".into(),
            turns: texts.iter().enumerate().map(|(i, t)| if i % 2 == 0 { Turn::user(t.clone()) } else { Turn::assistant(t.clone()) }).collect(),
            target: "g0001".into(),
            condition: None,
        };
        let (x, y) = (conv(&a), conv(&b));
        if x.turns != y.turns {
            prop_assert_ne!(context_to_query(&x, ContextMode::Full), context_to_query(&y, ContextMode::Full));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn samples_are_well_formed_and_generation_is_pure(seed in any::<u64>()) {
        let (c, log) = synth_catalog(9, 80, 60).unwrap();
        let templates = TemplateSet::builtin();
        let backend = GenBackend::DeterministicFallback;
        let ctx = GenContext::new(&c, &log, &templates, &backend).unwrap();
        let mix = MixConfig::default_for(120);
        let first = generate_dataset(&ctx, &mix, &MixConfig::uniform(40), seed).unwrap();
        for s in first.0.iter().chain(&first.1) {
            prop_assert_eq!(s.negatives.len(), NEGATIVES_PER_SAMPLE);
            prop_assert!(s.positives.iter().all(|p| !s.negatives.contains(p)));
            prop_assert!(s.positives.iter().chain(&s.negatives).all(|id| c.contains(id)));
        }
        prop_assert_eq!(&generate_dataset(&ctx, &mix, &MixConfig::uniform(40), seed).unwrap(), &first);
    }
}

#[test]
fn training_is_deterministic_across_thread_counts() {
    let (c, log) = synth_catalog(2, 60, 40).unwrap();
    let templates = TemplateSet::builtin();
    let backend = GenBackend::DeterministicFallback;
    let ctx = GenContext::new(&c, &log, &templates, &backend).unwrap();
    let (data, _) = generate_dataset(&ctx, &MixConfig::default_for(150), &MixConfig::uniform(10), 2).unwrap();
    let init = small_model(5);
    let serial = TrainConfig { seed: 3, ..TrainConfig::default() };
    let parallel = TrainConfig { deterministic: false, ..serial.clone() };
    let run = |cfg: &TrainConfig, threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| model_to_bytes(&train(&data, &c, &init, cfg).unwrap().model, None))
    };
    let reference = run(&serial, 1);
    assert_eq!(run(&serial, 1), reference);
    assert_eq!(run(&parallel, 1), reference);
    assert_eq!(run(&parallel, 4), reference);
    assert_ne!(reference, model_to_bytes(&init, None));
}

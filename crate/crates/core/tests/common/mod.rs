//! Shared benchmark setup and independent oracles for integration tests.
//!
//! The oracles deliberately avoid the crate's own evaluator: conditions are
//! re-evaluated from their JSON form against the item's JSON record, dates
//! are converted with a separate civil-calendar routine, and rankings come
//! from a full sort.

#![allow(dead_code)]

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use forge::catalog::{catalog_to_jsonl, synth_catalog_with, SynthOptions};
use forge::encoder::{train, EncoderModel, TrainConfig};
use forge::llm::GenBackend;
use forge::taskgen::{generate_dataset, GenContext, MixConfig, QuerySample, TemplateSet};
use forge::{Catalog, InteractionLog};
use serde_json::Value;

pub const SEED: u64 = 42;
pub const DOMAIN_B_SEED: u64 = 43;

pub struct Domain {
    pub catalog: Catalog,
    pub log: InteractionLog,
    pub train: Vec<QuerySample>,
    pub test: Vec<QuerySample>,
    pub generation_time: Duration,
}

pub struct Bench {
    pub a: Domain,
    pub init: EncoderModel,
    pub trained: EncoderModel,
    pub train_time: Duration,
}

pub fn domain(opts: &SynthOptions, dataset_seed: u64) -> Domain {
    let started = Instant::now();
    let (catalog, log) = synth_catalog_with(opts).unwrap();
    let templates = TemplateSet::builtin();
    let backend = GenBackend::DeterministicFallback;
    let ctx = GenContext::new(&catalog, &log, &templates, &backend).unwrap();
    let (train, test) = generate_dataset(&ctx, &MixConfig::default_for(1200), &MixConfig::uniform(400), dataset_seed).unwrap();
    Domain {
        catalog,
        log,
        train,
        test,
        generation_time: started.elapsed(),
    }
}

pub fn domain_a_options() -> SynthOptions {
    SynthOptions::new(SEED, 500, 300)
}

pub fn domain_b_options() -> SynthOptions {
    SynthOptions::new(DOMAIN_B_SEED, 500, 300)
        .domain("store-b", "x")
        .alternate_titles(true)
}

pub fn train_config() -> TrainConfig {
    TrainConfig {
        seed: SEED,
        ..TrainConfig::default()
    }
}

pub fn fit(data: &[QuerySample], catalog: &Catalog, init: &EncoderModel) -> EncoderModel {
    train(data, catalog, init, &train_config()).unwrap().model
}

/// The default benchmark, built once per test binary.
pub fn bench() -> &'static Bench {
    static BENCH: OnceLock<Bench> = OnceLock::new();
    BENCH.get_or_init(|| {
        let a = domain(&domain_a_options(), SEED);
        let init = EncoderModel::with_seed(SEED);
        let started = Instant::now();
        let trained = fit(&a.train, &a.catalog, &init);
        Bench {
            a,
            init,
            trained,
            train_time: started.elapsed(),
        }
    })
}

/// Catalog items as their JSON records, in catalog order.
pub fn item_records(catalog: &Catalog) -> Vec<Value> {
    catalog_to_jsonl(catalog, None)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

/// Days since 1970-01-01 for a proleptic Gregorian date.
pub fn civil_days(y: i64, m: i64, d: i64) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let mp = (m + 9) % 12;
    let doy = (153 * mp + 2) / 5 + d - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

fn date_days(s: &str) -> i64 {
    let parts: Vec<i64> = s.split('-').map(|p| p.parse().unwrap()).collect();
    civil_days(parts[0], parts[1], parts[2])
}

pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut table = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in table.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in table[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = table[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            table[i][j] = sub.min(table[i - 1][j] + 1).min(table[i][j - 1] + 1);
        }
    }
    table[a.len()][b.len()]
}

fn compare<T: PartialOrd>(op: &str, lhs: T, rhs: T) -> bool {
    match op {
        "<" => lhs < rhs,
        "<=" => lhs <= rhs,
        ">" => lhs > rhs,
        ">=" => lhs >= rhs,
        "=" => lhs == rhs,
        other => panic!("unknown operator {other}"),
    }
}

/// Evaluates a serialized condition against a serialized item.
pub fn oracle_matches(cond: &Value, item: &Value) -> bool {
    let field = |name: &Value| &item["fields"][name.as_str().unwrap()];
    match cond["node"].as_str().unwrap() {
        "all" => cond["children"].as_array().unwrap().iter().all(|c| oracle_matches(c, item)),
        "not" => !oracle_matches(&cond["child"], item),
        "has_category" => {
            let f = field(&cond["field"]);
            f["type"] == "categories" && f["value"].as_array().unwrap().iter().any(|v| *v == cond["value"])
        }
        "text_equals" => {
            let f = field(&cond["field"]);
            f["type"] == "text"
                && f["value"].as_str().unwrap().to_lowercase() == cond["value"].as_str().unwrap().to_lowercase()
        }
        "num_cmp" => {
            let f = field(&cond["field"]);
            f["type"] == "number"
                && compare(
                    cond["op"].as_str().unwrap(),
                    f["value"].as_f64().unwrap(),
                    cond["threshold"].as_f64().unwrap(),
                )
        }
        "date_cmp" => {
            let f = field(&cond["field"]);
            f["type"] == "date"
                && compare(
                    cond["op"].as_str().unwrap(),
                    date_days(f["value"].as_str().unwrap()),
                    cond["threshold"].as_i64().unwrap(),
                )
        }
        "fuzzy_title" => {
            let title = item["title"].as_str().unwrap().to_lowercase();
            let target = cond["target"].as_str().unwrap().to_lowercase();
            edit_distance(&title, &target) <= cond["max_distance"].as_u64().unwrap() as usize
        }
        other => panic!("unknown node {other}"),
    }
}

/// Catalog positions of the `k` best items by a full sort: score
/// descending, then id ascending.
pub fn oracle_topk(model: &EncoderModel, catalog: &Catalog, query: &str, k: usize) -> Vec<usize> {
    let q = model.embed_query(query);
    let mut scored: Vec<(usize, f64)> = catalog
        .items()
        .iter()
        .enumerate()
        .map(|(i, it)| {
            let v = model.embed_item(it);
            (i, v.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>() + 0.0)
        })
        .collect();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap()
            .then_with(|| catalog.items()[a.0].id.cmp(&catalog.items()[b.0].id))
    });
    scored.into_iter().take(k).map(|(i, _)| i).collect()
}

/// Prints one acceptance line and returns whether it passed.
pub fn verdict(id: u32, name: &str, pass: bool, detail: &str) -> bool {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id} {name}: {detail}");
    pass
}

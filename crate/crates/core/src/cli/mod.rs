//! The `forge` command line.
//!
//! One subcommand per pipeline stage. Each reads its inputs, checks they all
//! exist before doing any work, and writes artifacts that start with an
//! [`ArtifactMeta`] header. Values come from flags, then the `--config`
//! file, then built-in defaults.

mod config;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

pub use config::{EvalSection, LlmSection, MixSection, PathsConfig, RunConfig, SeedsConfig, SynthConfig, TrainSection};

use crate::agent::{eval_conversations, load_conversations, synth_conversations, write_conversations, ContextMode};
use crate::catalog::{
    load_catalog, load_interactions, resolve_catalog_path, resolve_interactions_path, synth_catalog_with,
    write_catalog, write_interactions, Catalog, SynthOptions,
};
use crate::encoder::{load_model, save_model, train, EncoderModel, TrainConfig};
use crate::eval::{comparison_table, evaluate, load_report, write_report, EvalOptions, EvalReport};
use crate::llm::{GenBackend, RemoteBackend, RemoteConfig};
use crate::meta::{sha256_file, sha256_hex, ArtifactMeta};
use crate::taskgen::{generate_dataset, load_dataset, load_templates, task_counts, write_dataset, GenContext, TemplateSet};

/// `--version` output: tool version plus on-disk format versions.
pub const VERSION_LINE: &str = concat!(env!("CARGO_PKG_VERSION"), " (model format 1, artifact header 1)");

#[derive(Debug, Parser)]
#[command(name = "forge", version = VERSION_LINE, about = "Item-retrieval alignment toolkit")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a catalog and interaction log.
    Synth(SynthArgs),
    /// Validate an existing catalog and interaction log.
    Ingest(IngestArgs),
    /// Generate train and test query datasets.
    Generate(GenerateArgs),
    /// Train the encoder on a dataset.
    Train(TrainArgs),
    /// Evaluate a model on a dataset.
    Eval(EvalArgs),
    /// Evaluate a model on recommender conversations.
    AgentEval(AgentEvalArgs),
    /// Merge reports into one comparison table.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LlmKind {
    Fallback,
    Remote,
}

#[derive(Debug, Args)]
pub struct LlmArgs {
    /// Text-generation backend.
    #[arg(long, value_enum)]
    pub llm: Option<LlmKind>,
    /// Remote base URL; requests go to `{endpoint}/chat/completions`.
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Remote model name.
    #[arg(long = "model", value_name = "NAME")]
    pub llm_model: Option<String>,
    /// Environment variable holding the bearer token.
    #[arg(long)]
    pub auth_env: Option<String>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub items: Option<usize>,
    #[arg(long)]
    pub users: Option<usize>,
    /// Output directory for catalog.jsonl and interactions.jsonl.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Catalog name recorded as the domain.
    #[arg(long)]
    pub domain: Option<String>,
    /// Item id prefix.
    #[arg(long)]
    pub id_prefix: Option<String>,
    /// Use the second title word list.
    #[arg(long)]
    pub alternate_titles: bool,
    /// Also write this many conversations to conversations.jsonl.
    #[arg(long, value_name = "N")]
    pub conversations: Option<usize>,
    #[arg(long)]
    pub conversation_seed: Option<u64>,
    #[command(flatten)]
    pub llm: LlmArgs,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    #[arg(long)]
    pub interactions: Option<PathBuf>,
    /// Write normalized copies with headers into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Catalog file, or a directory holding catalog.jsonl.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Defaults to interactions.jsonl next to the catalog.
    #[arg(long)]
    pub interactions: Option<PathBuf>,
    /// Template file; the built-in set when omitted.
    #[arg(long)]
    pub templates: Option<PathBuf>,
    /// Training samples.
    #[arg(long)]
    pub total: Option<usize>,
    /// Test samples.
    #[arg(long)]
    pub test_total: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output paths as `TRAIN,TEST`.
    #[arg(long, value_name = "TRAIN,TEST")]
    pub split_out: Option<String>,
    #[command(flatten)]
    pub llm: LlmArgs,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Model output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    /// Batch order seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Embedding table seed.
    #[arg(long)]
    pub init_seed: Option<u64>,
    #[arg(long)]
    pub init_std: Option<f32>,
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Report output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Marks the report out-of-domain under this name.
    #[arg(long)]
    pub ood_label: Option<String>,
    /// Model column name in comparison tables.
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args)]
pub struct AgentEvalArgs {
    #[arg(long)]
    pub conversations: Option<PathBuf>,
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Embed user turns only.
    #[arg(long)]
    pub user_only: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Report files to merge.
    #[arg(long = "in", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// Write the table here as well as to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Bad or missing arguments found after parsing; exits with status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Runs one command and returns the process exit status: 0 on success, 2 on
/// usage errors, 1 on runtime failures.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => match e.downcast_ref::<UsageError>() {
            Some(u) => {
                eprintln!("error: {u}\n\n{}", Cli::command().render_usage());
                2
            }
            None => {
                eprintln!("error: {e:#}");
                1
            }
        },
    }
}

pub fn execute(cli: Cli) -> anyhow::Result<()> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(anyhow::Error::msg)?,
        None => RunConfig::default(),
    };
    match cli.jobs {
        Some(0) => Err(usage("--jobs must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("starting worker pool")?
            .install(|| dispatch(cli.command, &cfg)),
        None => dispatch(cli.command, &cfg),
    }
}

fn dispatch(command: Command, cfg: &RunConfig) -> anyhow::Result<()> {
    match command {
        Command::Synth(a) => synth(a, cfg),
        Command::Ingest(a) => ingest(a, cfg),
        Command::Generate(a) => generate(a, cfg),
        Command::Train(a) => train_cmd(a, cfg),
        Command::Eval(a) => eval_cmd(a, cfg),
        Command::AgentEval(a) => agent_eval(a, cfg),
        Command::Report(a) => report(a),
    }
}

fn required(flag: Option<PathBuf>, file: &Option<PathBuf>, name: &str) -> anyhow::Result<PathBuf> {
    flag.or_else(|| file.clone())
        .ok_or_else(|| usage(format!("missing --{name} (or paths.{name} in the config file)")))
}

fn check_inputs(paths: &[&Path]) -> anyhow::Result<()> {
    for p in paths {
        if !p.exists() {
            bail!("input {} does not exist", p.display());
        }
    }
    Ok(())
}

fn digest(path: &Path) -> anyhow::Result<String> {
    sha256_file(path).with_context(|| format!("hashing {}", path.display()))
}

fn backend(args: &LlmArgs, cfg: &LlmSection) -> anyhow::Result<GenBackend> {
    let kind = match args.llm {
        Some(k) => k,
        None => LlmKind::from_str(&cfg.backend, true)
            .map_err(|_| usage(format!("llm.backend must be fallback or remote, got \"{}\"", cfg.backend)))?,
    };
    if kind == LlmKind::Fallback {
        return Ok(GenBackend::DeterministicFallback);
    }
    let endpoint = args
        .endpoint
        .as_ref()
        .or(cfg.endpoint.as_ref())
        .ok_or_else(|| usage("--llm remote needs --endpoint"))?;
    let model = args
        .llm_model
        .as_ref()
        .or(cfg.model.as_ref())
        .ok_or_else(|| usage("--llm remote needs --model"))?;
    let mut rc = RemoteConfig::new(endpoint, model);
    if let Some(env) = args.auth_env.as_ref().or(cfg.auth_env.as_ref()) {
        rc = rc.auth_env(env);
    }
    rc.max_in_flight = cfg.max_in_flight;
    Ok(GenBackend::Remote(RemoteBackend::new(rc)?))
}

fn synth(a: SynthArgs, cfg: &RunConfig) -> anyhow::Result<()> {
    let out = required(a.out.clone(), &cfg.paths.out, "out")?;
    let s = &cfg.synth;
    let seed = a.seed.unwrap_or(cfg.seeds.synth);
    let opts = SynthOptions::new(seed, a.items.unwrap_or(s.items), a.users.unwrap_or(s.users))
        .domain(
            a.domain.as_deref().unwrap_or(&s.domain),
            a.id_prefix.as_deref().unwrap_or(&s.id_prefix),
        )
        .alternate_titles(a.alternate_titles || s.alternate_titles);
    let n_convs = a.conversations.unwrap_or(s.conversations);
    let backend = if n_convs > 0 { Some(backend(&a.llm, &cfg.llm)?) } else { None };
    let (catalog, log) = synth_catalog_with(&opts)?;

    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let cat_path = out.join("catalog.jsonl");
    let cat_meta = ArtifactMeta::new("catalog")
        .with_seed(seed)
        .with_domain(&catalog.name)
        .with_extra("items", opts.n_items.into())
        .with_extra("users", opts.n_users.into())
        .with_extra("alternate_titles", opts.alternate_titles.into());
    write_catalog(&cat_path, &catalog, Some(&cat_meta)).with_context(|| format!("writing {}", cat_path.display()))?;
    let cat_hash = digest(&cat_path)?;

    let log_path = out.join("interactions.jsonl");
    let log_meta = ArtifactMeta::new("interactions")
        .with_seed(seed)
        .with_domain(&catalog.name)
        .with_input("catalog", cat_hash.clone());
    write_interactions(&log_path, &log, Some(&log_meta)).with_context(|| format!("writing {}", log_path.display()))?;
    println!(
        "wrote {} ({} items) and {} ({} users, {} events)",
        cat_path.display(),
        catalog.len(),
        log_path.display(),
        log.users.len(),
        log.event_count()
    );

    if let Some(backend) = backend {
        let cseed = a.conversation_seed.unwrap_or(cfg.seeds.conversations);
        let convs = synth_conversations(&catalog, &log, n_convs, cseed, &backend)?;
        let path = out.join("conversations.jsonl");
        let meta = ArtifactMeta::new("conversations")
            .with_seed(cseed)
            .with_domain(&catalog.name)
            .with_input("catalog", cat_hash)
            .with_input("interactions", digest(&log_path)?)
            .with_extra("llm", backend.label().into());
        write_conversations(&path, &convs, Some(&meta))?;
        println!("wrote {} ({} conversations)", path.display(), convs.len());
    }
    Ok(())
}

fn ingest(a: IngestArgs, cfg: &RunConfig) -> anyhow::Result<()> {
    let cat_in = resolve_catalog_path(&required(a.catalog, &cfg.paths.catalog, "catalog")?);
    let log_in = resolve_interactions_path(&required(a.interactions, &cfg.paths.interactions, "interactions")?);
    check_inputs(&[&cat_in, &log_in])?;
    let catalog = load_catalog(&cat_in)?;
    let log = load_interactions(&log_in, &catalog)?;
    println!("catalog \"{}\": {} items", catalog.name, catalog.len());
    for (field, kind) in field_kinds(&catalog) {
        println!("  {field}: {kind}");
    }
    println!(
        "interactions: {} users, {} events, {} with fewer than two events",
        log.users.len(),
        log.event_count(),
        log.sparse_users().len()
    );
    if let Some(out) = a.out {
        std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
        let cat_meta = ArtifactMeta::new("catalog")
            .with_domain(&catalog.name)
            .with_input("source", digest(&cat_in)?);
        let cat_path = out.join("catalog.jsonl");
        write_catalog(&cat_path, &catalog, Some(&cat_meta)).with_context(|| format!("writing {}", cat_path.display()))?;
        let log_meta = ArtifactMeta::new("interactions")
            .with_domain(&catalog.name)
            .with_input("catalog", digest(&cat_path)?)
            .with_input("source", digest(&log_in)?);
        let log_path = out.join("interactions.jsonl");
        write_interactions(&log_path, &log, Some(&log_meta)).with_context(|| format!("writing {}", log_path.display()))?;
        println!("wrote {} and {}", cat_path.display(), log_path.display());
    }
    Ok(())
}

fn field_kinds(catalog: &Catalog) -> BTreeMap<String, &'static str> {
    let mut out = BTreeMap::new();
    for it in catalog.items() {
        for (name, v) in &it.fields {
            out.entry(name.clone()).or_insert(v.type_tag());
        }
    }
    out
}

fn split_paths(flag: Option<String>, cfg: &PathsConfig) -> anyhow::Result<(PathBuf, PathBuf)> {
    match flag {
        Some(s) => match s.split_once(',') {
            Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.into(), b.into())),
            _ => Err(usage(format!("--split-out expects TRAIN,TEST, got \"{s}\""))),
        },
        None => match (&cfg.train, &cfg.test) {
            (Some(a), Some(b)) => Ok((a.clone(), b.clone())),
            _ => Err(usage("missing --split-out (or paths.train and paths.test in the config file)")),
        },
    }
}

fn generate(a: GenerateArgs, cfg: &RunConfig) -> anyhow::Result<()> {
    let cat_arg = required(a.catalog, &cfg.paths.catalog, "catalog")?;
    let cat_in = resolve_catalog_path(&cat_arg);
    let log_in = match a.interactions.or_else(|| cfg.paths.interactions.clone()) {
        Some(p) => resolve_interactions_path(&p),
        None => cat_in.with_file_name("interactions.jsonl"),
    };
    let tpl_in = a.templates.or_else(|| cfg.paths.templates.clone());
    let (train_out, test_out) = split_paths(a.split_out, &cfg.paths)?;
    let mut inputs = vec![cat_in.as_path(), log_in.as_path()];
    inputs.extend(tpl_in.as_deref());
    check_inputs(&inputs)?;
    let backend = backend(&a.llm, &cfg.llm)?;
    let seed = a.seed.unwrap_or(cfg.seeds.generate);
    let train_mix = cfg.mix.train_mix(a.total.unwrap_or(cfg.mix.train_total));
    let test_mix = cfg.mix.test_mix(a.test_total.unwrap_or(cfg.mix.test_total));
    train_mix.validate()?;
    test_mix.validate()?;

    let catalog = load_catalog(&cat_in)?;
    let log = load_interactions(&log_in, &catalog)?;
    let (templates, tpl_hash) = match &tpl_in {
        Some(p) => (load_templates(p)?, digest(p)?),
        None => {
            let t = TemplateSet::builtin();
            let h = sha256_hex(t.to_jsonl(None).as_bytes());
            (t, h)
        }
    };
    let ctx = GenContext::new(&catalog, &log, &templates, &backend)?;
    let (train_set, test_set) = generate_dataset(&ctx, &train_mix, &test_mix, seed)?;

    let base = ArtifactMeta::new("dataset")
        .with_seed(seed)
        .with_domain(&catalog.name)
        .with_input("catalog", digest(&cat_in)?)
        .with_input("interactions", digest(&log_in)?)
        .with_input("templates", tpl_hash)
        .with_extra("llm", backend.label().into());
    for (path, samples, split, mix) in [
        (&train_out, &train_set, "train", &train_mix),
        (&test_out, &test_set, "test", &test_mix),
    ] {
        let meta = base
            .clone()
            .with_extra("split", split.into())
            .with_extra("mix", serde_json::to_value(mix)?);
        write_dataset(path, samples, Some(&meta))?;
        let counts = task_counts(mix)?
            .into_iter()
            .map(|(t, n)| format!("{t}={n}"))
            .collect::<Vec<_>>()
            .join(" ");
        println!("wrote {} ({} samples: {counts})", path.display(), samples.len());
    }
    Ok(())
}

fn train_cmd(a: TrainArgs, cfg: &RunConfig) -> anyhow::Result<()> {
    let ds_in = required(a.dataset, &cfg.paths.dataset, "dataset")?;
    let cat_in = resolve_catalog_path(&required(a.catalog, &cfg.paths.catalog, "catalog")?);
    let out = required(a.out, &cfg.paths.model, "out")?;
    check_inputs(&[&ds_in, &cat_in])?;
    let t = &cfg.train;
    let train_cfg = TrainConfig {
        epochs: a.epochs.unwrap_or(t.epochs),
        batch_size: a.batch.unwrap_or(t.batch_size),
        learning_rate: a.lr.unwrap_or(t.learning_rate),
        warmup_fraction: t.warmup_fraction,
        seed: a.seed.unwrap_or(cfg.seeds.train),
        deterministic: true,
    };
    let init_seed = a.init_seed.unwrap_or(cfg.seeds.init);
    let init_std = a.init_std.unwrap_or(t.init_std);
    let init = EncoderModel::seeded(
        cfg.tokenizer.clone(),
        a.dim.unwrap_or(t.dim),
        t.temperature,
        init_std,
        init_seed,
    )?;

    let catalog = load_catalog(&cat_in)?;
    let (_, samples) = load_dataset(&ds_in)?;
    let outcome = train(&samples, &catalog, &init, &train_cfg)?;
    let meta = ArtifactMeta::new("model")
        .with_seed(train_cfg.seed)
        .with_domain(&catalog.name)
        .with_input("catalog", digest(&cat_in)?)
        .with_input("dataset", digest(&ds_in)?)
        .with_extra("init_seed", init_seed.into())
        .with_extra("init_std", f64::from(init_std).into())
        .with_extra("train", serde_json::to_value(&train_cfg)?)
        .with_extra("epoch_losses", serde_json::to_value(&outcome.epoch_losses)?);
    save_model(&out, &outcome.model, Some(&meta))?;
    for (i, l) in outcome.epoch_losses.iter().enumerate() {
        println!("epoch {}: loss {l:.4}", i + 1);
    }
    println!("wrote {} ({} steps)", out.display(), outcome.steps);
    Ok(())
}

fn report_meta(kind: &str, catalog: &Catalog, inputs: &[(&str, &Path)]) -> anyhow::Result<ArtifactMeta> {
    let mut meta = ArtifactMeta::new(kind).with_domain(&catalog.name);
    for (name, path) in inputs {
        meta = meta.with_input(name, digest(path)?);
    }
    Ok(meta)
}

fn finish_report(mut report: EvalReport, meta: ArtifactMeta, out: Option<PathBuf>) -> anyhow::Result<()> {
    report.meta = Some(match report.seed {
        Some(s) => meta.with_seed(s),
        None => meta,
    });
    print!("{}", comparison_table(std::slice::from_ref(&report)));
    if let Some(out) = out {
        write_report(&out, &report)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn eval_cmd(a: EvalArgs, cfg: &RunConfig) -> anyhow::Result<()> {
    let ds_in = required(a.dataset, &cfg.paths.dataset, "dataset")?;
    let cat_in = resolve_catalog_path(&required(a.catalog, &cfg.paths.catalog, "catalog")?);
    let model_in = required(a.model, &cfg.paths.model, "model")?;
    check_inputs(&[&ds_in, &cat_in, &model_in])?;
    let catalog = load_catalog(&cat_in)?;
    let (ds_meta, samples) = load_dataset(&ds_in)?;
    let (model, _) = load_model(&model_in)?;
    let opts = EvalOptions {
        model_label: a.label,
        ood_label: a.ood_label,
        seed: ds_meta.and_then(|m| m.seed),
    };
    let report = evaluate(&samples, &catalog, &model, a.k.unwrap_or(cfg.eval.k), &opts)?;
    let meta = report_meta(
        "report",
        &catalog,
        &[("catalog", &cat_in), ("dataset", &ds_in), ("model", &model_in)],
    )?;
    finish_report(report, meta, a.out.or_else(|| cfg.paths.report.clone()))
}

fn agent_eval(a: AgentEvalArgs, cfg: &RunConfig) -> anyhow::Result<()> {
    let conv_in = required(a.conversations, &cfg.paths.conversations, "conversations")?;
    let cat_in = resolve_catalog_path(&required(a.catalog, &cfg.paths.catalog, "catalog")?);
    let model_in = required(a.model, &cfg.paths.model, "model")?;
    check_inputs(&[&conv_in, &cat_in, &model_in])?;
    let catalog = load_catalog(&cat_in)?;
    let (conv_meta, convs) = load_conversations(&conv_in)?;
    let (model, _) = load_model(&model_in)?;
    let mode = if a.user_only { ContextMode::UserOnly } else { ContextMode::Full };
    let mut report = eval_conversations(&convs, &catalog, &model, a.k.unwrap_or(cfg.eval.k), mode)?;
    if let Some(label) = a.label {
        report.model = label;
    }
    report.seed = conv_meta.and_then(|m| m.seed);
    let meta = report_meta(
        "agent-report",
        &catalog,
        &[("catalog", &cat_in), ("conversations", &conv_in), ("model", &model_in)],
    )?
    .with_extra("context", (if a.user_only { "user-only" } else { "full" }).into());
    finish_report(report, meta, a.out.or_else(|| cfg.paths.report.clone()))
}

fn report(a: ReportArgs) -> anyhow::Result<()> {
    let inputs: Vec<&Path> = a.inputs.iter().map(PathBuf::as_path).collect();
    check_inputs(&inputs)?;
    let mut reports = Vec::new();
    let mut meta = ArtifactMeta::new("comparison");
    for (i, p) in a.inputs.iter().enumerate() {
        reports.push(load_report(p)?);
        meta = meta.with_input(&format!("report{}", i + 1), digest(p)?);
    }
    let table = comparison_table(&reports);
    print!("{table}");
    if let Some(out) = a.out {
        std::fs::write(&out, format!("<!-- {} -->\n{table}", meta.to_line()))
            .with_context(|| format!("writing {}", out.display()))?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

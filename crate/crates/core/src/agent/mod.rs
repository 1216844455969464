//! Recommender-agent conversations scored by retrieval from raw dialogue.
//!
//! A conversation is a short scripted exchange in which the user mentions
//! games they played and then asks for attributes of the game they want. The
//! whole transcript is embedded once and the target item must appear in the
//! top `k`.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, InteractionLog, Item};
use crate::conditions::{catalog_pool, Condition, SurfacePool};
use crate::encoder::EncoderModel;
use crate::eval::{build_index, hit_at_k, metric_name, EvalError, EvalReport, ItemIndex, TaskScore};
use crate::llm::{generate, GenBackend, GenRequest, LlmError};
use crate::meta::{sha256_hex, ArtifactMeta};
use crate::seed;
use crate::taskgen::{Metric, QuerySample, Split, Task};
use crate::text::join_list;

/// Task label used for conversation scores in reports.
pub const CONVERSATION_TASK: &str = "CONV";

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("conversation {0} has no user turn")]
    NoUserTurn(String),
    #[error("conversation {conv}: unknown target \"{target}\"")]
    UnknownTarget { conv: String, target: String },
    #[error("conversation {conv}: target does not satisfy its own condition")]
    TargetViolatesCondition { conv: String },
    #[error("no users with at least two events")]
    NoUsers,
    #[error("n must be at least 1")]
    ZeroConversations,
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Render(String),
}

pub type Result<T> = std::result::Result<T, AgentError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Assistant,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub role: Role,
    pub text: String,
}

impl Turn {
    pub fn user(text: impl Into<String>) -> Self {
        Self { role: Role::User, text: text.into() }
    }

    pub fn assistant(text: impl Into<String>) -> Self {
        Self {
            role: Role::Assistant,
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conversation {
    pub conv_id: String,
    pub turns: Vec<Turn>,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<Condition>,
}

/// Which turns go into the retrieval query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ContextMode {
    /// Every turn, as the raw transcript.
    #[default]
    Full,
    /// User turns only.
    UserOnly,
}

impl Conversation {
    pub fn validate(&self, catalog: &Catalog) -> Result<()> {
        if !self.turns.iter().any(|t| t.role == Role::User) {
            return Err(AgentError::NoUserTurn(self.conv_id.clone()));
        }
        let target = catalog.get(&self.target).ok_or_else(|| AgentError::UnknownTarget {
            conv: self.conv_id.clone(),
            target: self.target.clone(),
        })?;
        if let Some(c) = &self.condition {
            if !c.eval(target) {
                return Err(AgentError::TargetViolatesCondition {
                    conv: self.conv_id.clone(),
                });
            }
        }
        Ok(())
    }

    /// One-sample dataset view: the transcript as query, the target as the
    /// only positive, scored by Hit@K.
    pub fn to_sample(&self, mode: ContextMode) -> QuerySample {
        QuerySample {
            sample_id: self.conv_id.clone(),
            task: Task::UH2I,
            split: Split::Test,
            query: context_to_query(self, mode),
            positives: vec![self.target.clone()],
            negatives: Vec::new(),
            condition: None,
            template_id: "conversation".into(),
            seed: 0,
        }
    }
}

/// `"user: ...\nassistant: ..."`, turns in order.
pub fn context_to_query(conv: &Conversation, mode: ContextMode) -> String {
    conv.turns
        .iter()
        .filter(|t| mode == ContextMode::Full || t.role == Role::User)
        .map(|t| format!("{}: {}", t.role.name(), t.text))
        .collect::<Vec<_>>()
        .join("\n")
}

fn score(conv: &Conversation, index: &ItemIndex, model: &EncoderModel, k: usize, mode: ContextMode) -> Result<f64> {
    let ranked: Vec<String> = index
        .topk(&model.embed_query(&context_to_query(conv, mode)), k)
        .into_iter()
        .map(|(id, _)| id)
        .collect();
    Ok(hit_at_k(&ranked, std::slice::from_ref(&conv.target), k)?)
}

/// Mean Hit@K over conversations, one retrieval each.
pub fn eval_conversations(
    convs: &[Conversation],
    catalog: &Catalog,
    model: &EncoderModel,
    k: usize,
    mode: ContextMode,
) -> Result<EvalReport> {
    if k == 0 {
        return Err(EvalError::ZeroK.into());
    }
    if convs.is_empty() {
        return Err(EvalError::EmptyDataset.into());
    }
    for c in convs {
        c.validate(catalog)?;
    }
    let started = std::time::Instant::now();
    let index = build_index(catalog, model);
    let hits: Vec<f64> = convs
        .par_iter()
        .map(|c| score(c, &index, model, k, mode))
        .collect::<Result<_>>()?;
    let trained_on = model.trained_on.clone();
    let ood = trained_on.as_ref().is_some_and(|d| d != &catalog.name);
    Ok(EvalReport {
        meta: None,
        model: match &trained_on {
            Some(d) => format!("trained:{d}"),
            None => "untrained".into(),
        },
        model_fingerprint: model.fingerprint(),
        trained_on: trained_on.clone(),
        domain: catalog.name.clone(),
        ood,
        ood_label: ood.then(|| format!("{}->{}", trained_on.unwrap_or_default(), catalog.name)),
        k,
        dataset_hash: sha256_hex(conversations_to_jsonl(convs, None).as_bytes()),
        seed: None,
        tasks: vec![TaskScore {
            task: CONVERSATION_TASK.into(),
            metric: metric_name(Metric::Hit, k),
            value: hits.iter().sum::<f64>() / hits.len() as f64,
            samples: hits.len(),
        }],
        wall_clock_secs: started.elapsed().as_secs_f64(),
    })
}

const OPENERS: &[&str] = &[
    "Hi! I recently played {titles}.",
    "Hey, I've been playing {titles} lately.",
    "Lately I have been into {titles}.",
    "Hello. Some games I played recently: {titles}.",
];

const ASK_PREFS: &[&str] = &[
    "Great picks! What are you in the mood for next?",
    "Nice. What kind of game would you like to try now?",
    "Good taste. Tell me a bit more about what you want.",
];

const REQUESTS: &[&str] = &[
    "I'd like a {genre} game with {tags}.",
    "Something in the {genre} genre with {tags} would be perfect.",
    "Can you find me a {genre} game that has {tags}?",
    "Ideally a {genre} title featuring {tags}.",
];

const GENRE_ONLY: &[&str] = &["I'd like a {genre} game.", "Something in the {genre} genre, please."];

const SUGGESTIONS: &[&str] = &["How about {title}?", "You might like {title}.", "Have you tried {title}?"];

const REJECTIONS: &[&str] = &[
    "Not quite. {extra}",
    "I already know that one. {extra}",
    "Hmm, maybe something else. {extra}",
];

const EXTRAS: &[&str] = &["It should be {phrase}.", "Preferably {phrase}.", "I'd prefer {phrase}."];

/// Wishes per vague term, each readable after "It should be".
const WISHES: &[(&str, &[&str])] = &[
    ("recent", &["recent", "a recent release", "recently released"]),
    ("older", &["older", "an older classic", "old school"]),
    ("cheap", &["cheap", "budget priced", "affordable"]),
    ("expensive", &["a premium title", "premium priced", "one of the pricey ones"]),
];

fn fill(template: &str, key: &str, value: &str) -> String {
    template.replace(&format!("{{{key}}}"), value)
}

fn pick<'t>(rng: &mut seed::Rng, list: &[&'t str]) -> &'t str {
    list.choose(rng).expect("non-empty phrase list")
}

/// Request turn and its condition: the target's first genre plus one or two
/// of its tags (2d/3d excluded).
fn request(target: &Item, rng: &mut seed::Rng) -> Option<(String, Condition)> {
    let genre = target.categories("genre").first()?;
    let tags: Vec<&String> = target
        .categories("tags")
        .iter()
        .filter(|t| *t != "2d" && *t != "3d")
        .collect();
    let n = rng.random_range(1..=2).min(tags.len());
    let mut chosen: Vec<&String> = tags.choose_multiple(rng, n).copied().collect();
    chosen.sort();
    let mut children = vec![Condition::has_category("genre", genre)];
    children.extend(chosen.iter().map(|t| Condition::has_category("tags", t)));
    let text = if chosen.is_empty() {
        fill(pick(rng, GENRE_ONLY), "genre", genre)
    } else {
        fill(&fill(pick(rng, REQUESTS), "genre", genre), "tags", &join_list(&chosen))
    };
    Some((text, Condition::all(children)))
}

/// A vague price or date wish the target satisfies, if any.
fn wish(pool: &SurfacePool, target: &Item, rng: &mut seed::Rng) -> Option<(String, Condition)> {
    let fits: Vec<(&str, Condition)> = pool
        .vague_terms()
        .iter()
        .filter_map(|t| {
            let phrases = WISHES.iter().find(|(n, _)| *n == t.name)?.1;
            let c = t.condition(t.field.contains("date"));
            c.eval(target).then(|| (*phrases.choose(rng).expect("non-empty"), c))
        })
        .collect();
    let (phrase, c) = fits.choose(rng)?.clone();
    Some((fill(pick(rng, EXTRAS), "phrase", phrase), c))
}

fn paraphrase(backend: &GenBackend, text: String, seed: u64) -> Result<String> {
    if backend.is_fallback() {
        return Ok(text);
    }
    let req = GenRequest::new(
        format!("PARAPHRASE text={text}\nRewrite this chat message naturally. Keep every game attribute and title."),
        seed,
    );
    let out = generate(backend, &req)?;
    Ok(if out.trim().is_empty() { text } else { out.trim().to_string() })
}

/// Scripted dialogues whose target is each sampled user's last event.
///
/// The user names one or two earlier games, then asks for the target's genre
/// and tags; half the dialogues add an assistant suggestion that the user
/// turns down with a vague price or release-date wish.
pub fn synth_conversations(
    catalog: &Catalog,
    interactions: &InteractionLog,
    n: usize,
    seed: u64,
    backend: &GenBackend,
) -> Result<Vec<Conversation>> {
    if n == 0 {
        return Err(AgentError::ZeroConversations);
    }
    let users: Vec<_> = interactions
        .users
        .iter()
        .filter(|u| u.events.len() >= 2 && u.events.iter().all(|e| catalog.contains(&e.item_id)))
        .collect();
    if users.is_empty() {
        return Err(AgentError::NoUsers);
    }
    let pool = catalog_pool(catalog);
    let width = n.to_string().len().max(3);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = seed::rng(seed::derive(&[seed, seed::str_seed("conversation"), i as u64]));
        let user = users[rng.random_range(0..users.len())];
        let events = &user.events;
        let target = catalog.get(&events[events.len() - 1].item_id).expect("checked above");
        let earlier: Vec<&str> = events[..events.len() - 1]
            .iter()
            .rev()
            .take(2)
            .map(|e| catalog.get(&e.item_id).expect("checked above").title.as_str())
            .collect();
        let mention = rng.random_range(1..=earlier.len());
        let titles = join_list(&earlier[..mention]);

        let (ask, base) =
            request(target, &mut rng).ok_or_else(|| AgentError::Render(format!("item \"{}\" has no genre", target.id)))?;
        let mut turns = vec![
            Turn::user(paraphrase(backend, fill(pick(&mut rng, OPENERS), "titles", &titles), rng.random())?),
            Turn::assistant(pick(&mut rng, ASK_PREFS)),
            Turn::user(paraphrase(backend, ask, rng.random())?),
        ];
        let mut condition = base;
        if rng.random_bool(0.5) {
            let played: BTreeSet<&str> = user.item_ids().collect();
            let others: Vec<&Item> = catalog.items().iter().filter(|it| !played.contains(it.id.as_str())).collect();
            if let (Some((line, extra)), Some(other)) = (wish(&pool, target, &mut rng), others.choose(&mut rng)) {
                turns.push(Turn::assistant(fill(pick(&mut rng, SUGGESTIONS), "title", &other.title)));
                turns.push(Turn::user(paraphrase(
                    backend,
                    fill(pick(&mut rng, REJECTIONS), "extra", &line),
                    rng.random(),
                )?));
                if let Condition::All { children } = &mut condition {
                    children.push(extra);
                }
            }
        }
        let conv = Conversation {
            conv_id: format!("c{:0width$}", i + 1),
            turns,
            target: target.id.clone(),
            condition: Some(condition),
        };
        conv.validate(catalog)?;
        out.push(conv);
    }
    Ok(out)
}

pub fn conversations_to_jsonl(convs: &[Conversation], meta: Option<&ArtifactMeta>) -> String {
    let mut out = String::new();
    if let Some(m) = meta {
        out.push_str(&m.to_line());
        out.push('\n');
    }
    for c in convs {
        out.push_str(&serde_json::to_string(c).expect("conversation serializes"));
        out.push('\n');
    }
    out
}

pub fn parse_conversations(text: &str) -> Result<(Option<ArtifactMeta>, Vec<Conversation>)> {
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
        let c: Conversation = serde_json::from_str(line).map_err(|e| AgentError::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(c);
    }
    Ok((meta, out))
}

pub fn write_conversations(path: &Path, convs: &[Conversation], meta: Option<&ArtifactMeta>) -> Result<()> {
    std::fs::write(path, conversations_to_jsonl(convs, meta)).map_err(|source| AgentError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_conversations(path: &Path) -> Result<(Option<ArtifactMeta>, Vec<Conversation>)> {
    let text = std::fs::read_to_string(path).map_err(|source| AgentError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_conversations(&text)
}

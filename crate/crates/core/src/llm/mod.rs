//! Text generation for user summaries, attribute summaries and misspellings.
//!
//! Two backends: an OpenAI-compatible chat-completion endpoint, and a
//! deterministic rule engine keyed by a structured prompt header such as
//! `SUMMARIZE_USER genres=strategy,shooter`. The fallback is a pure function
//! of the request, which keeps every generated dataset reproducible.

mod fallback;
mod remote;

use std::collections::BTreeMap;

use crate::catalog::Item;

pub use fallback::fallback_generate;
pub use remote::{RemoteBackend, RemoteConfig, RetryPolicy};

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("{endpoint}: configuration error: {message}")]
    Config { endpoint: String, message: String },
    #[error("{endpoint}: network failure: {message}")]
    Network { endpoint: String, message: String },
    #[error("{endpoint}: HTTP status {status}: {body}")]
    Status {
        endpoint: String,
        status: u16,
        body: String,
    },
    #[error("{endpoint}: unusable response: {message}")]
    BadResponse { endpoint: String, message: String },
    #[error("invalid generation request: {0}")]
    InvalidRequest(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenRequest {
    pub prompt: String,
    pub max_tokens: u32,
    pub temperature: f64,
    pub seed: u64,
}

impl GenRequest {
    pub fn new(prompt: impl Into<String>, seed: u64) -> Self {
        Self {
            prompt: prompt.into(),
            max_tokens: 128,
            temperature: 0.0,
            seed,
        }
    }

    fn validate(&self) -> Result<(), LlmError> {
        if self.prompt.trim().is_empty() {
            return Err(LlmError::InvalidRequest("empty prompt".into()));
        }
        if self.max_tokens == 0 {
            return Err(LlmError::InvalidRequest("max_tokens must be at least 1".into()));
        }
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(LlmError::InvalidRequest("temperature must be >= 0".into()));
        }
        Ok(())
    }
}

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, Default)]
pub enum GenBackend {
    Remote(RemoteBackend),
    #[default]
    DeterministicFallback,
}

impl GenBackend {
    pub fn is_fallback(&self) -> bool {
        matches!(self, GenBackend::DeterministicFallback)
    }

    pub fn label(&self) -> String {
        match self {
            GenBackend::Remote(r) => format!("remote:{}", r.config().model),
            GenBackend::DeterministicFallback => "fallback".into(),
        }
    }
}

/// Runs one generation request against `backend`.
pub fn generate(backend: &GenBackend, req: &GenRequest) -> Result<String, LlmError> {
    req.validate()?;
    match backend {
        GenBackend::DeterministicFallback => Ok(fallback_generate(req)),
        GenBackend::Remote(r) => r.complete(req),
    }
}

/// Most frequent values of a categories field over `items`, ties broken by
/// first appearance.
fn top_values(items: &[&Item], field: &str, n: usize) -> Vec<String> {
    top_counts(items, field, n).into_iter().map(|(v, _)| v).collect()
}

fn top_counts(items: &[&Item], field: &str, n: usize) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let mut order = 0;
    for it in items {
        for v in it.categories(field) {
            let e = counts.entry(v.as_str()).or_insert((0, order));
            e.0 += 1;
            order += 1;
        }
    }
    let mut ranked: Vec<(&str, (usize, usize))> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1 .0.cmp(&a.1 .0).then(a.1 .1.cmp(&b.1 .1)));
    ranked.into_iter().take(n).map(|(v, (c, _))| (v.to_string(), c)).collect()
}

/// Structured prompt for [`summarize_user`].
pub fn user_summary_prompt(history: &[&Item]) -> String {
    // Repeated genres only, unless the history is spread evenly.
    let counted = top_counts(history, "genre", 3);
    let repeated = counted.iter().any(|(_, c)| *c >= 2);
    let genres: Vec<String> = counted
        .into_iter()
        .filter(|(_, c)| !repeated || *c >= 2)
        .map(|(g, _)| g)
        .collect();
    let tag_budget = 3;
    let tags: Vec<String> = top_values(history, "tags", 6)
        .into_iter()
        .filter(|t| t != "2d" && t != "3d")
        .take(tag_budget)
        .collect();
    let mut prompt = String::from("SUMMARIZE_USER");
    if !genres.is_empty() {
        prompt.push_str(&format!(" genres={}", genres.join(",")));
    }
    if !tags.is_empty() {
        prompt.push_str(&format!(" tags={}", tags.join(",")));
    }
    prompt.push_str(
        "\nWrite one to three sentences describing this player's taste in games. \
         Do not mention specific titles or identifiers.",
    );
    prompt
}

/// Short natural-language profile of a user from their history.
pub fn summarize_user(history: &[&Item], backend: &GenBackend, seed: u64) -> Result<String, LlmError> {
    if history.is_empty() {
        return Err(LlmError::InvalidRequest("empty history".into()));
    }
    let req = GenRequest::new(user_summary_prompt(history), seed);
    let out = generate(backend, &req)?;
    let leaks_id = history.iter().any(|it| contains_word(&out, &it.id));
    Ok(if leaks_id { fallback_generate(&req) } else { out })
}

/// Structured prompt for [`summarize_item`].
pub fn item_summary_prompt(item: &Item, chosen_fields: &[String]) -> String {
    let attrs: Vec<String> = chosen_fields
        .iter()
        .filter_map(|f| item.field(f).map(|v| format!("{f}:{}", v.render())))
        .collect();
    format!(
        "SUMMARIZE_ITEM attrs={}\nDescribe a game with these attributes in one casual sentence. \
         Keep every attribute value verbatim and do not name the game.",
        attrs.join(";")
    )
}

/// One-sentence description of `item` built from `chosen_fields`; never names the title.
pub fn summarize_item(
    item: &Item,
    chosen_fields: &[String],
    backend: &GenBackend,
    seed: u64,
) -> Result<String, LlmError> {
    if chosen_fields.is_empty() {
        return Err(LlmError::InvalidRequest("no fields chosen".into()));
    }
    if let Some(f) = chosen_fields.iter().find(|f| item.field(f).is_none()) {
        return Err(LlmError::InvalidRequest(format!(
            "item \"{}\" has no field \"{f}\"",
            item.id
        )));
    }
    let req = GenRequest::new(item_summary_prompt(item, chosen_fields), seed);
    let out = generate(backend, &req)?;
    let lower = out.to_lowercase();
    let bad = lower.contains(&item.title.to_lowercase()) || contains_word(&out, &item.id);
    Ok(if bad { fallback_generate(&req) } else { out })
}

fn contains_word(haystack: &str, word: &str) -> bool {
    haystack
        .split(|c: char| !c.is_alphanumeric())
        .any(|w| w == word)
}

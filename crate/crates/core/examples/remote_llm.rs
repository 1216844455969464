//! Text generation through an OpenAI-compatible endpoint, or the offline
//! fallback when none is configured.
//!
//! ```text
//! FORGE_LLM_ENDPOINT=http://localhost:8000/v1 FORGE_LLM_MODEL=my-model \
//! FORGE_LLM_TOKEN=... cargo run -p forge --example remote_llm
//! ```

use forge::catalog::synth_catalog;
use forge::llm::{summarize_item, summarize_user, user_summary_prompt, GenBackend, RemoteBackend, RemoteConfig};

pub fn main() -> anyhow::Result<()> {
    let backend = match (std::env::var("FORGE_LLM_ENDPOINT"), std::env::var("FORGE_LLM_MODEL")) {
        (Ok(endpoint), Ok(model)) => GenBackend::Remote(RemoteBackend::new(RemoteConfig::new(&endpoint, &model))?),
        _ => GenBackend::DeterministicFallback,
    };
    println!("backend: {}", backend.label());

    let (catalog, log) = synth_catalog(42, 500, 300)?;
    let history: Vec<_> = log.users[0].events.iter().map(|e| catalog.get(&e.item_id).unwrap()).collect();
    println!("\nprompt:\n{}\n", user_summary_prompt(&history));
    println!("user summary: {}", summarize_user(&history, &backend, 1)?);

    let item = &catalog.items()[0];
    let fields = vec!["genre".to_string(), "price".to_string()];
    println!("item summary for {}: {}", item.title, summarize_item(item, &fields, &backend, 1)?);
    Ok(())
}

//! Synthesize a catalog and interaction log, write them with headers, and
//! read them back.
//!
//! ```text
//! cargo run --release -p forge --example synth_catalog
//! ```

use forge::catalog::{load_catalog, load_interactions, synth_catalog, write_catalog, write_interactions};
use forge::meta::ArtifactMeta;

pub fn main() -> anyhow::Result<()> {
    let (catalog, log) = synth_catalog(42, 500, 300)?;
    println!("{} items, {} users, {} events", catalog.len(), log.users.len(), log.event_count());

    for item in &catalog.items()[..3] {
        println!("\n{} {}", item.id, item.title);
        for (name, value) in &item.fields {
            println!("  {name}: {}", value.render());
        }
        println!("  {}", item.description);
    }

    let user = &log.users[0];
    let played: Vec<&str> = user.events.iter().map(|e| catalog.get(&e.item_id).unwrap().title.as_str()).collect();
    println!("\n{} played {}", user.user_id, played.join(", "));

    let dir = tempfile::tempdir()?;
    let meta = ArtifactMeta::new("catalog").with_seed(42).with_domain(&catalog.name);
    write_catalog(&dir.path().join("catalog.jsonl"), &catalog, Some(&meta))?;
    write_interactions(&dir.path().join("interactions.jsonl"), &log, Some(&meta))?;

    // A directory path resolves to the files inside it.
    let reloaded = load_catalog(dir.path())?;
    let relog = load_interactions(dir.path(), &reloaded)?;
    assert_eq!(reloaded, catalog);
    assert_eq!(relog, log);
    println!("\nround trip through {} ok", dir.path().display());
    Ok(())
}

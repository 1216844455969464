//! Attribute predicates: evaluate against a catalog, render as text, and
//! mine true negatives.

use std::collections::BTreeSet;

use forge::catalog::{jan_first, synth_catalog};
use forge::conditions::{catalog_pool, mine_negatives, render, CmpOp, Condition};

pub fn main() -> anyhow::Result<()> {
    let (catalog, _) = synth_catalog(42, 500, 300)?;
    let pool = catalog_pool(&catalog);

    let cond = Condition::all(vec![
        Condition::has_category("genre", "strategy"),
        Condition::num_cmp("price", CmpOp::Le, 30.0),
        Condition::date_cmp("release date", CmpOp::Ge, jan_first(2018)),
        Condition::not(Condition::has_category("tags", "multiplayer")),
    ]);
    println!("{}", serde_json::to_string_pretty(&cond)?);
    for seed in 0..3 {
        println!("as text: {}", render(&cond, &pool, seed)?);
    }

    let matching: BTreeSet<String> = catalog
        .items()
        .iter()
        .filter(|it| cond.eval(it))
        .map(|it| it.id.clone())
        .collect();
    println!("\n{} of {} items satisfy it", matching.len(), catalog.len());
    for id in matching.iter().take(5) {
        let it = catalog.get(id).unwrap();
        println!("  {id} {} ({}, {})", it.title, it.fields["price"].render(), it.fields["release date"].render());
    }

    // Negatives come from outside the positive set and violate the condition.
    let negatives = mine_negatives(&catalog, &matching, Some(&cond), 7, 42)?;
    println!("\nnegatives:");
    for id in &negatives {
        let it = catalog.get(id).unwrap();
        assert!(!cond.eval(it));
        println!("  {id} {} [{}]", it.title, it.categories("genre").join(", "));
    }

    let typo = Condition::fuzzy_title(&catalog.items()[0].title.replace('a', "e"), 2);
    let hits: Vec<&str> = catalog.items().iter().filter(|it| typo.eval(it)).map(|it| it.title.as_str()).collect();
    println!("\nfuzzy title match: {hits:?}");
    Ok(())
}

//! Exact top-k retrieval and the two metrics, computed by hand for one
//! query and then by the evaluator for a whole dataset.

use forge::catalog::synth_catalog;
use forge::conditions::{CmpOp, Condition};
use forge::encoder::EncoderModel;
use forge::eval::{build_index, coverage_at_k, hit_at_k};

pub fn main() -> anyhow::Result<()> {
    let (catalog, _) = synth_catalog(42, 500, 300)?;
    let model = EncoderModel::with_seed(42);
    let index = build_index(&catalog, &model);

    let query = "a cheap puzzle game with a relaxing mood";
    let top = index.topk(&model.embed_query(query), 5);
    println!("query: {query}");
    for (rank, (id, score)) in top.iter().enumerate() {
        let it = catalog.get(id).unwrap();
        println!(
            "  {}. {score:.3} {} [{}] {}",
            rank + 1,
            it.title,
            it.categories("genre").join(", "),
            it.fields["price"].render()
        );
    }

    let ranked: Vec<String> = top.into_iter().map(|(id, _)| id).collect();
    let cheap_puzzle = Condition::all(vec![
        Condition::has_category("genre", "puzzle"),
        Condition::num_cmp("price", CmpOp::Lt, 20.0),
    ]);
    println!("coverage@5 = {:.2}", coverage_at_k(&ranked, &cheap_puzzle, &catalog, 5)?);

    let wanted: Vec<String> = catalog
        .items()
        .iter()
        .filter(|it| cheap_puzzle.eval(it))
        .map(|it| it.id.clone())
        .collect();
    for k in [1, 3, 5] {
        println!("hit@{k} = {}", hit_at_k(&ranked, &wanted, k)?);
    }

    // Uniformly scaling the table leaves the ranking unchanged.
    let scaled = model.scaled(3.7);
    let again: Vec<String> = build_index(&catalog, &scaled)
        .topk(&scaled.embed_query(query), 5)
        .into_iter()
        .map(|(id, _)| id)
        .collect();
    assert_eq!(again, ranked);
    println!("same top 5 after scaling the table by 3.7");
    Ok(())
}

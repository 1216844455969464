use std::collections::BTreeSet;

use super::{Condition, ConditionError};
use crate::catalog::Catalog;
use crate::seed;

/// Samples `k` distinct true negatives uniformly from the eligible pool.
///
/// `excluded` holds the positives plus anything else known to be relevant
/// (for behaviour tasks, the owning user's whole history). When `cond` is
/// given, only items that fail it are eligible, so no returned id can be a
/// false negative.
pub fn mine_negatives(
    catalog: &Catalog,
    excluded: &BTreeSet<String>,
    cond: Option<&Condition>,
    k: usize,
    seed: u64,
) -> Result<Vec<String>, ConditionError> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let pool: Vec<&str> = catalog
        .items()
        .iter()
        .filter(|it| !excluded.contains(&it.id))
        .filter(|it| cond.is_none_or(|c| !c.eval(it)))
        .map(|it| it.id.as_str())
        .collect();
    if pool.len() < k {
        return Err(ConditionError::InsufficientNegatives {
            needed: k,
            available: pool.len(),
        });
    }
    let mut rng = seed::rng(seed);
    Ok(rand::seq::index::sample(&mut rng, pool.len(), k)
        .into_iter()
        .map(|i| pool[i].to_string())
        .collect())
}

use rayon::prelude::*;

use crate::catalog::Catalog;
use crate::encoder::EncoderModel;

/// Brute-force cosine index over every catalog item.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemIndex {
    pub ids: Vec<String>,
    pub dim: usize,
    /// Row-major `ids.len() x dim`, unit rows (zero for empty item text).
    pub matrix: Vec<f64>,
    pub model_fingerprint: String,
    /// Items whose text produced no tokens.
    pub degenerate: Vec<String>,
}

/// Embeds every item with the same text used in training.
pub fn build_index(catalog: &Catalog, model: &EncoderModel) -> ItemIndex {
    let rows: Vec<Vec<f64>> = catalog.items().par_iter().map(|it| model.embed_item(it)).collect();
    let degenerate = catalog
        .items()
        .iter()
        .zip(&rows)
        .filter(|(_, r)| r.iter().all(|x| *x == 0.0))
        .map(|(it, _)| it.id.clone())
        .collect();
    ItemIndex {
        ids: catalog.items().iter().map(|it| it.id.clone()).collect(),
        dim: model.dim,
        matrix: rows.concat(),
        model_fingerprint: model.fingerprint(),
        degenerate,
    }
}

impl ItemIndex {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.matrix[i * self.dim..(i + 1) * self.dim]
    }

    /// Exact top-`k` by dot product; ties go to the smaller id.
    pub fn topk(&self, query: &[f64], k: usize) -> Vec<(String, f64)> {
        let mut scored: Vec<(usize, f64)> = (0..self.len())
            // Adding +0.0 folds -0.0 into +0.0 so signed zeros tie.
            .map(|i| (i, self.row(i).iter().zip(query).map(|(a, b)| a * b).sum::<f64>() + 0.0))
            .collect();
        let by = |a: &(usize, f64), b: &(usize, f64)| b.1.total_cmp(&a.1).then_with(|| self.ids[a.0].cmp(&self.ids[b.0]));
        let k = k.min(scored.len());
        if k == 0 {
            return Vec::new();
        }
        if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, by);
            scored.truncate(k);
        }
        scored.sort_by(by);
        scored.into_iter().map(|(i, s)| (self.ids[i].clone(), s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn index(rows: Vec<Vec<f64>>, ids: Vec<&str>) -> ItemIndex {
        ItemIndex {
            ids: ids.into_iter().map(String::from).collect(),
            dim: rows[0].len(),
            matrix: rows.concat(),
            model_fingerprint: String::new(),
            degenerate: Vec::new(),
        }
    }

    #[test]
    fn identity_query_ranks_first() {
        let ix = index(vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, -1.0]], vec!["b", "a", "c"]);
        let top = ix.topk(&[1.0, 0.0], 3);
        assert_eq!(top[0].0, "a");
        assert!((top[0].1 - 1.0).abs() < 1e-12);
        assert_eq!(top.len(), 3);
    }

    #[test]
    fn ties_by_id() {
        let ix = index(vec![vec![1.0]; 3], vec!["z", "m", "a"]);
        let ids: Vec<String> = ix.topk(&[1.0], 3).into_iter().map(|(i, _)| i).collect();
        assert_eq!(ids, ["a", "m", "z"]);
        assert_eq!(ix.topk(&[1.0], 10).len(), 3);
        assert_eq!(ix.topk(&[1.0], 1)[0].0, "a");
    }

    proptest! {
        #[test]
        fn topk_matches_full_sort(
            rows in proptest::collection::vec(proptest::collection::vec(-3i32..3, 3), 1..40),
            q in proptest::collection::vec(-3i32..3, 3),
            k in 1usize..50,
        ) {
            // Small integers force plenty of exact ties.
            let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
            let ids: Vec<String> = (0..rows.len()).map(|i| format!("i{:03}", (i * 7919) % 1000)).collect();
            let mut uniq = ids.clone();
            uniq.sort();
            uniq.dedup();
            prop_assume!(uniq.len() == ids.len());
            let q: Vec<f64> = q.iter().map(|&x| x as f64).collect();
            let ix = ItemIndex {
                ids: ids.clone(),
                dim: 3,
                matrix: rows.concat(),
                model_fingerprint: String::new(),
                degenerate: Vec::new(),
            };
            let mut oracle: Vec<(String, f64)> = rows
                .iter()
                .zip(&ids)
                .map(|(r, id)| (id.clone(), r.iter().zip(&q).map(|(a, b)| a * b).sum()))
                .collect();
            oracle.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
            oracle.truncate(k);
            prop_assert_eq!(ix.topk(&q, k), oracle);
        }
    }
}

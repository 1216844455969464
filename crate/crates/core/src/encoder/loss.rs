//! InfoNCE over cosine similarities with exact gradients.

use super::EncoderError;

/// Loss and its gradient with respect to every (unnormalized) input vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LossGrad {
    pub loss: f64,
    pub d_query: Vec<f64>,
    pub d_pos: Vec<f64>,
    pub d_negs: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `-log softmax(s / tau)[0]` where `s[0] = cos(query, pos)` and
/// `s[i] = cos(query, neg_i)`.
pub fn info_nce_loss(query: &[f64], pos: &[f64], negs: &[&[f64]], tau: f64) -> Result<LossGrad, EncoderError> {
    if tau.is_nan() || tau <= 0.0 {
        return Err(EncoderError::Invalid(format!("temperature must be positive, got {tau}")));
    }
    let dim = query.len();
    let cands: Vec<&[f64]> = std::iter::once(pos).chain(negs.iter().copied()).collect();
    if cands.iter().any(|c| c.len() != dim) {
        return Err(EncoderError::Invalid("vectors differ in dimension".into()));
    }
    let qn = norm(query);
    let norms: Vec<f64> = cands.iter().map(|c| norm(c)).collect();
    if qn == 0.0 || norms.contains(&0.0) {
        return Err(EncoderError::ZeroNorm);
    }
    let cos: Vec<f64> = cands
        .iter()
        .zip(&norms)
        .map(|(c, n)| dot(query, c) / (qn * n))
        .collect();
    let logits: Vec<f64> = cos.iter().map(|s| s / tau).collect();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    // With the positive on top, ln_1p keeps precision for losses near zero.
    let loss = if logits[0] == max {
        (z - exps[0]).ln_1p()
    } else {
        z.ln() + max - logits[0]
    };

    let mut d_query = vec![0.0; dim];
    let mut d_cands = Vec::with_capacity(cands.len());
    for (i, c) in cands.iter().enumerate() {
        let g = (exps[i] / z - if i == 0 { 1.0 } else { 0.0 }) / tau;
        let (n, s) = (norms[i], cos[i]);
        for k in 0..dim {
            d_query[k] += g * (c[k] / (qn * n) - s * query[k] / (qn * qn));
        }
        d_cands.push((0..dim).map(|k| g * (query[k] / (qn * n) - s * c[k] / (n * n))).collect::<Vec<f64>>());
    }
    let d_pos = d_cands.remove(0);
    Ok(LossGrad {
        loss,
        d_query,
        d_pos,
        d_negs: d_cands,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn symmetric_scores_give_ln8() {
        let q = [1.0, 0.0, 0.0];
        let c = [0.0, 1.0, 0.0];
        let negs: Vec<&[f64]> = vec![&c; 7];
        let r = info_nce_loss(&q, &c, &negs, 0.05).unwrap();
        assert!((r.loss - 8f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn saturated_positive() {
        let q = [1.0, 0.0];
        let p = [1.0, 0.0];
        let n = [-1.0, 0.0];
        let negs: Vec<&[f64]> = vec![&n; 7];
        let r = info_nce_loss(&q, &p, &negs, 0.05).unwrap();
        assert!(r.loss < 1e-12 && r.loss >= 0.0);
    }

    #[test]
    fn zero_vector_rejected() {
        let z = [0.0, 0.0];
        let p = [1.0, 0.0];
        let negs: Vec<&[f64]> = vec![&p; 7];
        assert!(matches!(info_nce_loss(&z, &p, &negs, 0.05), Err(EncoderError::ZeroNorm)));
        assert!(info_nce_loss(&p, &p, &negs, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn loss_is_nonnegative(v in proptest::collection::vec(-1.0f64..1.0, 45)) {
            let v: Vec<f64> = v.iter().map(|x| x + 1e-3).collect();
            let chunks: Vec<&[f64]> = v.chunks(5).collect();
            let r = info_nce_loss(chunks[0], chunks[1], &chunks[2..], 0.05).unwrap();
            prop_assert!(r.loss >= 0.0 && r.loss.is_finite());
        }
    }
}

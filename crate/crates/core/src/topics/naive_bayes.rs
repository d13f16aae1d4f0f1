//! Multinomial Naive Bayes with add-one smoothing, emitted in the shared
//! linear weight layout (log-likelihoods, then log-prior as bias).

use super::maxent::SparseDoc;

pub fn fit(docs: &[SparseDoc], labels: usize, vocab: usize) -> Vec<Vec<f64>> {
    let mut counts = vec![vec![0.0f64; vocab]; labels];
    let mut docs_per_label = vec![0usize; labels];
    for d in docs {
        docs_per_label[d.label] += 1;
        for (j, x) in &d.features {
            counts[d.label][*j] += x;
        }
    }
    let n = docs.len().max(1) as f64;
    counts
        .into_iter()
        .zip(docs_per_label)
        .map(|(row, nd)| {
            let total: f64 = row.iter().sum::<f64>() + vocab as f64;
            let mut out: Vec<f64> = row.iter().map(|c| ((c + 1.0) / total).ln()).collect();
            // Labels without training documents get a vanishing prior.
            let prior = if nd == 0 { f64::MIN_POSITIVE } else { nd as f64 / n };
            out.push(prior.ln());
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_one_smoothing_by_hand() {
        // label 0: token 0 twice; label 1: token 1 once
        let docs = vec![
            SparseDoc { features: vec![(0, 2.0)], label: 0 },
            SparseDoc { features: vec![(1, 1.0)], label: 1 },
        ];
        let w = fit(&docs, 2, 2);
        assert!((w[0][0] - (3.0f64 / 4.0).ln()).abs() < 1e-12);
        assert!((w[0][1] - (1.0f64 / 4.0).ln()).abs() < 1e-12);
        assert!((w[1][1] - (2.0f64 / 3.0).ln()).abs() < 1e-12);
        assert!((w[0][2] - 0.5f64.ln()).abs() < 1e-12);
    }
}

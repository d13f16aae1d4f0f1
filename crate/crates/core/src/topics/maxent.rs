//! L2-regularized multinomial logistic regression (maximum entropy),
//! trained by full-batch gradient descent.
//!
//! Weights are a flat row-major `labels × (vocab + 1)` table; the last
//! column of each row is the bias, which is not regularized.
//!
//! Objective:
//!
//! ```text
//! J(W) = (1/N) Σ_i [ log Σ_l exp(s_il) − s_i,y_i ] + (λ/2) Σ_l Σ_{v<V} W_lv²
//! s_il = Σ_v x_iv W_lv + W_l,bias
//! ```

use super::model::softmax;

/// Bag-of-words document with a label index.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDoc {
    pub features: Vec<(usize, f64)>,
    pub label: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxEntParams {
    pub l2: f64,
    pub learning_rate: f64,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
}

impl Default for MaxEntParams {
    fn default() -> Self {
        MaxEntParams {
            l2: 0.1,
            learning_rate: 0.1,
            max_iterations: 500,
            gradient_tolerance: 1e-6,
        }
    }
}

pub struct Objective<'a> {
    docs: &'a [SparseDoc],
    labels: usize,
    vocab: usize,
    l2: f64,
}

impl<'a> Objective<'a> {
    pub fn new(docs: &'a [SparseDoc], labels: usize, vocab: usize, l2: f64) -> Self {
        Objective {
            docs,
            labels,
            vocab,
            l2,
        }
    }

    pub fn dimension(&self) -> usize {
        self.labels * (self.vocab + 1)
    }

    fn scores(&self, w: &[f64], doc: &SparseDoc) -> Vec<f64> {
        let cols = self.vocab + 1;
        (0..self.labels)
            .map(|l| {
                let row = &w[l * cols..(l + 1) * cols];
                row[self.vocab] + doc.features.iter().map(|(j, x)| row[*j] * x).sum::<f64>()
            })
            .collect()
    }

    fn penalty(&self, w: &[f64]) -> f64 {
        let cols = self.vocab + 1;
        let sq: f64 = (0..self.labels)
            .flat_map(|l| &w[l * cols..l * cols + self.vocab])
            .map(|v| v * v)
            .sum();
        0.5 * self.l2 * sq
    }

    pub fn loss(&self, w: &[f64]) -> f64 {
        assert_eq!(w.len(), self.dimension());
        let n = self.docs.len().max(1) as f64;
        let nll: f64 = self
            .docs
            .iter()
            .map(|d| {
                let s = self.scores(w, d);
                let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lse = max + s.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
                lse - s[d.label]
            })
            .sum();
        nll / n + self.penalty(w)
    }

    pub fn gradient(&self, w: &[f64]) -> Vec<f64> {
        assert_eq!(w.len(), self.dimension());
        let cols = self.vocab + 1;
        let n = self.docs.len().max(1) as f64;
        let mut g = vec![0.0; w.len()];
        for d in self.docs {
            let p = softmax(&self.scores(w, d));
            for (l, pl) in p.iter().enumerate() {
                let resid = pl - if l == d.label { 1.0 } else { 0.0 };
                let row = &mut g[l * cols..(l + 1) * cols];
                for (j, x) in &d.features {
                    row[*j] += resid * x;
                }
                row[self.vocab] += resid;
            }
        }
        for l in 0..self.labels {
            for j in 0..cols {
                let k = l * cols + j;
                g[k] /= n;
                if j < self.vocab {
                    g[k] += self.l2 * w[k];
                }
            }
        }
        g
    }
}

/// Gradient descent from zero weights. Returns the weights and the number
/// of iterations performed.
pub fn fit(docs: &[SparseDoc], labels: usize, vocab: usize, params: &MaxEntParams) -> (Vec<f64>, usize) {
    let obj = Objective::new(docs, labels, vocab, params.l2);
    let mut w = vec![0.0; obj.dimension()];
    for it in 0..params.max_iterations {
        let g = obj.gradient(&w);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < params.gradient_tolerance {
            return (w, it);
        }
        for (wi, gi) in w.iter_mut().zip(&g) {
            *wi -= params.learning_rate * gi;
        }
    }
    (w, params.max_iterations)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs() -> Vec<SparseDoc> {
        vec![
            SparseDoc { features: vec![(0, 2.0)], label: 0 },
            SparseDoc { features: vec![(1, 1.0), (2, 1.0)], label: 1 },
            SparseDoc { features: vec![(0, 1.0), (2, 1.0)], label: 0 },
        ]
    }

    #[test]
    fn loss_decreases_under_training() {
        let d = docs();
        let obj = Objective::new(&d, 2, 3, 0.1);
        let start = obj.loss(&vec![0.0; obj.dimension()]);
        assert!((start - 2f64.ln()).abs() < 1e-12);
        let (w, _) = fit(&d, 2, 3, &MaxEntParams::default());
        assert!(obj.loss(&w) < start);
    }

    #[test]
    fn bias_is_not_regularized() {
        let d: Vec<SparseDoc> = Vec::new();
        let obj = Objective::new(&d, 2, 1, 1.0);
        let w = vec![1.0, 5.0, 2.0, 7.0];
        let g = obj.gradient(&w);
        assert_eq!(g, vec![1.0, 0.0, 2.0, 0.0]);
    }
}

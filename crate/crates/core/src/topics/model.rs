use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::TopicError;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Algorithm {
    MaxEntropy,
    NaiveBayes,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::MaxEntropy => "MAX_ENTROPY",
            Algorithm::NaiveBayes => "NAIVE_BAYES",
        })
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "maxent" | "max_entropy" | "maxentropy" => Ok(Algorithm::MaxEntropy),
            "nb" | "naive_bayes" | "naivebayes" => Ok(Algorithm::NaiveBayes),
            other => Err(format!("unknown algorithm `{other}` (expected maxent or nb)")),
        }
    }
}

/// Linear scorer shared by both algorithms.
///
/// `weights[label]` holds one coefficient per vocabulary entry followed by a
/// bias term. The label score of a document is `Σ count(v)·w[v] + w[bias]`
/// and the posterior is the softmax of the scores. For Naive Bayes the
/// coefficients are log-likelihoods and the bias is the log-prior, which
/// makes the softmax exactly the Bayes posterior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicModel {
    pub format_version: u32,
    pub algorithm: Algorithm,
    pub vocabulary: Vec<String>,
    pub topic_labels: Vec<String>,
    pub weights: Vec<Vec<f64>>,
    pub confidence_threshold: f64,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicAssignment {
    pub doc_id: String,
    /// `None` means UNCLASSIFIED.
    pub topic: Option<String>,
    pub confidence: f64,
}

impl TopicAssignment {
    pub fn is_classified(&self) -> bool {
        self.topic.is_some()
    }
}

impl TopicModel {
    pub fn new(
        algorithm: Algorithm,
        vocabulary: Vec<String>,
        topic_labels: Vec<String>,
        weights: Vec<Vec<f64>>,
        confidence_threshold: f64,
    ) -> Result<Self, TopicError> {
        let mut m = TopicModel {
            format_version: MODEL_FORMAT_VERSION,
            algorithm,
            vocabulary,
            topic_labels,
            weights,
            confidence_threshold,
            index: HashMap::new(),
        };
        m.validate()?;
        m.reindex();
        Ok(m)
    }

    /// Rebuild the vocabulary index and check dimensions, e.g. after
    /// deserialization.
    pub fn prepared(mut self) -> Result<Self, TopicError> {
        self.validate()?;
        self.reindex();
        Ok(self)
    }

    pub fn load(path: &std::path::Path) -> crate::Result<Self> {
        let m: TopicModel = crate::io::read_json(path)?;
        Ok(m.prepared()?)
    }

    fn validate(&self) -> Result<(), TopicError> {
        let expected_cols = self.vocabulary.len() + 1;
        let bad_row = self.weights.iter().find(|r| r.len() != expected_cols);
        if self.weights.len() != self.topic_labels.len() || bad_row.is_some() {
            return Err(TopicError::ModelShape {
                rows: self.weights.len(),
                cols: bad_row.or(self.weights.first()).map_or(0, Vec::len),
                labels: self.topic_labels.len(),
                expected_cols,
            });
        }
        if !(0.0..=1.0).contains(&self.confidence_threshold) {
            return Err(TopicError::InvalidParameter(format!(
                "confidence_threshold {} outside [0, 1]",
                self.confidence_threshold
            )));
        }
        Ok(())
    }

    fn reindex(&mut self) {
        self.index = self
            .vocabulary
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
    }

    pub fn vocabulary_index(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    /// Sparse bag-of-words over the model vocabulary; OOV tokens ignored.
    pub fn featurize<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<(usize, f64)> {
        let mut counts: HashMap<usize, f64> = HashMap::new();
        for t in tokens {
            if let Some(i) = self.vocabulary_index(t.as_ref()) {
                *counts.entry(i).or_default() += 1.0;
            }
        }
        let mut v: Vec<_> = counts.into_iter().collect();
        v.sort_by_key(|(i, _)| *i);
        v
    }

    /// Posterior over `topic_labels`, or `None` when no token is in the
    /// vocabulary.
    pub fn posterior<S: AsRef<str>>(&self, tokens: &[S]) -> Option<Vec<f64>> {
        let x = self.featurize(tokens);
        if x.is_empty() {
            return None;
        }
        let bias = self.vocabulary.len();
        let scores: Vec<f64> = self
            .weights
            .iter()
            .map(|row| row[bias] + x.iter().map(|(i, c)| row[*i] * c).sum::<f64>())
            .collect();
        Some(softmax(&scores))
    }

    /// Highest-posterior label ignoring the confidence threshold.
    pub fn argmax<S: AsRef<str>>(&self, tokens: &[S]) -> Option<(usize, f64)> {
        let p = self.posterior(tokens)?;
        let mut best = 0;
        for (i, v) in p.iter().enumerate() {
            if *v > p[best] {
                best = i;
            }
        }
        Some((best, p[best]))
    }

    pub fn predict<S: AsRef<str>>(&self, doc_id: &str, tokens: &[S]) -> TopicAssignment {
        match self.argmax(tokens) {
            Some((label, confidence)) => TopicAssignment {
                doc_id: doc_id.to_string(),
                topic: (confidence >= self.confidence_threshold)
                    .then(|| self.topic_labels[label].clone()),
                confidence,
            },
            None => TopicAssignment {
                doc_id: doc_id.to_string(),
                topic: None,
                confidence: 0.0,
            },
        }
    }
}

pub(crate) fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / z).collect()
}

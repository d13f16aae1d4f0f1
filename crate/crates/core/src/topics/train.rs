use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::maxent::{self, MaxEntParams, SparseDoc};
use super::model::{Algorithm, TopicModel};
use super::{naive_bayes, LabeledDocument, TopicError};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub algorithm: Algorithm,
    /// Fraction of the corpus used for training; the rest is held out.
    pub split: f64,
    /// Cross-validation folds over the training portion (0 or 1 disables).
    pub folds: usize,
    pub seed: u64,
    pub maxent: MaxEntParams,
    pub confidence_threshold: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            algorithm: Algorithm::MaxEntropy,
            split: 0.8,
            folds: 10,
            seed: 0,
            maxent: MaxEntParams::default(),
            confidence_threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationSummary {
    pub algorithm: Algorithm,
    pub documents: usize,
    pub train_documents: usize,
    pub test_documents: usize,
    pub labels: usize,
    pub vocabulary_size: usize,
    /// Accuracy of the final model on its own training portion.
    pub training_accuracy: f64,
    pub held_out_accuracy: Option<f64>,
    pub fold_accuracies: Vec<f64>,
    pub mean_fold_accuracy: Option<f64>,
}

/// Train on `split` of the shuffled corpus, evaluate on the remainder, and
/// run k-fold cross-validation over the training portion.
pub fn train(
    corpus: &[LabeledDocument],
    config: &TrainConfig,
) -> Result<(TopicModel, EvaluationSummary), TopicError> {
    if corpus.is_empty() {
        return Err(TopicError::EmptyCorpus);
    }
    if !(config.split > 0.0 && config.split <= 1.0) {
        return Err(TopicError::InvalidParameter(format!(
            "split {} outside (0, 1]",
            config.split
        )));
    }
    if let Some(d) = corpus.iter().find(|d| d.tokens.is_empty()) {
        return Err(TopicError::EmptyDocument(d.doc_id.clone()));
    }
    let labels: Vec<String> = corpus
        .iter()
        .map(|d| d.topic_label.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if labels.len() < 2 {
        return Err(TopicError::SingleLabel(labels[0].clone()));
    }

    let mut order: Vec<usize> = (0..corpus.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let n_train = ((config.split * corpus.len() as f64).round() as usize).clamp(1, corpus.len());
    let (train_idx, test_idx) = order.split_at(n_train);
    if config.folds > 1 && config.folds > train_idx.len() {
        return Err(TopicError::TooFewDocuments {
            docs: train_idx.len(),
            folds: config.folds,
        });
    }

    let train_docs: Vec<&LabeledDocument> = train_idx.iter().map(|&i| &corpus[i]).collect();
    let test_docs: Vec<&LabeledDocument> = test_idx.iter().map(|&i| &corpus[i]).collect();

    let mut fold_accuracies = Vec::new();
    if config.folds > 1 {
        for k in 0..config.folds {
            let (fit_on, check): (Vec<_>, Vec<_>) = train_docs
                .iter()
                .enumerate()
                .partition(|(i, _)| i % config.folds != k);
            let fit_on: Vec<&LabeledDocument> = fit_on.into_iter().map(|(_, d)| *d).collect();
            let check: Vec<&LabeledDocument> = check.into_iter().map(|(_, d)| *d).collect();
            let m = fit_model(&fit_on, &labels, config)?;
            fold_accuracies.push(accuracy(&m, &check));
        }
    }

    let model = fit_model(&train_docs, &labels, config)?;
    let summary = EvaluationSummary {
        algorithm: config.algorithm,
        documents: corpus.len(),
        train_documents: train_docs.len(),
        test_documents: test_docs.len(),
        labels: labels.len(),
        vocabulary_size: model.vocabulary.len(),
        training_accuracy: accuracy(&model, &train_docs),
        held_out_accuracy: (!test_docs.is_empty()).then(|| accuracy(&model, &test_docs)),
        mean_fold_accuracy: (!fold_accuracies.is_empty())
            .then(|| fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64),
        fold_accuracies,
    };
    Ok((model, summary))
}

fn fit_model(
    docs: &[&LabeledDocument],
    labels: &[String],
    config: &TrainConfig,
) -> Result<TopicModel, TopicError> {
    let vocabulary: Vec<String> = docs
        .iter()
        .flat_map(|d| d.tokens.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    // Zero-weight scaffold only used for featurization.
    let scaffold = TopicModel::new(
        config.algorithm,
        vocabulary.clone(),
        labels.to_vec(),
        vec![vec![0.0; vocabulary.len() + 1]; labels.len()],
        config.confidence_threshold,
    )?;
    let sparse: Vec<SparseDoc> = docs
        .iter()
        .map(|d| SparseDoc {
            features: scaffold.featurize(&d.tokens),
            label: labels
                .binary_search(&d.topic_label)
                .expect("label set built from corpus"),
        })
        .collect();
    let v = vocabulary.len();
    let weights = match config.algorithm {
        Algorithm::MaxEntropy => {
            let (flat, _) = maxent::fit(&sparse, labels.len(), v, &config.maxent);
            flat.chunks(v + 1).map(<[f64]>::to_vec).collect()
        }
        Algorithm::NaiveBayes => naive_bayes::fit(&sparse, labels.len(), v),
    };
    TopicModel::new(
        config.algorithm,
        vocabulary,
        labels.to_vec(),
        weights,
        config.confidence_threshold,
    )
}

fn accuracy(model: &TopicModel, docs: &[&LabeledDocument]) -> f64 {
    if docs.is_empty() {
        return 0.0;
    }
    let correct = docs
        .iter()
        .filter(|d| {
            model
                .argmax(&d.tokens)
                .is_some_and(|(l, _)| model.topic_labels[l] == d.topic_label)
        })
        .count();
    correct as f64 / docs.len() as f64
}

//! Supervised topic identification for hyperlink contexts and target pages.

mod integrate;
mod label;
pub mod maxent;
mod model;
pub mod naive_bayes;
mod train;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use integrate::{integrate, AssignmentSide, CoverageReport, SideAssignment, TopicRecord};
pub use label::{label_from_reader, label_interactive, LabelEntry, LabelTarget};
pub use model::{Algorithm, TopicAssignment, TopicModel, MODEL_FORMAT_VERSION};
pub use train::{train, EvaluationSummary, TrainConfig};

#[derive(Debug, Error)]
pub enum TopicError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("training corpus has a single topic label `{0}`; at least two are required")]
    SingleLabel(String),
    #[error("corpus of {docs} documents is too small for {folds} folds")]
    TooFewDocuments { docs: usize, folds: usize },
    #[error("training document `{0}` has no tokens")]
    EmptyDocument(String),
    #[error("invalid training parameter: {0}")]
    InvalidParameter(String),
    #[error("model weight table is {rows}x{cols}, expected {labels}x{expected_cols}")]
    ModelShape {
        rows: usize,
        cols: usize,
        labels: usize,
        expected_cols: usize,
    },
    #[error("link `{link_id}` is missing from {input}")]
    MissingLink { link_id: String, input: &'static str },
    #[error("line {line}: unknown judgment `{token}` (expected USEFUL/NOISY or 0/1)")]
    InvalidJudgment { line: usize, token: String },
    #[error("line {line}: more judgments than unlabeled links")]
    ExtraJudgment { line: usize },
    #[error("assignment id `{0}` is not of the form <link_id>/context or <link_id>/target")]
    BadDocId(String),
}

/// A training document: normalized tokens with a topic label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDocument {
    pub doc_id: String,
    pub tokens: Vec<String>,
    pub topic_label: String,
}

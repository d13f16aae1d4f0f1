//! Agreement between reasoner labels and user labels.

mod bench;
mod domains;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::reasoner::ClassifiedRecord;

pub use bench::{
    bench, parse_sizes, BenchResult, BenchRow, BenchScope, LinearFit, ReasonerWorkload, Workload,
};
pub use domains::{domain_report, ConceptCount, DomainCounts, DomainReport, DomainShare, Perspective, TOP_K};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("invalid benchmark sizes: {0}")]
    InvalidSizes(String),
    #[error("benchmark size {size} exceeds the {available} available records")]
    InsufficientData { size: usize, available: usize },
    #[error("at least 3 benchmark runs are required, got {0}")]
    TooFewRuns(usize),
    #[error("benchmark workload failed: {0}")]
    Workload(String),
}

/// Positive class is USEFUL; rows are the user label, columns the
/// reasoner label.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        ConfusionMatrix { tp, fp, fn_, tn }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

pub fn confusion(records: &[ClassifiedRecord]) -> ConfusionMatrix {
    let mut m = ConfusionMatrix::default();
    for r in records {
        match (r.user_label.is_useful(), r.reasoner_label.is_useful()) {
            (true, true) => m.tp += 1,
            (true, false) => m.fn_ += 1,
            (false, true) => m.fp += 1,
            (false, false) => m.tn += 1,
        }
    }
    m
}

/// The six measures as exact fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactMetrics {
    pub accuracy: Ratio<u64>,
    pub error_rate: Ratio<u64>,
    pub precision: Ratio<u64>,
    pub recall: Ratio<u64>,
    pub specificity: Ratio<u64>,
    pub f1: Ratio<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub error_rate: f64,
    pub precision: f64,
    pub recall: f64,
    pub specificity: f64,
    pub f1: f64,
}

fn ratio(num: u64, den: u64) -> Ratio<u64> {
    if den == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(num, den)
    }
}

fn to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Zero denominators yield 0.
pub fn exact_metrics(m: &ConfusionMatrix) -> Result<ExactMetrics, EvalError> {
    let total = m.total();
    if total == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let precision = ratio(m.tp, m.tp + m.fp);
    let recall = ratio(m.tp, m.tp + m.fn_);
    // 2pr/(p+r) simplifies to 2tp/(2tp+fp+fn) whenever p+r > 0.
    let f1 = ratio(2 * m.tp, 2 * m.tp + m.fp + m.fn_);
    Ok(ExactMetrics {
        accuracy: ratio(m.tp + m.tn, total),
        error_rate: ratio(m.fp + m.fn_, total),
        precision,
        recall,
        specificity: ratio(m.tn, m.tn + m.fp),
        f1,
    })
}

pub fn metrics(m: &ConfusionMatrix) -> Result<MetricsReport, EvalError> {
    let e = exact_metrics(m)?;
    Ok(MetricsReport {
        accuracy: to_f64(e.accuracy),
        error_rate: to_f64(e.error_rate),
        precision: to_f64(e.precision),
        recall: to_f64(e.recall),
        specificity: to_f64(e.specificity),
        f1: to_f64(e.f1),
    })
}

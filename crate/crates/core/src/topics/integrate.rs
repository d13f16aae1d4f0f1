use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::model::TopicAssignment;
use super::TopicError;
use crate::LinkLabel;

/// Which side of a hyperlink an assignment describes. Encoded into the
/// assignment's `doc_id` as `<link_id>/context` or `<link_id>/target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssignmentSide {
    Context,
    Target,
}

impl AssignmentSide {
    pub fn doc_id(self, link_id: &str) -> String {
        match self {
            AssignmentSide::Context => format!("{link_id}/context"),
            AssignmentSide::Target => format!("{link_id}/target"),
        }
    }
}

/// Parsed form of an assignment `doc_id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideAssignment<'a> {
    pub link_id: &'a str,
    pub side: AssignmentSide,
}

impl<'a> SideAssignment<'a> {
    pub fn parse(doc_id: &'a str) -> Option<Self> {
        let (link_id, side) = doc_id.rsplit_once('/')?;
        let side = match side {
            "context" => AssignmentSide::Context,
            "target" => AssignmentSide::Target,
            _ => return None,
        };
        Some(SideAssignment { link_id, side })
    }
}

/// Topic-level view of one hyperlink: context topic, target topic, user
/// label and source domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicRecord {
    pub context_topic: String,
    pub target_topic: String,
    pub user_label: LinkLabel,
    pub source_domain: String,
    pub link_id: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub total: usize,
    pub integrated: usize,
    pub context_unclassified: usize,
    pub target_unclassified: usize,
    pub both_unclassified: usize,
    /// `integrated / total`, 0 for an empty input.
    pub coverage: f64,
}

/// Join the four per-link inputs into [`TopicRecord`]s. Links with an
/// unclassified side are excluded and counted. Output is ordered by link id.
pub fn integrate(
    context: &BTreeMap<String, TopicAssignment>,
    target: &BTreeMap<String, TopicAssignment>,
    user_labels: &BTreeMap<String, LinkLabel>,
    domains: &BTreeMap<String, String>,
) -> Result<(Vec<TopicRecord>, CoverageReport), TopicError> {
    let ids: BTreeSet<&String> = context
        .keys()
        .chain(target.keys())
        .chain(user_labels.keys())
        .chain(domains.keys())
        .collect();

    let mut report = CoverageReport {
        total: ids.len(),
        ..CoverageReport::default()
    };
    let mut records = Vec::new();
    for id in ids {
        let missing = |input: &'static str| TopicError::MissingLink {
            link_id: id.clone(),
            input,
        };
        let c = context.get(id).ok_or_else(|| missing("context assignments"))?;
        let t = target.get(id).ok_or_else(|| missing("target assignments"))?;
        let label = user_labels.get(id).ok_or_else(|| missing("user labels"))?;
        let domain = domains.get(id).ok_or_else(|| missing("domains"))?;
        match (&c.topic, &t.topic) {
            (Some(ct), Some(tt)) => records.push(TopicRecord {
                context_topic: ct.clone(),
                target_topic: tt.clone(),
                user_label: *label,
                source_domain: domain.clone(),
                link_id: id.clone(),
            }),
            (None, None) => report.both_unclassified += 1,
            (None, Some(_)) => report.context_unclassified += 1,
            (Some(_), None) => report.target_unclassified += 1,
        }
    }
    report.integrated = records.len();
    report.coverage = if report.total == 0 {
        0.0
    } else {
        report.integrated as f64 / report.total as f64
    };
    Ok((records, report))
}

//! Topic-to-class matching: lexical candidate search over class labels,
//! scored by a mix of edit-distance similarity and Wu-Palmer similarity to
//! the classes whose label equals the topic.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::ontology::{OntologyClosure, OntologyError};
use crate::topics::TopicRecord;
use crate::LinkLabel;

pub const CANDIDATE_LIMIT: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub accept_threshold: f64,
    /// Weight α of the string score; `1 - α` goes to the semantic score.
    pub string_weight: f64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            accept_threshold: 0.7,
            string_weight: 0.5,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.string_weight) {
            return Err(format!("string weight {} outside [0, 1]", self.string_weight));
        }
        if !(self.accept_threshold > 0.0 && self.accept_threshold <= 1.0) {
            return Err(format!("accept threshold {} outside (0, 1]", self.accept_threshold));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptRecord {
    pub source_class: String,
    pub target_class: String,
    pub user_label: LinkLabel,
    pub source_domain: String,
    pub link_id: String,
}

/// Best candidate for a topic; `class` is `None` when nothing reached the
/// acceptance threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicMatch {
    pub class: Option<String>,
    pub score: f64,
}

fn prepare(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// `1 - levenshtein / max_len` on case-folded, whitespace-collapsed input.
pub fn string_similarity(a: &str, b: &str) -> f64 {
    strsim::normalized_levenshtein(&prepare(a), &prepare(b))
}

pub fn semantic_similarity(closure: &OntologyClosure, a: &str, b: &str) -> Result<f64, OntologyError> {
    closure.wu_palmer(a, b)
}

struct LabelEntry {
    iri: String,
    label: String,
    tokens: BTreeSet<String>,
}

pub struct Matcher<'a> {
    closure: &'a OntologyClosure,
    config: MatchConfig,
    labels: Vec<LabelEntry>,
}

impl<'a> Matcher<'a> {
    pub fn new(closure: &'a OntologyClosure, config: MatchConfig) -> Self {
        let ontology = closure.ontology();
        let labels = ontology
            .classes
            .keys()
            .filter_map(|iri| {
                let label = prepare(&ontology.display_label(iri)?);
                (!label.is_empty()).then(|| LabelEntry {
                    iri: iri.clone(),
                    tokens: label.split(' ').map(str::to_string).collect(),
                    label,
                })
            })
            .collect();
        Matcher {
            closure,
            config,
            labels,
        }
    }

    pub fn config(&self) -> &MatchConfig {
        &self.config
    }

    pub fn match_topic(&self, topic: &str) -> TopicMatch {
        let t = prepare(topic);
        if t.is_empty() {
            return TopicMatch { class: None, score: 0.0 };
        }
        let tokens: BTreeSet<&str> = t.split(' ').collect();
        let mut anchors = Vec::new();
        let mut candidates: Vec<(f64, &str)> = Vec::new();
        for e in &self.labels {
            let lexical = e.label == t
                || e.label.starts_with(&t)
                || t.starts_with(&e.label)
                || e.tokens.iter().any(|x| tokens.contains(x.as_str()));
            if !lexical {
                continue;
            }
            if e.label == t {
                anchors.push(e.iri.as_str());
            }
            candidates.push((strsim::normalized_levenshtein(&t, &e.label), e.iri.as_str()));
        }
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
        candidates.truncate(CANDIDATE_LIMIT);

        let alpha = self.config.string_weight;
        let mut best: Option<(f64, &str)> = None;
        for (s, iri) in candidates {
            let score = if anchors.is_empty() {
                s
            } else {
                let sem = anchors
                    .iter()
                    .map(|a| self.closure.wu_palmer(iri, a).unwrap_or(0.0))
                    .fold(0.0, f64::max);
                alpha * s + (1.0 - alpha) * sem
            };
            let better = match best {
                None => true,
                Some((bs, biri)) => score > bs || (score == bs && iri < biri),
            };
            if better {
                best = Some((score, iri));
            }
        }
        match best {
            Some((score, iri)) if score >= self.config.accept_threshold => TopicMatch {
                class: Some(iri.to_string()),
                score,
            },
            Some((score, _)) => TopicMatch { class: None, score },
            None => TopicMatch { class: None, score: 0.0 },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub records: usize,
    pub matched_records: usize,
    pub source_unmatched: usize,
    pub target_unmatched: usize,
    pub both_unmatched: usize,
    /// Topic occurrences over both sides of every record.
    pub topics: usize,
    pub topics_matched: usize,
    pub topic_coverage: f64,
    pub unmatched_topics: Vec<String>,
}

/// Map both topics of every record; records with an unmatched side are
/// excluded and counted. Output is ordered by link id.
pub fn match_dataset(records: &[TopicRecord], matcher: &Matcher<'_>) -> (Vec<ConceptRecord>, MatchReport) {
    let mut cache: BTreeMap<&str, Option<String>> = BTreeMap::new();
    let mut report = MatchReport {
        records: records.len(),
        topics: 2 * records.len(),
        ..MatchReport::default()
    };
    let mut unmatched = BTreeSet::new();
    let mut out = Vec::new();
    for r in records {
        let s = cache_get(&mut cache, matcher, &r.context_topic);
        let t = cache_get(&mut cache, matcher, &r.target_topic);
        report.topics_matched += s.is_some() as usize + t.is_some() as usize;
        if s.is_none() {
            unmatched.insert(r.context_topic.clone());
        }
        if t.is_none() {
            unmatched.insert(r.target_topic.clone());
        }
        match (s, t) {
            (Some(source_class), Some(target_class)) => out.push(ConceptRecord {
                source_class,
                target_class,
                user_label: r.user_label,
                source_domain: r.source_domain.clone(),
                link_id: r.link_id.clone(),
            }),
            (None, None) => report.both_unmatched += 1,
            (None, Some(_)) => report.source_unmatched += 1,
            (Some(_), None) => report.target_unmatched += 1,
        }
    }
    out.sort_by(|a, b| a.link_id.cmp(&b.link_id));
    report.matched_records = out.len();
    report.topic_coverage = if report.topics == 0 {
        0.0
    } else {
        report.topics_matched as f64 / report.topics as f64
    };
    report.unmatched_topics = unmatched.into_iter().collect();
    (out, report)
}

fn cache_get<'t>(
    cache: &mut BTreeMap<&'t str, Option<String>>,
    matcher: &Matcher<'_>,
    topic: &'t str,
) -> Option<String> {
    cache
        .entry(topic)
        .or_insert_with(|| matcher.match_topic(topic).class)
        .clone()
}

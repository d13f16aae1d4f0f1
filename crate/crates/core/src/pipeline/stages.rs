use std::collections::BTreeMap;
use std::path::Path;

use crate::crawl::{self, CrawlConfig, CrawlOutput, Fetcher, HttpFetcher, PageStore, SiteDirFetcher};
use crate::eval::{self, ConfusionMatrix, DomainReport, MetricsReport};
use crate::features::{build_features, FeatureRecord, FeatureReport, Normalizer};
use crate::io::{read_jsonl, write_json, write_jsonl};
use crate::linkprep::{filter_links, FilterReport};
use crate::matcher::{match_dataset, ConceptRecord, MatchConfig, MatchReport, Matcher};
use crate::ontology::{build_closure, load_ontology, OntologyClosure};
use crate::reasoner::{classify_dataset, ClassifiedRecord, PropertyBreakdown};
use crate::topics::{
    integrate, train, AssignmentSide, CoverageReport, EvaluationSummary, LabelEntry, LabeledDocument,
    SideAssignment, TopicAssignment, TopicError, TopicModel, TopicRecord, TrainConfig,
};
use crate::{LinkLabel, Result};

pub fn run_crawl(config: &CrawlConfig, site_dir: Option<&Path>, out_dir: &Path) -> Result<CrawlOutput> {
    let fetcher: Box<dyn Fetcher> = match site_dir {
        Some(dir) => Box::new(SiteDirFetcher::new(dir)),
        None => Box::new(HttpFetcher::new(&config.user_agent, config.fetch_timeout)),
    };
    let output = crawl::crawl(config, fetcher.as_ref())?;
    crawl::write_crawl(out_dir, &output)?;
    Ok(output)
}

pub fn run_linkprep(input: &Path, output: &Path, report: &Path) -> Result<FilterReport> {
    let links = crawl::read_links(input)?;
    let (kept, summary) = filter_links(&links);
    crawl::write_links(output, &kept)?;
    write_json(report, &summary)?;
    Ok(summary)
}

pub fn run_features(
    links: &Path,
    pages: &Path,
    output: &Path,
    normalizer: &Normalizer,
) -> Result<(Vec<FeatureRecord>, FeatureReport)> {
    let links = crawl::read_links(links)?;
    let store = PageStore::open(pages)?;
    let (records, report) = build_features(&links, &store, normalizer)?;
    write_jsonl(output, &records)?;
    Ok((records, report))
}

pub fn run_train(corpus: &Path, config: &TrainConfig) -> Result<(TopicModel, EvaluationSummary)> {
    let docs: Vec<LabeledDocument> = read_jsonl(corpus)?;
    Ok(train(&docs, config)?)
}

/// Assignments for both sides of every record, ordered by `doc_id`.
pub fn predict_features(model: &TopicModel, features: &[FeatureRecord]) -> Vec<TopicAssignment> {
    let mut out = Vec::with_capacity(2 * features.len());
    for f in features {
        out.push(model.predict(&AssignmentSide::Context.doc_id(&f.link_id), &f.context_tokens));
        out.push(model.predict(&AssignmentSide::Target.doc_id(&f.link_id), &f.target_tokens));
    }
    out.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    out
}

/// Join assignments with user labels and the domains recorded in the
/// feature records.
pub fn integrate_assignments(
    assignments: &[TopicAssignment],
    labels: &[LabelEntry],
    features: &[FeatureRecord],
) -> Result<(Vec<TopicRecord>, CoverageReport)> {
    let mut context = BTreeMap::new();
    let mut target = BTreeMap::new();
    for a in assignments {
        let side = SideAssignment::parse(&a.doc_id).ok_or_else(|| TopicError::BadDocId(a.doc_id.clone()))?;
        let map = match side.side {
            AssignmentSide::Context => &mut context,
            AssignmentSide::Target => &mut target,
        };
        map.insert(side.link_id.to_string(), a.clone());
    }
    let user_labels: BTreeMap<String, LinkLabel> =
        labels.iter().map(|l| (l.link_id.clone(), l.user_label)).collect();
    let domains: BTreeMap<String, String> = features
        .iter()
        .map(|f| (f.link_id.clone(), f.source_domain.clone()))
        .collect();
    Ok(integrate(&context, &target, &user_labels, &domains)?)
}

pub fn load_closure(path: &Path) -> Result<OntologyClosure> {
    Ok(build_closure(load_ontology(path)?))
}

pub fn run_match(
    topics: &[TopicRecord],
    closure: &OntologyClosure,
    config: MatchConfig,
) -> (Vec<ConceptRecord>, MatchReport) {
    let matcher = Matcher::new(closure, config);
    match_dataset(topics, &matcher)
}

pub fn run_reason(
    concepts: &[ConceptRecord],
    closure: &OntologyClosure,
) -> Result<(Vec<ClassifiedRecord>, PropertyBreakdown)> {
    Ok(classify_dataset(concepts, closure)?)
}

pub struct EvalOutput {
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
    pub domains: DomainReport,
}

/// Write `confusion.json`, `metrics.json` and `domains.json` into `dir`.
pub fn run_eval(records: &[ClassifiedRecord], dir: &Path) -> Result<EvalOutput> {
    let confusion = eval::confusion(records);
    let metrics = eval::metrics(&confusion)?;
    let domains = eval::domain_report(records);
    write_json(&dir.join("confusion.json"), &confusion)?;
    write_json(&dir.join("metrics.json"), &metrics)?;
    write_json(&dir.join("domains.json"), &domains)?;
    Ok(EvalOutput {
        confusion,
        metrics,
        domains,
    })
}

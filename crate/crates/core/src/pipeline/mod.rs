//! End-to-end orchestration over a workspace directory.
//!
//! Each stage reads the artifact written by the stage before it and writes
//! its own, so a run can resume from any stage. After a run the workspace
//! holds `manifest.json` with the SHA-256 of every stage artifact.

mod config;
pub mod stages;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::info;
use serde::{Deserialize, Serialize};

use crate::crawl::{self, PageStore};
use crate::eval::Workload;
use crate::features::{FeatureRecord, Normalizer};
use crate::io::{read_jsonl, sha256_file, write_json, write_jsonl};
use crate::matcher::{ConceptRecord, MatchConfig};
use crate::ontology::{build_closure, OntologyClosure};
use crate::reasoner::ClassifiedRecord;
use crate::synth;
use crate::topics::{self, Algorithm, LabelEntry, TopicAssignment, TopicModel, TopicRecord, TrainConfig};
use crate::{Error, LinkLabel, Result};

pub use config::PipelineConfig;
use stages::*;

pub const LINKS_RAW: &str = "links_raw.jsonl";
pub const LINKS_CLEAN: &str = "links_clean.jsonl";
pub const FEATURES: &str = "features.jsonl";
pub const ASSIGNMENTS: &str = "assignments.jsonl";
pub const TOPICS: &str = "topics.jsonl";
pub const CONCEPTS: &str = "concepts.jsonl";
pub const CLASSIFIED: &str = "classified.jsonl";
pub const METRICS: &str = "metrics.json";
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Crawl,
    Linkprep,
    Features,
    Topics,
    Match,
    Reason,
    Eval,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Crawl,
        Stage::Linkprep,
        Stage::Features,
        Stage::Topics,
        Stage::Match,
        Stage::Reason,
        Stage::Eval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Crawl => "crawl",
            Stage::Linkprep => "linkprep",
            Stage::Features => "features",
            Stage::Topics => "topics",
            Stage::Match => "match",
            Stage::Reason => "reason",
            Stage::Eval => "eval",
        }
    }

    /// Workspace artifacts this stage consumes.
    pub fn inputs(self) -> &'static [&'static str] {
        match self {
            Stage::Crawl => &[],
            Stage::Linkprep => &[LINKS_RAW],
            Stage::Features => &[LINKS_CLEAN, crawl::PAGES_DIR],
            Stage::Topics => &[FEATURES],
            Stage::Match => &[TOPICS],
            Stage::Reason => &[CONCEPTS],
            Stage::Eval => &[CLASSIFIED],
        }
    }

    /// Manifest artifacts this stage produces.
    pub fn outputs(self) -> &'static [&'static str] {
        match self {
            Stage::Crawl => &[LINKS_RAW],
            Stage::Linkprep => &[LINKS_CLEAN],
            Stage::Features => &[FEATURES],
            Stage::Topics => &[ASSIGNMENTS, TOPICS],
            Stage::Match => &[CONCEPTS],
            Stage::Reason => &[CLASSIFIED],
            Stage::Eval => &[METRICS],
        }
    }

    /// Side reports written next to the artifacts.
    pub fn reports(self) -> &'static [&'static str] {
        match self {
            Stage::Crawl => &["crawl_failures.jsonl"],
            Stage::Linkprep => &["filter_report.json"],
            Stage::Features => &["feature_report.json"],
            Stage::Topics => &["model.json", "training_summary.json", "coverage.json"],
            Stage::Match => &["match_report.json"],
            Stage::Reason => &["breakdown.json"],
            Stage::Eval => &["confusion.json", "domains.json"],
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Stage::ALL.iter().map(|s| s.name()).collect();
                format!("unknown stage `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub stage: Stage,
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub artifacts: Vec<ManifestEntry>,
    pub reports: Vec<ManifestEntry>,
}

impl Manifest {
    /// Hash every artifact and report present in `workspace`.
    pub fn collect(workspace: &Path) -> Result<Manifest> {
        let mut m = Manifest::default();
        for stage in Stage::ALL {
            for (names, into) in [(stage.outputs(), &mut m.artifacts), (stage.reports(), &mut m.reports)] {
                for name in names {
                    let path = workspace.join(name);
                    if path.is_file() {
                        into.push(ManifestEntry {
                            stage,
                            file: name.to_string(),
                            sha256: sha256_file(&path)?,
                        });
                    }
                }
            }
        }
        Ok(m)
    }
}

fn require_inputs(workspace: &Path, stage: Stage) -> Result<()> {
    for name in stage.inputs() {
        let path = workspace.join(name);
        if !path.exists() {
            return Err(Error::MissingArtifact(path));
        }
    }
    Ok(())
}

fn ws(cfg: &PipelineConfig, name: &str) -> PathBuf {
    cfg.workspace.join(name)
}

/// Run every stage from `from` onwards. Completed artifacts are left in
/// place when a stage fails.
pub fn run(cfg: &PipelineConfig, from: Stage) -> Result<Manifest> {
    std::fs::create_dir_all(&cfg.workspace).map_err(|e| Error::io(&cfg.workspace, e))?;
    require_inputs(&cfg.workspace, from)?;
    for stage in Stage::ALL.into_iter().filter(|s| *s >= from) {
        info!("stage {stage}");
        run_stage(cfg, stage)?;
    }
    let manifest = Manifest::collect(&cfg.workspace)?;
    write_json(&ws(cfg, MANIFEST), &manifest)?;
    Ok(manifest)
}

fn run_stage(cfg: &PipelineConfig, stage: Stage) -> Result<()> {
    match stage {
        Stage::Crawl => {
            let mut c = cfg.crawl_config();
            c.seed_urls = crawl::read_seeds(cfg.require(&cfg.seeds, "seeds")?)?;
            let out = run_crawl(&c, cfg.site_dir.as_deref(), &cfg.workspace)?;
            info!("crawled {} pages, {} links, {} failures", out.pages.len(), out.links.len(), out.failures.len());
        }
        Stage::Linkprep => {
            let r = run_linkprep(&ws(cfg, LINKS_RAW), &ws(cfg, LINKS_CLEAN), &ws(cfg, "filter_report.json"))?;
            info!("kept {} of {} links", r.kept_count, r.input_count);
        }
        Stage::Features => {
            let normalizer = Normalizer::new(cfg.normalization_config()?);
            let (_, report) = run_features(
                &ws(cfg, LINKS_CLEAN),
                &ws(cfg, crawl::PAGES_DIR),
                &ws(cfg, FEATURES),
                &normalizer,
            )?;
            write_json(&ws(cfg, "feature_report.json"), &report)?;
        }
        Stage::Topics => {
            let features: Vec<FeatureRecord> = read_jsonl(&ws(cfg, FEATURES))?;
            let model = match &cfg.model {
                Some(path) => TopicModel::load(path)?,
                None => {
                    let corpus = cfg.require(&cfg.corpus, "corpus")?;
                    let (model, summary) = run_train(corpus, &cfg.train_config())?;
                    write_json(&ws(cfg, "training_summary.json"), &summary)?;
                    model
                }
            };
            write_json(&ws(cfg, "model.json"), &model)?;
            let assignments = predict_features(&model, &features);
            write_jsonl(&ws(cfg, ASSIGNMENTS), &assignments)?;
            let labels: Vec<LabelEntry> = read_jsonl(cfg.require(&cfg.labels, "labels")?)?;
            let (records, coverage) = integrate_assignments(&assignments, &labels, &features)?;
            write_jsonl(&ws(cfg, TOPICS), &records)?;
            write_json(&ws(cfg, "coverage.json"), &coverage)?;
            info!("{} of {} links have both topics", coverage.integrated, coverage.total);
        }
        Stage::Match => {
            let topics: Vec<TopicRecord> = read_jsonl(&ws(cfg, TOPICS))?;
            let closure = load_closure(cfg.require(&cfg.ontology, "ontology")?)?;
            let mc = cfg.match_config();
            mc.validate().map_err(Error::Config)?;
            let (concepts, report) = run_match(&topics, &closure, mc);
            write_jsonl(&ws(cfg, CONCEPTS), &concepts)?;
            write_json(&ws(cfg, "match_report.json"), &report)?;
        }
        Stage::Reason => {
            let concepts: Vec<ConceptRecord> = read_jsonl(&ws(cfg, CONCEPTS))?;
            let closure = load_closure(cfg.require(&cfg.ontology, "ontology")?)?;
            let (classified, breakdown) = run_reason(&concepts, &closure)?;
            write_jsonl(&ws(cfg, CLASSIFIED), &classified)?;
            write_json(&ws(cfg, "breakdown.json"), &breakdown)?;
        }
        Stage::Eval => {
            let classified: Vec<ClassifiedRecord> = read_jsonl(&ws(cfg, CLASSIFIED))?;
            let out = run_eval(&classified, &cfg.workspace)?;
            info!("accuracy {:.4}", out.metrics.accuracy);
        }
    }
    Ok(())
}

/// Open the page store of a workspace.
pub fn page_store(workspace: &Path) -> Result<PageStore> {
    PageStore::open(&workspace.join(crawl::PAGES_DIR))
}

/// Inputs for timing topic identification through reasoning.
pub struct FullBenchData {
    pub model: TopicModel,
    pub closure: OntologyClosure,
    pub features: Vec<FeatureRecord>,
    pub labels: Vec<LabelEntry>,
}

/// Synthetic world whose topic labels are the class labels of a generated
/// taxonomy, with `n` feature records.
pub fn synthetic_full_bench(seed: u64, n: usize) -> Result<FullBenchData> {
    use rand::{Rng, SeedableRng};

    const CLASSES: usize = 40;
    const VOCAB: usize = 15;
    let ontology = synth::labeled_ontology(seed, CLASSES);
    let labels = synth::class_labels(&ontology);
    let corpus = synth::separable_corpus(seed, &labels, 10, VOCAB, 6);
    let config = TrainConfig {
        algorithm: Algorithm::NaiveBayes,
        folds: 0,
        split: 1.0,
        seed,
        ..TrainConfig::default()
    };
    let (model, _) = topics::train(&corpus, &config)?;
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let tokens = |r: &mut rand_chacha::ChaCha8Rng| {
        let l = r.gen_range(0..labels.len());
        (0..5).map(|_| synth::vocab_word(l, r.gen_range(0..VOCAB))).collect::<Vec<_>>()
    };
    let mut features = Vec::with_capacity(n);
    let mut user = Vec::with_capacity(n);
    for i in 0..n {
        let link_id = format!("{i:016x}");
        features.push(FeatureRecord {
            link_id: link_id.clone(),
            source_domain: format!("site{}", i % 7),
            context: Default::default(),
            target: Default::default(),
            context_tokens: tokens(&mut r),
            target_tokens: tokens(&mut r),
        });
        user.push(LabelEntry {
            link_id,
            user_label: if r.gen_bool(0.7) { LinkLabel::Useful } else { LinkLabel::Noisy },
        });
    }
    Ok(FullBenchData {
        model,
        closure: build_closure(ontology),
        features,
        labels: user,
    })
}

/// Topic prediction, integration, matching and reasoning over the first
/// `size` feature records.
pub struct FullWorkload<'a> {
    pub data: &'a FullBenchData,
    pub match_config: MatchConfig,
}

impl Workload for FullWorkload<'_> {
    fn available(&self) -> usize {
        self.data.features.len()
    }

    fn run(&mut self, size: usize) -> std::result::Result<(), String> {
        let features = &self.data.features[..size];
        let assignments: Vec<TopicAssignment> = predict_features(&self.data.model, features);
        let (topics, _) = integrate_assignments(&assignments, &self.data.labels[..size], features)
            .map_err(|e| e.to_string())?;
        let (concepts, _) = run_match(&topics, &self.data.closure, self.match_config);
        let (classified, _) = run_reason(&concepts, &self.data.closure).map_err(|e| e.to_string())?;
        std::hint::black_box(classified);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_order_and_names() {
        assert!(Stage::Crawl < Stage::Eval);
        assert_eq!("REASON".parse::<Stage>().unwrap(), Stage::Reason);
        assert!("nope".parse::<Stage>().is_err());
        let artifacts: usize = Stage::ALL.iter().map(|s| s.outputs().len()).sum();
        assert_eq!(artifacts, 8);
    }

    #[test]
    fn from_reason_requires_concepts() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PipelineConfig {
            workspace: dir.path().to_path_buf(),
            ..PipelineConfig::default()
        };
        let err = run(&cfg, Stage::Reason).unwrap_err();
        assert!(matches!(&err, Error::MissingArtifact(p) if p.ends_with(CONCEPTS)), "{err}");
    }

    #[test]
    fn full_workload_runs() {
        let data = synthetic_full_bench(1, 50).unwrap();
        let mut w = FullWorkload {
            data: &data,
            match_config: MatchConfig::default(),
        };
        w.run(50).unwrap();
    }
}

use std::fs::OpenOptions;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use noisylink::crawl::{self, CrawlConfig};
use noisylink::eval::{bench, parse_sizes, BenchResult, BenchScope, ReasonerWorkload};
use noisylink::features::{FeatureRecord, NormalizationConfig, Normalizer};
use noisylink::io::{read_jsonl, read_to_string, write_json, write_jsonl};
use noisylink::matcher::{ConceptRecord, MatchConfig};
use noisylink::ontology::{build_closure, load_ontology, QueryKind};
use noisylink::pipeline::{self, stages, FullWorkload, PipelineConfig, Stage};
use noisylink::reasoner::ClassifiedRecord;
use noisylink::topics::{
    label_from_reader, label_interactive, Algorithm, LabelEntry, LabelTarget, LabeledDocument,
    TopicAssignment, TopicModel, TopicRecord, TrainConfig,
};
use noisylink::{synth, Error, ErrorKind};

#[derive(Parser)]
#[command(name = "noisylink", version, about = "Detect noisy hyperlinks with an ontology reasoner")]
struct Cli {
    /// Workspace directory holding stage artifacts.
    #[arg(long, global = true, env = "NOISYLINK_WORKSPACE", default_value = "workspace")]
    workspace: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Crawl the seed domains and store page snapshots and raw links.
    Crawl(CrawlArgs),
    /// Remove ineligible links.
    Linkprep {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Extract context and target features for every link.
    Features {
        #[arg(long)]
        links: Option<PathBuf>,
        #[arg(long)]
        pages: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        norm: NormArgs,
    },
    /// Topic classifier training, prediction, integration and labeling.
    #[command(subcommand)]
    Topics(TopicsCommand),
    /// Map topics to ontology classes.
    Match {
        #[arg(long)]
        topics: Option<PathBuf>,
        #[arg(long)]
        ontology: PathBuf,
        #[arg(long, default_value_t = MatchConfig::default().string_weight)]
        alpha: f64,
        #[arg(long, default_value_t = MatchConfig::default().accept_threshold)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Ontology snapshot tools.
    #[command(subcommand)]
    Ontology(OntologyCommand),
    /// Classify concept pairs as useful or noisy.
    Reason {
        #[arg(long)]
        concepts: Option<PathBuf>,
        #[arg(long)]
        ontology: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        breakdown: Option<PathBuf>,
    },
    /// Compare reasoner labels with user labels; optionally time the pipeline.
    Eval(EvalArgs),
    /// Run the whole pipeline from a configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// First stage to execute; earlier artifacts must exist.
        #[arg(long, default_value = "crawl")]
        from: Stage,
        /// Override a configuration key (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

#[derive(Args)]
struct CrawlArgs {
    #[arg(long)]
    seeds: PathBuf,
    /// Output directory; defaults to the workspace.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    max_pages: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    delay_ms: Option<u64>,
    #[arg(long)]
    timeout_ms: Option<u64>,
    #[arg(long)]
    user_agent: Option<String>,
    /// Serve pages from `<dir>/<host>/<path>` instead of the network.
    #[arg(long)]
    site_dir: Option<PathBuf>,
}

#[derive(Args)]
struct NormArgs {
    /// Replace the bundled stopword list.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Extra compound rules (`words<TAB>joined`).
    #[arg(long)]
    compounds: Option<PathBuf>,
    #[arg(long)]
    no_stem: bool,
    #[arg(long)]
    no_casefold: bool,
}

impl NormArgs {
    fn normalizer(&self) -> noisylink::Result<Normalizer> {
        let mut c = NormalizationConfig::default();
        if let Some(p) = &self.stopwords {
            c = c.with_stopwords_file(p)?;
        }
        if let Some(p) = &self.compounds {
            c = c.with_extra_compounds(p)?;
        }
        c.enable_stemming = !self.no_stem;
        c.enable_casefold = !self.no_casefold;
        Ok(Normalizer::new(c))
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value = "maxent")]
    algo: Algorithm,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 0.8)]
    split: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    confidence_threshold: f64,
}

impl TrainArgs {
    fn config(&self, algorithm: Algorithm) -> TrainConfig {
        TrainConfig {
            algorithm,
            split: self.split,
            folds: self.folds,
            seed: self.seed,
            confidence_threshold: self.confidence_threshold,
            ..TrainConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum TopicsCommand {
    /// Normalize a `label<TAB>text` file into a training corpus.
    Prepare {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        norm: NormArgs,
    },
    /// Train a topic model.
    Train {
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Train both algorithms and report their accuracies side by side.
    Compare {
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Assign topics to both sides of every feature record.
    Predict {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Join assignments with user labels.
    Integrate {
        #[arg(long)]
        assignments: Option<PathBuf>,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        coverage: Option<PathBuf>,
    },
    /// Record user judgments for links that are not labeled yet.
    Label {
        #[arg(long, conflicts_with = "from", required_unless_present = "from")]
        interactive: bool,
        /// One judgment per line: useful/u/0 or noisy/n/1.
        #[arg(long)]
        from: Option<PathBuf>,
        #[arg(long)]
        features: Option<PathBuf>,
        /// Label file, appended to.
        #[arg(long)]
        labels: PathBuf,
    },
}

#[derive(Subcommand)]
enum OntologyCommand {
    /// Check a snapshot and print a summary.
    Validate { file: PathBuf },
    /// Ask whether a relation holds between two classes.
    Query {
        file: PathBuf,
        /// EQUIVALENT, SUBCLASS, SUPERCLASS or RELATED.
        kind: QueryKind,
        a: String,
        b: String,
    },
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    classified: Option<PathBuf>,
    /// Directory for the reports; defaults to the workspace.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Comma-separated dataset sizes to time.
    #[arg(long)]
    bench: Option<String>,
    #[arg(long, default_value = "reasoner_only")]
    scope: BenchScope,
    #[arg(long, default_value_t = 5)]
    runs: usize,
    /// Time REASONER_ONLY over the classified records and this ontology
    /// instead of synthetic data.
    #[arg(long)]
    ontology: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Usage => 1,
                ErrorKind::Data => 2,
                ErrorKind::Network => 3,
            })
        }
    }
}

fn or_ws(path: Option<PathBuf>, ws: &Path, name: &str) -> PathBuf {
    path.unwrap_or_else(|| ws.join(name))
}

fn ensure_dir(dir: &Path) -> noisylink::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn execute(cli: Cli) -> noisylink::Result<()> {
    let ws = cli.workspace;
    match cli.command {
        Command::Crawl(a) => {
            let defaults = CrawlConfig::default();
            let config = CrawlConfig {
                seed_urls: crawl::read_seeds(&a.seeds)?,
                max_pages_per_domain: a.max_pages.unwrap_or(defaults.max_pages_per_domain),
                max_depth: a.max_depth.unwrap_or(defaults.max_depth),
                per_host_delay: a
                    .delay_ms
                    .map_or(defaults.per_host_delay, std::time::Duration::from_millis),
                fetch_timeout: a
                    .timeout_ms
                    .map_or(defaults.fetch_timeout, std::time::Duration::from_millis),
                user_agent: a.user_agent.unwrap_or(defaults.user_agent),
                ..defaults
            };
            let out = a.out.unwrap_or(ws);
            ensure_dir(&out)?;
            let result = stages::run_crawl(&config, a.site_dir.as_deref(), &out)?;
            info!(
                "{} pages, {} links, {} failures",
                result.pages.len(),
                result.links.len(),
                result.failures.len()
            );
        }
        Command::Linkprep { input, out, report } => {
            let r = stages::run_linkprep(
                &or_ws(input, &ws, pipeline::LINKS_RAW),
                &or_ws(out, &ws, pipeline::LINKS_CLEAN),
                &or_ws(report, &ws, "filter_report.json"),
            )?;
            print_json(&r);
        }
        Command::Features { links, pages, out, norm } => {
            let (_, report) = stages::run_features(
                &or_ws(links, &ws, pipeline::LINKS_CLEAN),
                &or_ws(pages, &ws, crawl::PAGES_DIR),
                &or_ws(out, &ws, pipeline::FEATURES),
                &norm.normalizer()?,
            )?;
            print_json(&report);
        }
        Command::Topics(cmd) => topics(cmd, &ws)?,
        Command::Match {
            topics,
            ontology,
            alpha,
            threshold,
            out,
            report,
        } => {
            let config = MatchConfig {
                accept_threshold: threshold,
                string_weight: alpha,
            };
            config.validate().map_err(Error::Config)?;
            let records: Vec<TopicRecord> = read_jsonl(&or_ws(topics, &ws, pipeline::TOPICS))?;
            let closure = stages::load_closure(&ontology)?;
            let (concepts, r) = stages::run_match(&records, &closure, config);
            write_jsonl(&or_ws(out, &ws, pipeline::CONCEPTS), &concepts)?;
            write_json(&or_ws(report, &ws, "match_report.json"), &r)?;
            print_json(&r);
        }
        Command::Ontology(OntologyCommand::Validate { file }) => {
            let o = load_ontology(&file)?;
            println!(
                "{} classes, {} object properties, {} axioms",
                o.classes.len(),
                o.object_properties.len(),
                o.axiom_count()
            );
        }
        Command::Ontology(OntologyCommand::Query { file, kind, a, b }) => {
            let closure = build_closure(load_ontology(&file)?);
            let answer = closure.query(kind, &a, &b)?;
            println!("{}", answer.holds);
            for step in &answer.justification {
                println!("  {step}");
            }
        }
        Command::Reason {
            concepts,
            ontology,
            out,
            breakdown,
        } => {
            let records: Vec<ConceptRecord> = read_jsonl(&or_ws(concepts, &ws, pipeline::CONCEPTS))?;
            let closure = stages::load_closure(&ontology)?;
            let (classified, b) = stages::run_reason(&records, &closure)?;
            write_jsonl(&or_ws(out, &ws, pipeline::CLASSIFIED), &classified)?;
            write_json(&or_ws(breakdown, &ws, "breakdown.json"), &b)?;
            print_json(&b);
        }
        Command::Eval(a) => evaluate(a, &ws)?,
        Command::Run {
            config,
            from,
            overrides,
        } => {
            let mut cfg = PipelineConfig::from_file(&config)?;
            cfg.workspace = ws_override(&cfg.workspace, &ws);
            let cwd = Path::new(".");
            for o in &overrides {
                let (k, v) = o
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{o}`")))?;
                cfg.set(k.trim(), v, cwd)?;
            }
            let manifest = pipeline::run(&cfg, from)?;
            print_json(&manifest);
        }
    }
    Ok(())
}

/// An explicitly given workspace (flag or environment) beats the file.
fn ws_override(from_file: &Path, cli: &Path) -> PathBuf {
    if cli == Path::new("workspace") {
        from_file.to_path_buf()
    } else {
        cli.to_path_buf()
    }
}

fn topics(cmd: TopicsCommand, ws: &Path) -> noisylink::Result<()> {
    match cmd {
        TopicsCommand::Prepare { input, out, norm } => {
            let normalizer = norm.normalizer()?;
            let text = read_to_string(&input)?;
            let mut docs = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (label, body) = line.split_once('\t').ok_or_else(|| {
                    Error::Config(format!("{}:{}: expected `label<TAB>text`", input.display(), i + 1))
                })?;
                docs.push(LabeledDocument {
                    doc_id: format!("doc{:05}", docs.len()),
                    tokens: normalizer.normalize(body),
                    topic_label: label.trim().to_string(),
                });
            }
            write_jsonl(&out, &docs)?;
            info!("{} documents", docs.len());
        }
        TopicsCommand::Train { train, out, summary } => {
            let config = train.config(train.algo);
            let (model, s) = stages::run_train(&train.corpus, &config)?;
            ensure_dir(ws)?;
            write_json(&or_ws(out, ws, "model.json"), &model)?;
            write_json(&or_ws(summary, ws, "training_summary.json"), &s)?;
            print_json(&s);
        }
        TopicsCommand::Compare { train } => {
            let mut rows = Vec::new();
            for algo in [Algorithm::MaxEntropy, Algorithm::NaiveBayes] {
                let (_, s) = stages::run_train(&train.corpus, &train.config(algo))?;
                rows.push(s);
            }
            print_json(&rows);
        }
        TopicsCommand::Predict { model, features, out } => {
            let model = TopicModel::load(&or_ws(model, ws, "model.json"))?;
            let records: Vec<FeatureRecord> = read_jsonl(&or_ws(features, ws, pipeline::FEATURES))?;
            let assignments = stages::predict_features(&model, &records);
            let classified = assignments.iter().filter(|a| a.is_classified()).count();
            write_jsonl(&or_ws(out, ws, pipeline::ASSIGNMENTS), &assignments)?;
            info!("{classified} of {} sides classified", assignments.len());
        }
        TopicsCommand::Integrate {
            assignments,
            labels,
            features,
            out,
            coverage,
        } => {
            let assignments: Vec<TopicAssignment> =
                read_jsonl(&or_ws(assignments, ws, pipeline::ASSIGNMENTS))?;
            let labels: Vec<LabelEntry> = read_jsonl(&labels)?;
            let features: Vec<FeatureRecord> = read_jsonl(&or_ws(features, ws, pipeline::FEATURES))?;
            let (records, c) = stages::integrate_assignments(&assignments, &labels, &features)?;
            write_jsonl(&or_ws(out, ws, pipeline::TOPICS), &records)?;
            write_json(&or_ws(coverage, ws, "coverage.json"), &c)?;
            print_json(&c);
        }
        TopicsCommand::Label {
            interactive,
            from,
            features,
            labels,
        } => {
            let records: Vec<FeatureRecord> = read_jsonl(&or_ws(features, ws, pipeline::FEATURES))?;
            let targets: Vec<LabelTarget> = records.iter().map(describe).collect();
            let existing: Vec<LabelEntry> = if labels.exists() { read_jsonl(&labels)? } else { Vec::new() };
            let added = if interactive {
                let stdin = io::stdin();
                label_interactive(&targets, &existing, stdin.lock(), io::stdout(), |e| {
                    append_label(&labels, e)
                })?
            } else {
                let path = from.expect("clap enforces --from without --interactive");
                let file = std::fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
                let entries = label_from_reader(&targets, &existing, BufReader::new(file))?;
                for e in &entries {
                    append_label(&labels, e)?;
                }
                entries.len()
            };
            let remaining = targets.len() - existing.len().min(targets.len()) - added;
            println!("{added} labeled, {remaining} remaining");
        }
    }
    Ok(())
}

fn describe(f: &FeatureRecord) -> LabelTarget {
    let target = if f.target.page_title.is_empty() {
        "(target not crawled)"
    } else {
        &f.target.page_title
    };
    LabelTarget {
        link_id: f.link_id.clone(),
        description: format!(
            "{} | \"{}\" on \"{}\" -> \"{}\"",
            f.source_domain, f.context.anchor_text, f.context.page_title, target
        ),
    }
}

fn append_label(path: &Path, entry: &LabelEntry) -> noisylink::Result<()> {
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    let line = serde_json::to_string(entry).expect("serializable");
    writeln!(file, "{line}").map_err(|e| Error::io(path, e))
}

fn evaluate(a: EvalArgs, ws: &Path) -> noisylink::Result<()> {
    let out_dir = a.out_dir.unwrap_or_else(|| ws.to_path_buf());
    ensure_dir(&out_dir)?;
    let records: Vec<ClassifiedRecord> = read_jsonl(&or_ws(a.classified, ws, pipeline::CLASSIFIED))?;
    let out = stages::run_eval(&records, &out_dir)?;
    print_json(&out.metrics);

    let Some(sizes) = a.bench else {
        return Ok(());
    };
    let sizes = parse_sizes(&sizes)?;
    let largest = sizes.iter().copied().max().unwrap_or(0);
    let result: BenchResult = match (a.scope, &a.ontology) {
        (BenchScope::ReasonerOnly, Some(path)) => {
            let closure = build_closure(load_ontology(path)?);
            let concepts: Vec<ConceptRecord> = records
                .iter()
                .map(|r| ConceptRecord {
                    source_class: r.subject.clone(),
                    target_class: r.object.clone(),
                    user_label: r.user_label,
                    source_domain: r.source_domain.clone(),
                    link_id: r.link_id.clone(),
                })
                .collect();
            let mut w = ReasonerWorkload {
                closure: &closure,
                records: &concepts,
            };
            bench(&sizes, a.scope, a.runs, &mut w)?
        }
        (BenchScope::ReasonerOnly, None) => {
            let ontology = synth::bench_ontology(a.seed, 500, 100);
            let concepts = synth::concept_records(a.seed, &ontology, largest, 20);
            let closure = build_closure(ontology);
            let mut w = ReasonerWorkload {
                closure: &closure,
                records: &concepts,
            };
            bench(&sizes, a.scope, a.runs, &mut w)?
        }
        (BenchScope::Full, _) => {
            let data = pipeline::synthetic_full_bench(a.seed, largest)?;
            let mut w = FullWorkload {
                data: &data,
                match_config: MatchConfig::default(),
            };
            bench(&sizes, a.scope, a.runs, &mut w)?
        }
    };
    let csv = out_dir.join("bench.csv");
    std::fs::write(&csv, result.to_csv()).map_err(|e| Error::io(&csv, e))?;
    write_json(&out_dir.join("bench_fit.json"), &(&result.medians, &result.fit))?;
    for (size, millis) in &result.medians {
        println!("size {size}: median {millis:.3} ms");
    }
    if let Some(fit) = result.fit {
        println!(
            "fit: {:.6} ms/record + {:.3} ms, R^2 = {:.4}",
            fit.slope, fit.intercept, fit.r_squared
        );
    }
    Ok(())
}

use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::crawl::CrawlConfig;
use crate::features::NormalizationConfig;
use crate::matcher::MatchConfig;
use crate::topics::{Algorithm, TrainConfig};
use crate::{Error, Result};

/// Settings for a full pipeline run.
///
/// Read from a flat `key = value` file (`#` starts a comment). Relative
/// paths in the file are resolved against the file's directory. Later
/// [`PipelineConfig::set`] calls override earlier values, which is how
/// command-line flags take precedence over the file.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub workspace: PathBuf,
    pub seeds: Option<PathBuf>,
    /// Replay a stored site tree instead of fetching over HTTP.
    pub site_dir: Option<PathBuf>,
    pub ontology: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    /// Pretrained model; when absent the model is trained from `corpus`.
    pub model: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub max_pages: usize,
    pub max_depth: usize,
    pub delay_ms: u64,
    pub timeout_ms: u64,
    pub user_agent: Option<String>,
    pub stopwords: Option<PathBuf>,
    pub compounds: Option<PathBuf>,
    pub stemming: bool,
    pub casefold: bool,
    pub algorithm: Algorithm,
    pub folds: usize,
    pub split: f64,
    pub confidence_threshold: f64,
    pub alpha: f64,
    pub threshold: f64,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let crawl = CrawlConfig::default();
        let train = TrainConfig::default();
        let matching = MatchConfig::default();
        PipelineConfig {
            workspace: PathBuf::from("workspace"),
            seeds: None,
            site_dir: None,
            ontology: None,
            corpus: None,
            model: None,
            labels: None,
            max_pages: crawl.max_pages_per_domain,
            max_depth: crawl.max_depth,
            delay_ms: crawl.per_host_delay.as_millis() as u64,
            timeout_ms: crawl.fetch_timeout.as_millis() as u64,
            user_agent: None,
            stopwords: None,
            compounds: None,
            stemming: true,
            casefold: true,
            algorithm: train.algorithm,
            folds: train.folds,
            split: train.split,
            confidence_threshold: train.confidence_threshold,
            alpha: matching.string_weight,
            threshold: matching.accept_threshold,
            seed: train.seed,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!("invalid boolean `{value}` for `{key}`"))),
    }
}

impl PipelineConfig {
    pub const KEYS: [&'static str; 23] = [
        "workspace",
        "seeds",
        "site_dir",
        "ontology",
        "corpus",
        "model",
        "labels",
        "max_pages",
        "max_depth",
        "delay_ms",
        "timeout_ms",
        "user_agent",
        "stopwords",
        "compounds",
        "stemming",
        "casefold",
        "algorithm",
        "folds",
        "split",
        "confidence_threshold",
        "alpha",
        "threshold",
        "seed",
    ];

    /// Set one key. Relative paths are joined onto `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let value = value.trim();
        let path = || Some(base.join(value));
        match key {
            "workspace" => self.workspace = base.join(value),
            "seeds" => self.seeds = path(),
            "site_dir" => self.site_dir = path(),
            "ontology" => self.ontology = path(),
            "corpus" => self.corpus = path(),
            "model" => self.model = path(),
            "labels" => self.labels = path(),
            "max_pages" => self.max_pages = parse(key, value)?,
            "max_depth" => self.max_depth = parse(key, value)?,
            "delay_ms" => self.delay_ms = parse(key, value)?,
            "timeout_ms" => self.timeout_ms = parse(key, value)?,
            "user_agent" => self.user_agent = Some(value.to_string()),
            "stopwords" => self.stopwords = path(),
            "compounds" => self.compounds = path(),
            "stemming" => self.stemming = parse_bool(key, value)?,
            "casefold" => self.casefold = parse_bool(key, value)?,
            "algorithm" => self.algorithm = value.parse().map_err(Error::Config)?,
            "folds" => self.folds = parse(key, value)?,
            "split" => self.split = parse(key, value)?,
            "confidence_threshold" => self.confidence_threshold = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "threshold" => self.threshold = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            other => return Err(Error::Config(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str, base: &Path) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            self.set(k.trim(), v, base)
                .map_err(|e| Error::Config(format!("line {}: {}", i + 1, strip_prefix(&e))))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        let text = crate::io::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.apply_text(&text, base)?;
        Ok(cfg)
    }

    pub fn crawl_config(&self) -> CrawlConfig {
        let mut c = CrawlConfig {
            max_pages_per_domain: self.max_pages,
            max_depth: self.max_depth,
            per_host_delay: Duration::from_millis(self.delay_ms),
            fetch_timeout: Duration::from_millis(self.timeout_ms),
            ..CrawlConfig::default()
        };
        if let Some(ua) = &self.user_agent {
            c.user_agent = ua.clone();
        }
        c
    }

    pub fn normalization_config(&self) -> Result<NormalizationConfig> {
        let mut c = NormalizationConfig::default();
        if let Some(p) = &self.stopwords {
            c = c.with_stopwords_file(p)?;
        }
        if let Some(p) = &self.compounds {
            c = c.with_extra_compounds(p)?;
        }
        c.enable_stemming = self.stemming;
        c.enable_casefold = self.casefold;
        Ok(c)
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            algorithm: self.algorithm,
            split: self.split,
            folds: self.folds,
            seed: self.seed,
            confidence_threshold: self.confidence_threshold,
            ..TrainConfig::default()
        }
    }

    pub fn match_config(&self) -> MatchConfig {
        MatchConfig {
            accept_threshold: self.threshold,
            string_weight: self.alpha,
        }
    }

    pub fn require<'a>(&self, value: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
        value
            .as_deref()
            .ok_or_else(|| Error::Config(format!("`{key}` is not configured")))
    }
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_and_overrides() {
        let mut c = PipelineConfig::default();
        c.apply_text(
            "# fixture\nworkspace = out\nontology=onto.tsv\nalgorithm = nb\nfolds = 3\nstemming = no\n",
            Path::new("/cfg"),
        )
        .unwrap();
        assert_eq!(c.workspace, PathBuf::from("/cfg/out"));
        assert_eq!(c.ontology, Some(PathBuf::from("/cfg/onto.tsv")));
        assert_eq!(c.algorithm, Algorithm::NaiveBayes);
        assert!(!c.stemming);
        c.set("folds", "5", Path::new(".")).unwrap();
        assert_eq!(c.folds, 5);
    }

    #[test]
    fn errors_name_the_line() {
        let mut c = PipelineConfig::default();
        let e = c.apply_text("seed = 1\nbogus = 2\n", Path::new(".")).unwrap_err();
        assert_eq!(e.to_string(), "invalid configuration: line 2: unknown configuration key `bogus`");
        let e = c.apply_text("seed = x\n", Path::new(".")).unwrap_err();
        assert!(e.to_string().contains("line 1"));
    }
}

//! Breadth-first, polite, per-domain crawling and anchor extraction.

mod extract;
mod fetch;
mod robots;
mod store;
pub mod urls;

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::path::Path;
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

pub use extract::{extract_links, Extraction};
pub use fetch::{FetchError, Fetcher, HttpFetcher, Response, SiteDirFetcher};
pub use robots::RobotsRules;
pub use store::{
    read_links, write_crawl, write_links, PageIndexEntry, PageStore, FAILURES_FILE, INDEX_FILE,
    LINKS_FILE, PAGES_DIR,
};

const MAX_REDIRECTS: usize = 5;

#[derive(Debug, Error)]
pub enum CrawlError {
    #[error("invalid crawl configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}:{line}: invalid seed URL `{value}`")]
    BadSeed {
        path: String,
        line: usize,
        value: String,
    },
    #[error("no page could be fetched ({failures} failures)")]
    Unreachable { failures: usize },
}

impl CrawlError {
    pub fn is_network(&self) -> bool {
        matches!(self, CrawlError::Unreachable { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrawlConfig {
    pub seed_urls: Vec<Url>,
    pub max_pages_per_domain: usize,
    pub max_depth: usize,
    pub per_host_delay: Duration,
    pub fetch_timeout: Duration,
    pub user_agent: String,
}

impl Default for CrawlConfig {
    fn default() -> Self {
        CrawlConfig {
            seed_urls: Vec::new(),
            max_pages_per_domain: 100,
            max_depth: 3,
            per_host_delay: Duration::from_millis(1000),
            fetch_timeout: Duration::from_millis(10_000),
            user_agent: concat!("noisylink/", env!("CARGO_PKG_VERSION")).to_string(),
        }
    }
}

impl CrawlConfig {
    pub fn validate(&self) -> Result<(), CrawlError> {
        if self.seed_urls.is_empty() {
            return Err(CrawlError::InvalidConfig("no seed URLs".into()));
        }
        if self.max_pages_per_domain == 0 {
            return Err(CrawlError::InvalidConfig(
                "max_pages_per_domain must be at least 1".into(),
            ));
        }
        if let Some(bad) = self
            .seed_urls
            .iter()
            .find(|u| !urls::is_http(u) || u.host_str().is_none())
        {
            return Err(CrawlError::InvalidConfig(format!(
                "seed {bad} is not an absolute http(s) URL"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageSnapshot {
    pub url: String,
    /// URL that was enqueued; differs from `url` after redirects.
    pub requested_url: String,
    pub domain: String,
    pub fetch_status: u16,
    pub html: String,
    /// Milliseconds since the Unix epoch.
    pub fetched_at: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RawHyperlink {
    pub source_url: String,
    pub target_url: String,
    pub anchor_text: String,
    pub paragraph_text: String,
    pub source_domain: String,
    pub position_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchFailure {
    pub url: String,
    pub status: Option<u16>,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrawlOutput {
    pub pages: Vec<PageSnapshot>,
    pub links: Vec<RawHyperlink>,
    pub failures: Vec<FetchFailure>,
    /// Anchors dropped during extraction (empty, fragment-only, unresolvable).
    pub skipped_anchors: usize,
}

impl CrawlOutput {
    /// Sort pages by URL, links by (source, position), failures by URL and
    /// drop duplicates, so concurrent crawling cannot change the artifact.
    pub fn canonicalize(&mut self) {
        self.pages.sort_by(|a, b| a.url.cmp(&b.url));
        self.pages.dedup_by(|a, b| a.url == b.url);
        self.links.sort_by(|a, b| {
            (a.source_url.as_str(), a.position_index).cmp(&(b.source_url.as_str(), b.position_index))
        });
        self.links
            .dedup_by(|a, b| a.source_url == b.source_url && a.position_index == b.position_index);
        self.failures.sort_by(|a, b| a.url.cmp(&b.url).then(a.reason.cmp(&b.reason)));
    }

    fn merge(&mut self, other: CrawlOutput) {
        self.pages.extend(other.pages);
        self.links.extend(other.links);
        self.failures.extend(other.failures);
        self.skipped_anchors += other.skipped_anchors;
    }
}

/// Spaces requests to the same host by at least `delay`. Slots are reserved
/// under the lock, so concurrent callers are serialized per host.
pub struct HostThrottle {
    delay: Duration,
    next_slot: Mutex<HashMap<String, Instant>>,
}

impl HostThrottle {
    pub fn new(delay: Duration) -> Self {
        HostThrottle {
            delay,
            next_slot: Mutex::new(HashMap::new()),
        }
    }

    pub fn wait(&self, url: &Url) {
        let key = format!(
            "{}:{}",
            url.host_str().unwrap_or(""),
            url.port_or_known_default().unwrap_or(0)
        );
        let slot = {
            let mut map = self.next_slot.lock().expect("throttle lock poisoned");
            let now = Instant::now();
            let slot = map.get(&key).map_or(now, |t| (*t).max(now));
            map.insert(key, slot + self.delay);
            slot
        };
        let now = Instant::now();
        if slot > now {
            thread::sleep(slot - now);
        }
    }
}

/// Read a seed file: one absolute URL per line, `#` starts a comment.
pub fn read_seeds(path: &Path) -> crate::Result<Vec<Url>> {
    let text = crate::io::read_to_string(path)?;
    parse_seeds(&text, &path.display().to_string()).map_err(Into::into)
}

pub fn parse_seeds(text: &str, origin: &str) -> Result<Vec<Url>, CrawlError> {
    let mut seeds = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match urls::parse_normalized(line) {
            Ok(u) if urls::is_http(&u) && u.host_str().is_some() => seeds.push(u),
            _ => {
                return Err(CrawlError::BadSeed {
                    path: origin.to_string(),
                    line: idx + 1,
                    value: line.to_string(),
                })
            }
        }
    }
    Ok(seeds)
}

/// Crawl every seed. Seeds are grouped by registrable domain; domains are
/// crawled concurrently, each one breadth-first on its own thread.
pub fn crawl(config: &CrawlConfig, fetcher: &dyn Fetcher) -> Result<CrawlOutput, CrawlError> {
    config.validate()?;
    let mut by_domain: BTreeMap<String, Vec<Url>> = BTreeMap::new();
    for seed in &config.seed_urls {
        let domain = urls::domain_of(seed).unwrap_or_default();
        by_domain.entry(domain).or_default().push(urls::normalize(seed));
    }
    let throttle = HostThrottle::new(config.per_host_delay);
    let mut output = CrawlOutput::default();
    thread::scope(|scope| {
        let handles: Vec<_> = by_domain
            .iter()
            .map(|(domain, seeds)| {
                let throttle = &throttle;
                scope.spawn(move || crawl_site(config, domain, seeds, fetcher, throttle))
            })
            .collect();
        for h in handles {
            output.merge(h.join().expect("crawler thread panicked"));
        }
    });
    output.canonicalize();
    if output.pages.is_empty() && !output.failures.is_empty() {
        return Err(CrawlError::Unreachable {
            failures: output.failures.len(),
        });
    }
    Ok(output)
}

/// Breadth-first crawl restricted to the seed's registrable domain.
pub fn crawl_domain(
    config: &CrawlConfig,
    seed: &Url,
    fetcher: &dyn Fetcher,
) -> Result<CrawlOutput, CrawlError> {
    let cfg = CrawlConfig {
        seed_urls: vec![seed.clone()],
        ..config.clone()
    };
    cfg.validate()?;
    let domain = urls::domain_of(seed).unwrap_or_default();
    let throttle = HostThrottle::new(config.per_host_delay);
    let mut out = crawl_site(&cfg, &domain, &[urls::normalize(seed)], fetcher, &throttle);
    out.canonicalize();
    Ok(out)
}

struct Site<'a> {
    config: &'a CrawlConfig,
    fetcher: &'a dyn Fetcher,
    throttle: &'a HostThrottle,
    robots: HashMap<String, RobotsRules>,
}

impl Site<'_> {
    fn allowed(&mut self, url: &Url) -> bool {
        let origin = url.origin().ascii_serialization();
        if !self.robots.contains_key(&origin) {
            let rules = url
                .join("/robots.txt")
                .ok()
                .and_then(|robots_url| {
                    self.throttle.wait(&robots_url);
                    self.fetcher.fetch(&robots_url).ok()
                })
                .filter(|r| (200..300).contains(&r.status))
                .map(|r| RobotsRules::parse(&String::from_utf8_lossy(&r.body), &self.config.user_agent))
                .unwrap_or_else(RobotsRules::allow_all);
            self.robots.insert(origin.clone(), rules);
        }
        let path = match url.query() {
            Some(q) => format!("{}?{}", url.path(), q),
            None => url.path().to_string(),
        };
        self.robots[&origin].allows(&path)
    }

    /// Fetch with redirect following; returns the final URL and response.
    fn fetch(&mut self, start: &Url) -> Result<(Url, Response), FetchFailure> {
        let mut url = start.clone();
        for _ in 0..=MAX_REDIRECTS {
            self.throttle.wait(&url);
            let resp = self.fetcher.fetch(&url).map_err(|e| FetchFailure {
                url: url.to_string(),
                status: None,
                reason: e.message,
            })?;
            if !resp.is_redirect() {
                return Ok((url, resp));
            }
            let location = resp.location.as_deref().unwrap_or_default();
            let next = url.join(location).map_err(|_| FetchFailure {
                url: url.to_string(),
                status: Some(resp.status),
                reason: format!("bad redirect location `{location}`"),
            })?;
            url = urls::normalize(&next);
            if !self.allowed(&url) {
                return Err(FetchFailure {
                    url: url.to_string(),
                    status: None,
                    reason: "disallowed by robots.txt".into(),
                });
            }
        }
        Err(FetchFailure {
            url: start.to_string(),
            status: None,
            reason: format!("more than {MAX_REDIRECTS} redirects"),
        })
    }
}

fn crawl_site(
    config: &CrawlConfig,
    domain: &str,
    seeds: &[Url],
    fetcher: &dyn Fetcher,
    throttle: &HostThrottle,
) -> CrawlOutput {
    let mut site = Site {
        config,
        fetcher,
        throttle,
        robots: HashMap::new(),
    };
    let mut out = CrawlOutput::default();
    let mut frontier: VecDeque<(Url, usize)> = VecDeque::new();
    let mut seen: HashSet<String> = HashSet::new();
    for seed in seeds {
        if seen.insert(seed.to_string()) {
            frontier.push_back((seed.clone(), 0));
        }
    }
    let mut fetched: HashSet<String> = HashSet::new();

    while let Some((url, depth)) = frontier.pop_front() {
        if out.pages.len() >= config.max_pages_per_domain {
            break;
        }
        if !site.allowed(&url) {
            out.failures.push(FetchFailure {
                url: url.to_string(),
                status: None,
                reason: "disallowed by robots.txt".into(),
            });
            continue;
        }
        let (final_url, resp) = match site.fetch(&url) {
            Ok(r) => r,
            Err(f) => {
                log::warn!("fetch failed: {} ({})", f.url, f.reason);
                out.failures.push(f);
                continue;
            }
        };
        if !(200..300).contains(&resp.status) {
            out.failures.push(FetchFailure {
                url: url.to_string(),
                status: Some(resp.status),
                reason: format!("HTTP {}", resp.status),
            });
            continue;
        }
        if !urls::in_domain(&final_url, domain) {
            out.failures.push(FetchFailure {
                url: url.to_string(),
                status: Some(resp.status),
                reason: format!("redirected off-domain to {final_url}"),
            });
            continue;
        }
        if !fetched.insert(final_url.to_string()) {
            continue;
        }
        seen.insert(final_url.to_string());

        let html = if resp.is_html() {
            String::from_utf8_lossy(&resp.body).into_owned()
        } else {
            String::new()
        };
        let page_domain = urls::domain_of(&final_url).unwrap_or_default();
        if !html.is_empty() {
            let ex = extract_links(&html, &final_url, &page_domain);
            out.skipped_anchors += ex.skipped;
            for link in &ex.links {
                if depth >= config.max_depth {
                    break;
                }
                let Ok(target) = Url::parse(&link.target_url) else {
                    continue;
                };
                if urls::is_http(&target)
                    && urls::in_domain(&target, domain)
                    && seen.insert(target.to_string())
                {
                    frontier.push_back((target, depth + 1));
                }
            }
            out.links.extend(ex.links);
        }
        out.pages.push(PageSnapshot {
            url: final_url.to_string(),
            requested_url: url.to_string(),
            domain: page_domain,
            fetch_status: resp.status,
            html,
            fetched_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis() as u64)
                .unwrap_or(0),
        });
    }
    out
}

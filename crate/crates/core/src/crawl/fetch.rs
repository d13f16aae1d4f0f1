use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Duration;

use url::Url;

const MAX_BODY_BYTES: u64 = 8 * 1024 * 1024;

/// One HTTP exchange without redirect handling; the crawler follows
/// `Location` itself so every hop goes through host throttling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub content_type: Option<String>,
    pub location: Option<String>,
    pub body: Vec<u8>,
}

impl Response {
    pub fn is_html(&self) -> bool {
        match &self.content_type {
            Some(ct) => {
                let ct = ct.to_ascii_lowercase();
                ct.starts_with("text/html") || ct.starts_with("application/xhtml")
            }
            None => true,
        }
    }

    pub fn is_redirect(&self) -> bool {
        (300..400).contains(&self.status) && self.location.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{url}: {message}")]
pub struct FetchError {
    pub url: String,
    pub message: String,
}

pub trait Fetcher: Send + Sync {
    fn fetch(&self, url: &Url) -> Result<Response, FetchError>;
}

/// Live HTTP(S) fetcher.
pub struct HttpFetcher {
    agent: ureq::Agent,
}

impl HttpFetcher {
    pub fn new(user_agent: &str, timeout: Duration) -> Self {
        let agent = ureq::AgentBuilder::new()
            .redirects(0)
            .timeout(timeout)
            .user_agent(user_agent)
            .build();
        HttpFetcher { agent }
    }
}

impl Fetcher for HttpFetcher {
    fn fetch(&self, url: &Url) -> Result<Response, FetchError> {
        let resp = match self.agent.get(url.as_str()).call() {
            Ok(r) => r,
            Err(ureq::Error::Status(_, r)) => r,
            Err(ureq::Error::Transport(t)) => {
                return Err(FetchError {
                    url: url.to_string(),
                    message: t.to_string(),
                })
            }
        };
        let status = resp.status();
        let content_type = resp.header("content-type").map(str::to_string);
        let location = resp.header("location").map(str::to_string);
        let mut body = Vec::new();
        resp.into_reader()
            .take(MAX_BODY_BYTES)
            .read_to_end(&mut body)
            .map_err(|e| FetchError {
                url: url.to_string(),
                message: e.to_string(),
            })?;
        Ok(Response {
            status,
            content_type,
            location,
            body,
        })
    }
}

/// Serves a stored site from disk: `http://host/a/b.html` maps to
/// `<root>/host/a/b.html`, and paths ending in `/` map to `index.html`.
/// Missing files answer 404. Used to replay crawls offline.
pub struct SiteDirFetcher {
    root: PathBuf,
}

impl SiteDirFetcher {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        SiteDirFetcher { root: root.into() }
    }

    fn resolve(&self, url: &Url) -> Option<PathBuf> {
        let host = url.host_str()?;
        let mut path = self.root.join(host);
        for seg in url.path_segments()? {
            if seg.is_empty() {
                continue;
            }
            if seg == ".." || seg.contains('\\') {
                return None;
            }
            path.push(seg);
        }
        if url.path().ends_with('/') || path.is_dir() {
            path.push("index.html");
        }
        Some(path)
    }
}

fn content_type_for(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        None | Some("html") | Some("htm") => "text/html; charset=utf-8",
        Some("txt") => "text/plain",
        _ => "application/octet-stream",
    }
}

impl Fetcher for SiteDirFetcher {
    fn fetch(&self, url: &Url) -> Result<Response, FetchError> {
        let not_found = Response {
            status: 404,
            content_type: Some("text/plain".into()),
            location: None,
            body: Vec::new(),
        };
        let Some(path) = self.resolve(url) else {
            return Ok(not_found);
        };
        match fs::read(&path) {
            Ok(body) => Ok(Response {
                status: 200,
                content_type: Some(content_type_for(&path).into()),
                location: None,
                body,
            }),
            Err(_) => Ok(not_found),
        }
    }
}

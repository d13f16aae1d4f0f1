//! On-disk layout of a crawl:
//!
//! ```text
//! <dir>/links_raw.jsonl
//! <dir>/crawl_failures.jsonl
//! <dir>/pages/index.jsonl
//! <dir>/pages/<sha256 of html>.html
//! ```

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CrawlOutput, RawHyperlink};
use crate::io::{read_jsonl, sha256_hex, write_jsonl};
use crate::{Error, Result};

pub const LINKS_FILE: &str = "links_raw.jsonl";
pub const FAILURES_FILE: &str = "crawl_failures.jsonl";
pub const PAGES_DIR: &str = "pages";
pub const INDEX_FILE: &str = "index.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageIndexEntry {
    pub url: String,
    pub requested_url: String,
    pub domain: String,
    pub fetch_status: u16,
    pub fetched_at: u64,
    pub file: String,
}

/// Write pages, the page index, failures, and `links_raw.jsonl` under `dir`.
pub fn write_crawl(dir: &Path, output: &CrawlOutput) -> Result<()> {
    let pages_dir = dir.join(PAGES_DIR);
    fs::create_dir_all(&pages_dir).map_err(|e| Error::io(&pages_dir, e))?;
    let mut index = Vec::with_capacity(output.pages.len());
    for page in &output.pages {
        let file = format!("{}.html", sha256_hex(page.html.as_bytes()));
        let path = pages_dir.join(&file);
        if !path.exists() {
            fs::write(&path, page.html.as_bytes()).map_err(|e| Error::io(&path, e))?;
        }
        index.push(PageIndexEntry {
            url: page.url.clone(),
            requested_url: page.requested_url.clone(),
            domain: page.domain.clone(),
            fetch_status: page.fetch_status,
            fetched_at: page.fetched_at,
            file,
        });
    }
    write_jsonl(&pages_dir.join(INDEX_FILE), &index)?;
    write_jsonl(&dir.join(FAILURES_FILE), &output.failures)?;
    write_links(&dir.join(LINKS_FILE), &output.links)
}

pub fn write_links(path: &Path, links: &[RawHyperlink]) -> Result<()> {
    write_jsonl(path, links)
}

pub fn read_links(path: &Path) -> Result<Vec<RawHyperlink>> {
    read_jsonl(path)
}

/// Read-only view over a stored crawl, addressable by final or requested URL.
#[derive(Debug, Clone)]
pub struct PageStore {
    dir: PathBuf,
    by_url: HashMap<String, String>,
}

impl PageStore {
    pub fn open(pages_dir: &Path) -> Result<Self> {
        let entries: Vec<PageIndexEntry> = read_jsonl(&pages_dir.join(INDEX_FILE))?;
        let mut by_url = HashMap::new();
        for e in entries {
            by_url.entry(e.requested_url.clone()).or_insert_with(|| e.file.clone());
            by_url.insert(e.url, e.file);
        }
        Ok(PageStore {
            dir: pages_dir.to_path_buf(),
            by_url,
        })
    }

    pub fn contains(&self, url: &str) -> bool {
        self.by_url.contains_key(url)
    }

    pub fn html(&self, url: &str) -> Result<Option<String>> {
        match self.by_url.get(url) {
            Some(file) => {
                let path = self.dir.join(file);
                let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
                Ok(Some(String::from_utf8_lossy(&bytes).into_owned()))
            }
            None => Ok(None),
        }
    }

    pub fn len(&self) -> usize {
        self.by_url.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_url.is_empty()
    }
}

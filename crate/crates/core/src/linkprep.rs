//! Removal of hyperlinks the text-based analysis cannot use: media targets,
//! non-HTTP schemes, empty anchors, links back to the same page, and
//! repeated links.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use url::Url;

use crate::crawl::RawHyperlink;

/// Target path extensions treated as media (matched case-insensitively).
pub const MEDIA_EXTENSIONS: &[&str] = &[
    "jpg", "jpeg", "png", "gif", "svg", "webp", "bmp", "ico", "mp3", "wav", "ogg", "flac", "mp4",
    "avi", "mkv", "mov", "webm", "pdf", "zip", "rar", "gz", "exe",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RemovalReason {
    MediaTarget,
    Duplicate,
    EmptyAnchor,
    SelfFragment,
    NonHttp,
}

impl RemovalReason {
    pub const ALL: [RemovalReason; 5] = [
        RemovalReason::MediaTarget,
        RemovalReason::Duplicate,
        RemovalReason::EmptyAnchor,
        RemovalReason::SelfFragment,
        RemovalReason::NonHttp,
    ];
}

impl fmt::Display for RemovalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RemovalReason::MediaTarget => "MEDIA_TARGET",
            RemovalReason::Duplicate => "DUPLICATE",
            RemovalReason::EmptyAnchor => "EMPTY_ANCHOR",
            RemovalReason::SelfFragment => "SELF_FRAGMENT",
            RemovalReason::NonHttp => "NON_HTTP",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub input_count: usize,
    pub kept_count: usize,
    pub removed_by_reason: BTreeMap<RemovalReason, usize>,
}

impl FilterReport {
    fn new(input_count: usize) -> Self {
        FilterReport {
            input_count,
            kept_count: 0,
            removed_by_reason: RemovalReason::ALL.iter().map(|r| (*r, 0)).collect(),
        }
    }

    pub fn removed(&self) -> usize {
        self.removed_by_reason.values().sum()
    }

    pub fn kept_ratio(&self) -> f64 {
        if self.input_count == 0 {
            return 1.0;
        }
        self.kept_count as f64 / self.input_count as f64
    }
}

/// Reason a single link would be dropped, ignoring duplication.
pub fn rejection(link: &RawHyperlink) -> Option<RemovalReason> {
    let Ok(target) = Url::parse(&link.target_url) else {
        return Some(RemovalReason::NonHttp);
    };
    if !matches!(target.scheme(), "http" | "https") {
        return Some(RemovalReason::NonHttp);
    }
    if is_media_path(target.path()) {
        return Some(RemovalReason::MediaTarget);
    }
    if link.anchor_text.split_whitespace().next().is_none() {
        return Some(RemovalReason::EmptyAnchor);
    }
    let mut target = target;
    target.set_fragment(None);
    if let Ok(mut source) = Url::parse(&link.source_url) {
        source.set_fragment(None);
        if source == target {
            return Some(RemovalReason::SelfFragment);
        }
    }
    None
}

pub fn is_media_path(path: &str) -> bool {
    let last = path.rsplit('/').next().unwrap_or("");
    match last.rsplit_once('.') {
        Some((_, ext)) => MEDIA_EXTENSIONS
            .iter()
            .any(|m| m.eq_ignore_ascii_case(ext)),
        None => false,
    }
}

/// Keep text hyperlinks only, preserving order. Duplicates are keyed by
/// (source_url, target_url, anchor_text); the first occurrence survives.
pub fn filter_links(links: &[RawHyperlink]) -> (Vec<RawHyperlink>, FilterReport) {
    let mut report = FilterReport::new(links.len());
    let mut seen: HashSet<(&str, &str, &str)> = HashSet::new();
    let mut kept = Vec::new();
    for link in links {
        let reason = rejection(link).or_else(|| {
            let key = (
                link.source_url.as_str(),
                link.target_url.as_str(),
                link.anchor_text.as_str(),
            );
            (!seen.insert(key)).then_some(RemovalReason::Duplicate)
        });
        match reason {
            Some(r) => *report.removed_by_reason.entry(r).or_default() += 1,
            None => kept.push(link.clone()),
        }
    }
    report.kept_count = kept.len();
    (kept, report)
}

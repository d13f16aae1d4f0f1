//! Feature extraction for a hyperlink's source context and its target page.
//!
//! Target page: title, keyword metadata, first-level heading.
//! Source context: title, keyword metadata, anchor text, paragraph text.

pub mod porter;
mod text;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crawl::{PageStore, RawHyperlink};
use crate::dom;
use crate::io::sha256_hex;

pub use text::{
    normalize_text, parse_compounds, parse_stopwords, tokenize, CompoundRule,
    NormalizationConfig, Normalizer, TokenPattern,
};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("stale snapshot for {source_url}: no anchor at position {position_index} pointing to {target_url}")]
    StaleSnapshot {
        source_url: String,
        target_url: String,
        position_index: usize,
    },
    #[error("no snapshot stored for source page {0}")]
    MissingSource(String),
    #[error("compound table line {line}: {message}")]
    CompoundTable { line: usize, message: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetFeatures {
    pub page_title: String,
    pub keyword_metadata: String,
    pub first_level_heading: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextFeatures {
    pub page_title: String,
    pub keyword_metadata: String,
    pub anchor_text: String,
    pub paragraph_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub link_id: String,
    pub source_domain: String,
    pub context: ContextFeatures,
    pub target: TargetFeatures,
    pub context_tokens: Vec<String>,
    pub target_tokens: Vec<String>,
}

/// Stable identifier of a hyperlink: first 16 hex digits of
/// SHA-256(`source_url` LF `position_index`).
pub fn link_id(link: &RawHyperlink) -> String {
    let key = format!("{}\n{}", link.source_url, link.position_index);
    sha256_hex(key.as_bytes())[..16].to_string()
}

pub fn extract_target_features(html: &str) -> TargetFeatures {
    let doc = dom::parse(html);
    TargetFeatures {
        page_title: dom::title(&doc),
        keyword_metadata: dom::meta_keywords(&doc),
        first_level_heading: dom::first_heading(&doc),
    }
}

pub fn extract_context_features(
    html: &str,
    link: &RawHyperlink,
) -> Result<ContextFeatures, FeatureError> {
    let doc = dom::parse(html);
    let stale = || FeatureError::StaleSnapshot {
        source_url: link.source_url.clone(),
        target_url: link.target_url.clone(),
        position_index: link.position_index,
    };
    let anchor = dom::anchors(&doc).nth(link.position_index).ok_or_else(stale)?;
    let anchor_text = dom::visible_text(anchor);
    if anchor_text != link.anchor_text {
        return Err(stale());
    }
    Ok(ContextFeatures {
        page_title: dom::title(&doc),
        keyword_metadata: dom::meta_keywords(&doc),
        anchor_text,
        paragraph_text: dom::paragraph_context(anchor),
    })
}

impl ContextFeatures {
    pub fn tokens(&self, normalizer: &Normalizer) -> Vec<String> {
        [
            &self.page_title,
            &self.keyword_metadata,
            &self.anchor_text,
            &self.paragraph_text,
        ]
        .iter()
        .flat_map(|field| normalizer.normalize(field))
        .collect()
    }
}

impl TargetFeatures {
    pub fn tokens(&self, normalizer: &Normalizer) -> Vec<String> {
        [
            &self.page_title,
            &self.keyword_metadata,
            &self.first_level_heading,
        ]
        .iter()
        .flat_map(|field| normalizer.normalize(field))
        .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureReport {
    pub links: usize,
    /// Links whose target page is not in the snapshot store.
    pub target_missing: usize,
}

/// Build one [`FeatureRecord`] per link, ordered by `link_id`. Target pages
/// absent from the store get empty target features.
pub fn build_features(
    links: &[RawHyperlink],
    pages: &PageStore,
    normalizer: &Normalizer,
) -> crate::Result<(Vec<FeatureRecord>, FeatureReport)> {
    let mut target_cache: BTreeMap<&str, TargetFeatures> = BTreeMap::new();
    let mut source_cache: BTreeMap<&str, String> = BTreeMap::new();
    let mut report = FeatureReport {
        links: links.len(),
        target_missing: 0,
    };
    let mut records = Vec::with_capacity(links.len());

    for link in links {
        if !source_cache.contains_key(link.source_url.as_str()) {
            let html = pages
                .html(&link.source_url)?
                .ok_or_else(|| FeatureError::MissingSource(link.source_url.clone()))?;
            source_cache.insert(&link.source_url, html);
        }
        let context = extract_context_features(&source_cache[link.source_url.as_str()], link)?;

        if !target_cache.contains_key(link.target_url.as_str()) {
            let target = match pages.html(&link.target_url)? {
                Some(html) => extract_target_features(&html),
                None => TargetFeatures::default(),
            };
            target_cache.insert(&link.target_url, target);
        }
        if !pages.contains(&link.target_url) {
            report.target_missing += 1;
        }
        let target = target_cache[link.target_url.as_str()].clone();

        records.push(FeatureRecord {
            link_id: link_id(link),
            source_domain: link.source_domain.clone(),
            context_tokens: context.tokens(normalizer),
            target_tokens: target.tokens(normalizer),
            context,
            target,
        });
    }
    records.sort_by(|a, b| a.link_id.cmp(&b.link_id));
    Ok((records, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FILEHIPPO: &str = r#"<html><head>
        <title>Download free Software</title>
        <meta name="keywords" content="download software freeware shareware program">
        </head><body>
        <h1>Software</h1>
        <p>The Latest Versions of the <a href="/new">New Software</a></p>
        <h1>Second heading</h1>
        </body></html>"#;

    fn link(pos: usize, anchor: &str) -> RawHyperlink {
        RawHyperlink {
            source_url: "http://filehippo.example/".into(),
            target_url: "http://filehippo.example/new".into(),
            anchor_text: anchor.into(),
            paragraph_text: String::new(),
            source_domain: "filehippo.example".into(),
            position_index: pos,
        }
    }

    #[test]
    fn target_features_of_software_page() {
        let f = extract_target_features(FILEHIPPO);
        assert_eq!(f.page_title, "Download free Software");
        assert_eq!(f.keyword_metadata, "download software freeware shareware program");
        assert_eq!(f.first_level_heading, "Software");
    }

    #[test]
    fn absent_tags_give_empty_fields() {
        assert_eq!(extract_target_features("<html></html>"), TargetFeatures::default());
    }

    #[test]
    fn context_features_of_anchor() {
        let c = extract_context_features(FILEHIPPO, &link(0, "New Software")).unwrap();
        assert_eq!(c.anchor_text, "New Software");
        assert_eq!(c.paragraph_text, "The Latest Versions of the New Software");
        assert_eq!(c.page_title, "Download free Software");
    }

    #[test]
    fn body_child_anchor_falls_back_to_body_text() {
        let html = r#"<body>Intro text <a href="/x">x</a> trailing</body>"#;
        let c = extract_context_features(html, &link(0, "x")).unwrap();
        assert_eq!(c.paragraph_text, "Intro text x trailing");
    }

    #[test]
    fn missing_anchor_is_stale() {
        let err = extract_context_features(FILEHIPPO, &link(3, "New Software")).unwrap_err();
        assert!(matches!(err, FeatureError::StaleSnapshot { .. }));
        let err = extract_context_features(FILEHIPPO, &link(0, "Changed")).unwrap_err();
        assert!(matches!(err, FeatureError::StaleSnapshot { .. }));
    }

    #[test]
    fn link_ids_are_stable_and_distinct() {
        let a = link_id(&link(0, "a"));
        assert_eq!(a, link_id(&link(0, "b")));
        assert_ne!(a, link_id(&link(1, "a")));
        assert_eq!(a.len(), 16);
    }
}

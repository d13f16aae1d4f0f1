use url::Url;

use super::urls;
use super::RawHyperlink;
use crate::dom;

/// Links found on one page plus the number of anchors that were skipped
/// because their `href` was empty, fragment-only, or unresolvable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extraction {
    pub links: Vec<RawHyperlink>,
    pub skipped: usize,
}

pub fn extract_links(html: &str, base_url: &Url, source_domain: &str) -> Extraction {
    let doc = dom::parse(html);
    let source_url = urls::normalize(base_url);
    let mut out = Extraction::default();

    for (position, anchor) in dom::anchors(&doc).enumerate() {
        let href = anchor.value().attr("href").unwrap_or("").trim();
        if href.is_empty() || href.starts_with('#') {
            out.skipped += 1;
            continue;
        }
        let Ok(target) = base_url.join(href) else {
            out.skipped += 1;
            continue;
        };
        out.links.push(RawHyperlink {
            source_url: source_url.to_string(),
            target_url: urls::normalize(&target).to_string(),
            anchor_text: dom::visible_text(anchor),
            paragraph_text: dom::paragraph_context(anchor),
            source_domain: source_domain.to_string(),
            position_index: position,
        });
    }
    out
}

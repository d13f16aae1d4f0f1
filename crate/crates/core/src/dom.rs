//! Lenient HTML helpers built on `scraper` (html5ever).
//!
//! Anchors are addressed by their ordinal among `<a href=…>` elements in
//! document order. Both the crawler and the feature extractor go through
//! [`anchors`] so the ordinal is stable between the two.

use std::sync::OnceLock;

use ego_tree::NodeRef;
use scraper::{ElementRef, Html, Node, Selector};

/// Maximum length, in characters, of a hyperlink's paragraph context.
pub const PARAGRAPH_CHAR_LIMIT: usize = 500;

const SKIPPED: &[&str] = &["script", "style", "noscript", "template", "head"];
const BLOCKS: &[&str] = &[
    "address", "article", "aside", "blockquote", "body", "br", "dd", "div", "dl", "dt",
    "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6",
    "header", "hr", "li", "main", "nav", "ol", "p", "pre", "section", "table", "td", "th",
    "tr", "ul",
];
const CONTEXT_FALLBACK: &[&str] = &["div", "li", "td", "section", "article"];

fn selector(cell: &'static OnceLock<Selector>, css: &str) -> &'static Selector {
    cell.get_or_init(|| Selector::parse(css).expect("static selector"))
}

pub fn parse(html: &str) -> Html {
    Html::parse_document(html)
}

/// All anchor elements carrying an `href` attribute, in document order.
pub fn anchors(doc: &Html) -> impl Iterator<Item = ElementRef<'_>> {
    static SEL: OnceLock<Selector> = OnceLock::new();
    doc.select(selector(&SEL, "a[href]"))
}

/// Text of the first `<title>`, whitespace-collapsed.
pub fn title(doc: &Html) -> String {
    static SEL: OnceLock<Selector> = OnceLock::new();
    doc.select(selector(&SEL, "title"))
        .next()
        .map(|t| collapse_whitespace(&t.text().collect::<String>()))
        .unwrap_or_default()
}

/// `content` of the first `<meta name="keywords">`; the name is matched
/// case-insensitively.
pub fn meta_keywords(doc: &Html) -> String {
    static SEL: OnceLock<Selector> = OnceLock::new();
    doc.select(selector(&SEL, "meta[name]"))
        .find(|m| {
            m.value()
                .attr("name")
                .is_some_and(|n| n.trim().eq_ignore_ascii_case("keywords"))
        })
        .and_then(|m| m.value().attr("content"))
        .map(collapse_whitespace)
        .unwrap_or_default()
}

pub fn first_heading(doc: &Html) -> String {
    static SEL: OnceLock<Selector> = OnceLock::new();
    doc.select(selector(&SEL, "h1"))
        .next()
        .map(visible_text)
        .unwrap_or_default()
}

/// Rendered text of an element: script/style content dropped, block
/// boundaries turned into spaces, whitespace collapsed.
pub fn visible_text(el: ElementRef<'_>) -> String {
    let mut buf = String::new();
    push_text(*el, &mut buf);
    collapse_whitespace(&buf)
}

fn push_text(node: NodeRef<'_, Node>, buf: &mut String) {
    for child in node.children() {
        match child.value() {
            Node::Text(t) => buf.push_str(t),
            Node::Element(e) => {
                let name = e.name();
                if SKIPPED.contains(&name) {
                    continue;
                }
                let block = BLOCKS.contains(&name);
                if block {
                    buf.push(' ');
                }
                push_text(child, buf);
                if block {
                    buf.push(' ');
                }
            }
            _ => {}
        }
    }
}

/// Context paragraph of an anchor: the nearest enclosing `<p>`, else the
/// nearest enclosing div/li/td/section/article, else `<body>`. Truncated to
/// [`PARAGRAPH_CHAR_LIMIT`] characters.
pub fn paragraph_context(anchor: ElementRef<'_>) -> String {
    let ancestors: Vec<ElementRef<'_>> = anchor.ancestors().filter_map(ElementRef::wrap).collect();
    let container = ancestors
        .iter()
        .find(|e| e.value().name() == "p")
        .or_else(|| {
            ancestors
                .iter()
                .find(|e| CONTEXT_FALLBACK.contains(&e.value().name()))
        })
        .or_else(|| ancestors.iter().find(|e| e.value().name() == "body"))
        .or_else(|| ancestors.last());
    match container {
        Some(el) => truncate_chars(&visible_text(*el), PARAGRAPH_CHAR_LIMIT),
        None => String::new(),
    }
}

pub fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn truncate_chars(s: &str, limit: usize) -> String {
    match s.char_indices().nth(limit) {
        Some((idx, _)) => s[..idx].trim_end().to_string(),
        None => s.to_string(),
    }
}

use url::Url;

/// Canonical form used as a dedup key: scheme and host lower-cased, default
/// port and fragment removed, dot segments resolved. The query is kept.
///
/// `Url::parse` already performs everything except fragment removal.
pub fn normalize(url: &Url) -> Url {
    let mut url = url.clone();
    url.set_fragment(None);
    url
}

pub fn parse_normalized(s: &str) -> Result<Url, url::ParseError> {
    Url::parse(s.trim()).map(|u| normalize(&u))
}

/// Registrable part of a host. Without a public-suffix table this is the
/// host with a leading `www.` removed.
pub fn registrable_domain(host: &str) -> String {
    let host = host.trim_end_matches('.').to_ascii_lowercase();
    match host.strip_prefix("www.") {
        Some(rest) if !rest.is_empty() => rest.to_string(),
        _ => host,
    }
}

pub fn domain_of(url: &Url) -> Option<String> {
    url.host_str().map(registrable_domain)
}

/// True when `url` belongs to `domain` or one of its subdomains.
pub fn in_domain(url: &Url, domain: &str) -> bool {
    match domain_of(url) {
        Some(d) => d == domain || d.ends_with(&format!(".{domain}")),
        None => false,
    }
}

pub fn is_http(url: &Url) -> bool {
    matches!(url.scheme(), "http" | "https")
}

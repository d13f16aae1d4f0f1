//! Token normalization: tokenization, case folding, stop-word removal,
//! compound unification and Porter stemming.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use super::porter;
use super::FeatureError;

const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");
const DEFAULT_COMPOUNDS: &str = include_str!("../../data/compounds.tsv");

/// How token boundaries are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TokenPattern {
    /// Maximal runs of letters/digits; a hyphen between two such runs joins
    /// them into one token (`e-mail`).
    #[default]
    AlphanumericHyphenated,
    /// Maximal runs of letters/digits; hyphens always split.
    Alphanumeric,
}

/// One compound word and the spellings that should collapse onto it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompoundRule {
    pub canonical: String,
    pub variants: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct NormalizationConfig {
    pub stopword_list: BTreeSet<String>,
    pub enable_stemming: bool,
    pub enable_casefold: bool,
    pub token_pattern: TokenPattern,
    pub compounds: Vec<CompoundRule>,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        NormalizationConfig {
            stopword_list: parse_stopwords(DEFAULT_STOPWORDS),
            enable_stemming: true,
            enable_casefold: true,
            token_pattern: TokenPattern::default(),
            compounds: parse_compounds(DEFAULT_COMPOUNDS).expect("bundled compound table"),
        }
    }
}

impl NormalizationConfig {
    pub fn with_stopwords_file(mut self, path: &Path) -> crate::Result<Self> {
        self.stopword_list = parse_stopwords(&crate::io::read_to_string(path)?);
        Ok(self)
    }

    pub fn with_extra_compounds(mut self, path: &Path) -> crate::Result<Self> {
        let extra = parse_compounds(&crate::io::read_to_string(path)?)?;
        self.compounds.extend(extra);
        Ok(self)
    }
}

pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// Tab-separated lines: canonical form first, then variant spellings.
pub fn parse_compounds(text: &str) -> Result<Vec<CompoundRule>, FeatureError> {
    let mut rules = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t').map(str::trim);
        let canonical = fields.next().unwrap_or_default().to_lowercase();
        let variants: Vec<String> = fields.filter(|f| !f.is_empty()).map(str::to_lowercase).collect();
        if canonical.is_empty() || variants.is_empty() {
            return Err(FeatureError::CompoundTable {
                line: idx + 1,
                message: "expected a canonical form followed by at least one variant".into(),
            });
        }
        rules.push(CompoundRule { canonical, variants });
    }
    Ok(rules)
}

pub fn tokenize(text: &str, pattern: TokenPattern) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            cur.push(c);
            continue;
        }
        let hyphen = matches!(c, '-' | '\u{2010}' | '\u{2011}');
        let joins = hyphen
            && pattern == TokenPattern::AlphanumericHyphenated
            && !cur.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
        if joins {
            cur.push('-');
        } else if !cur.is_empty() {
            tokens.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

/// Stem to a fixpoint, treating hyphen-joined parts independently.
fn stem_token(token: &str) -> String {
    token
        .split('-')
        .map(|part| {
            let mut cur = part.to_string();
            loop {
                let next = porter::stem(&cur);
                if next == cur {
                    break cur;
                }
                cur = next;
            }
        })
        .collect::<Vec<_>>()
        .join("-")
}

/// Normalizes text to feature tokens. Built once per config so the
/// compound table is pre-processed.
#[derive(Debug, Clone)]
pub struct Normalizer {
    config: NormalizationConfig,
    /// keyed by first (matching-form) token; longest variants first
    compounds: HashMap<String, Vec<(Vec<String>, String)>>,
}

impl Normalizer {
    pub fn new(config: NormalizationConfig) -> Self {
        let mut n = Normalizer {
            config,
            compounds: HashMap::new(),
        };
        let mut table: HashMap<String, Vec<(Vec<String>, String)>> = HashMap::new();
        for rule in &n.config.compounds {
            let canonical = n.finish(&rule.canonical);
            let spellings = rule.variants.iter().chain(std::iter::once(&rule.canonical));
            for variant in spellings {
                let key: Vec<String> = tokenize(variant, n.config.token_pattern)
                    .iter()
                    .map(|t| t.to_lowercase())
                    .filter(|t| !n.is_stopword(t))
                    .map(|t| n.match_form(&t))
                    .collect();
                if let Some(first) = key.first() {
                    table
                        .entry(first.clone())
                        .or_default()
                        .push((key.clone(), canonical.clone()));
                }
            }
        }
        for entries in table.values_mut() {
            entries.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
            entries.dedup();
        }
        n.compounds = table;
        n
    }

    pub fn config(&self) -> &NormalizationConfig {
        &self.config
    }

    fn is_stopword(&self, token: &str) -> bool {
        self.config.stopword_list.contains(&token.to_lowercase())
    }

    /// Form used when comparing against compound variants.
    fn match_form(&self, token: &str) -> String {
        let lower = token.to_lowercase();
        if self.config.enable_stemming {
            stem_token(&lower)
        } else {
            lower
        }
    }

    /// Final output form of a surviving token.
    fn finish(&self, token: &str) -> String {
        let t = if self.config.enable_casefold {
            token.to_lowercase()
        } else {
            token.to_string()
        };
        if self.config.enable_stemming {
            stem_token(&t)
        } else {
            t
        }
    }

    pub fn normalize(&self, text: &str) -> Vec<String> {
        let tokens: Vec<String> = tokenize(text, self.config.token_pattern)
            .into_iter()
            .map(|t| {
                if self.config.enable_casefold {
                    t.to_lowercase()
                } else {
                    t
                }
            })
            .filter(|t| !self.is_stopword(t) && !self.is_stopword(&self.finish(t)))
            .collect();
        let forms: Vec<String> = tokens.iter().map(|t| self.match_form(t)).collect();

        let mut out = Vec::with_capacity(tokens.len());
        let mut i = 0;
        while i < tokens.len() {
            let hit = self.compounds.get(&forms[i]).and_then(|entries| {
                entries
                    .iter()
                    .find(|(key, _)| forms[i..].starts_with(key))
                    .map(|(key, canonical)| (key.len(), canonical.clone()))
            });
            match hit {
                Some((len, canonical)) => {
                    out.push(canonical);
                    i += len;
                }
                None => {
                    out.push(self.finish(&tokens[i]));
                    i += 1;
                }
            }
        }
        out
    }
}

/// Convenience wrapper building a [`Normalizer`] for a single call.
pub fn normalize_text(text: &str, config: &NormalizationConfig) -> Vec<String> {
    Normalizer::new(config.clone()).normalize(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(text: &str) -> Vec<String> {
        normalize_text(text, &NormalizationConfig::default())
    }

    #[test]
    fn bundled_stopword_count() {
        assert_eq!(NormalizationConfig::default().stopword_list.len(), 127);
    }

    #[test]
    fn stopwords_and_casefold() {
        assert_eq!(norm("the cat AND the dog"), vec!["cat", "dog"]);
    }

    #[test]
    fn inflections_share_a_stem() {
        let t = norm("organizes organized organizing");
        assert_eq!(t.len(), 3);
        assert!(t.iter().all(|s| s == &t[0]));
    }

    #[test]
    fn compound_spellings_unify() {
        assert_eq!(norm("anti discriminatory"), vec!["anti-discriminatori"]);
        assert_eq!(norm("nondiscriminatory"), vec!["anti-discriminatori"]);
        assert_eq!(norm("Anti-Discriminatory"), vec!["anti-discriminatori"]);
    }

    #[test]
    fn empty_input() {
        assert!(norm("").is_empty());
        assert!(norm("  ,;  ").is_empty());
    }

    #[test]
    fn tokenizer_hyphens() {
        assert_eq!(
            tokenize("e-mail -x y- a--b", TokenPattern::AlphanumericHyphenated),
            vec!["e-mail", "x", "y", "a", "b"]
        );
        assert_eq!(tokenize("e-mail", TokenPattern::Alphanumeric), vec!["e", "mail"]);
    }

    #[test]
    fn stemming_can_be_disabled() {
        let cfg = NormalizationConfig {
            enable_stemming: false,
            ..NormalizationConfig::default()
        };
        assert_eq!(normalize_text("Running dogs", &cfg), vec!["running", "dogs"]);
    }

    #[test]
    fn stem_that_is_a_stopword_is_dropped() {
        // "hes" is not a stop word but stems to "he", which is.
        assert_eq!(norm("hes cat"), vec!["cat"]);
    }

    #[test]
    fn compound_table_errors_carry_line() {
        let err = parse_compounds("# c\nonly-canonical\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}

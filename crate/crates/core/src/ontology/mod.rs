//! T-Box ontology snapshots: classes, subclass and equivalence axioms,
//! object properties with domain/range and class-level assertions.
//!
//! Snapshot lines hold three tab-separated fields:
//!
//! ```text
//! <iri>  rdf:type            owl:Class
//! <iri>  rdfs:label          "text"
//! <a>    rdfs:subClassOf     <b>
//! <a>    owl:equivalentClass <b>
//! <p>    rdf:type            owl:ObjectProperty
//! <p>    rdfs:domain         <c>
//! <p>    rdfs:range          <c>
//! <a>    <p>                 <b>
//! ```
//!
//! IRIs may be written bare or wrapped in angle brackets. Lines starting
//! with `#` are comments.

mod closure;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::path::Path;

use thiserror::Error;

pub use closure::{build_closure, OntologyClosure, QueryAnswer, QueryKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OntologyError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: unknown predicate keyword `{predicate}`")]
    UnknownPredicate { line: usize, predicate: String },
    #[error("line {line}: `{iri}` is declared a subclass of itself")]
    SelfSubclass { line: usize, iri: String },
    #[error("undeclared IRIs: {}", format_dangling(.0))]
    Dangling(Vec<(usize, String)>),
    #[error("`{0}` is not a declared class")]
    UndeclaredClass(String),
    #[error("unknown query kind `{0}` (expected EQUIVALENT, SUBCLASS, SUPERCLASS or RELATED)")]
    UnknownQueryKind(String),
}

fn format_dangling(items: &[(usize, String)]) -> String {
    items
        .iter()
        .map(|(line, iri)| {
            if *line == 0 {
                iri.clone()
            } else {
                format!("{iri} (line {line})")
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PropertyDecl {
    pub domain: Option<String>,
    pub range: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    /// Class IRI to optional human label.
    pub classes: BTreeMap<String, Option<String>>,
    /// `(sub, super)` pairs.
    pub subclass_axioms: BTreeSet<(String, String)>,
    /// Unordered pairs stored with the smaller IRI first.
    pub equivalence_axioms: BTreeSet<(String, String)>,
    pub object_properties: BTreeMap<String, PropertyDecl>,
    /// `(subject class, property, object class)`.
    pub property_assertions: BTreeSet<(String, String, String)>,
}

pub const RDF_TYPE: &str = "rdf:type";
pub const OWL_CLASS: &str = "owl:Class";
pub const OWL_OBJECT_PROPERTY: &str = "owl:ObjectProperty";
pub const RDFS_LABEL: &str = "rdfs:label";
pub const RDFS_SUBCLASS_OF: &str = "rdfs:subClassOf";
pub const OWL_EQUIVALENT_CLASS: &str = "owl:equivalentClass";
pub const RDFS_DOMAIN: &str = "rdfs:domain";
pub const RDFS_RANGE: &str = "rdfs:range";

const VOCABULARY_PREFIXES: [&str; 3] = ["rdf:", "rdfs:", "owl:"];

enum Statement {
    Class(String),
    Property(String),
    Label(String, String),
    SubClass(String, String),
    Equivalent(String, String),
    Domain(String, String),
    Range(String, String),
    Assertion(String, String, String),
}

fn strip_iri(field: &str) -> &str {
    let f = field.trim();
    f.strip_prefix('<')
        .and_then(|s| s.strip_suffix('>'))
        .unwrap_or(f)
}

fn parse_label(field: &str, line: usize) -> Result<String, OntologyError> {
    let f = field.trim();
    let body = f.strip_prefix('"').ok_or_else(|| OntologyError::Malformed {
        line,
        message: format!("label must be a quoted string, got `{f}`"),
    })?;
    let end = body.rfind('"').ok_or_else(|| OntologyError::Malformed {
        line,
        message: "unterminated label string".into(),
    })?;
    let rest = &body[end + 1..];
    if !(rest.is_empty() || rest.starts_with('@')) {
        return Err(OntologyError::Malformed {
            line,
            message: format!("unexpected text after label: `{rest}`"),
        });
    }
    Ok(body[..end].replace("\\\"", "\""))
}

fn parse_statement(raw: &str, line: usize) -> Result<Statement, OntologyError> {
    let fields: Vec<&str> = raw.split('\t').collect();
    if fields.len() != 3 {
        return Err(OntologyError::Malformed {
            line,
            message: format!("expected 3 tab-separated fields, found {}", fields.len()),
        });
    }
    let subject = strip_iri(fields[0]).to_string();
    let predicate = fields[1].trim();
    let object = fields[2].trim();
    if subject.is_empty() || predicate.is_empty() || object.is_empty() {
        return Err(OntologyError::Malformed {
            line,
            message: "empty field".into(),
        });
    }
    let obj = || strip_iri(object).to_string();
    Ok(match predicate {
        RDF_TYPE => match object {
            OWL_CLASS => Statement::Class(subject),
            OWL_OBJECT_PROPERTY => Statement::Property(subject),
            other => {
                return Err(OntologyError::Malformed {
                    line,
                    message: format!("unsupported rdf:type `{other}`"),
                })
            }
        },
        RDFS_LABEL => Statement::Label(subject, parse_label(object, line)?),
        RDFS_SUBCLASS_OF => {
            let sup = obj();
            if sup == subject {
                return Err(OntologyError::SelfSubclass { line, iri: subject });
            }
            Statement::SubClass(subject, sup)
        }
        OWL_EQUIVALENT_CLASS => Statement::Equivalent(subject, obj()),
        RDFS_DOMAIN => Statement::Domain(subject, obj()),
        RDFS_RANGE => Statement::Range(subject, obj()),
        p if VOCABULARY_PREFIXES.iter().any(|v| p.starts_with(v)) => {
            return Err(OntologyError::UnknownPredicate {
                line,
                predicate: p.to_string(),
            })
        }
        p => Statement::Assertion(subject, strip_iri(p).to_string(), obj()),
    })
}

pub fn parse_ontology(text: &str) -> Result<Ontology, OntologyError> {
    let mut statements = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        statements.push((line, parse_statement(raw.trim_end_matches('\r'), line)?));
    }

    let mut o = Ontology::default();
    for (_, s) in &statements {
        match s {
            Statement::Class(c) => {
                o.classes.entry(c.clone()).or_insert(None);
            }
            Statement::Property(p) => {
                o.object_properties.entry(p.clone()).or_default();
            }
            _ => {}
        }
    }

    let mut dangling: Vec<(usize, String)> = Vec::new();
    let need_class = |o: &Ontology, iri: &str, line: usize, out: &mut Vec<(usize, String)>| {
        if !o.classes.contains_key(iri) {
            out.push((line, iri.to_string()));
        }
    };
    for (line, s) in &statements {
        let line = *line;
        match s {
            Statement::Class(_) | Statement::Property(_) => {}
            Statement::Label(iri, label) => {
                if let Some(slot) = o.classes.get_mut(iri) {
                    *slot = Some(label.clone());
                } else if !o.object_properties.contains_key(iri) {
                    need_class(&o, iri, line, &mut dangling);
                }
            }
            Statement::SubClass(a, b) => {
                need_class(&o, a, line, &mut dangling);
                need_class(&o, b, line, &mut dangling);
                o.subclass_axioms.insert((a.clone(), b.clone()));
            }
            Statement::Equivalent(a, b) => {
                need_class(&o, a, line, &mut dangling);
                need_class(&o, b, line, &mut dangling);
                if a != b {
                    o.equivalence_axioms.insert(ordered(a, b));
                }
            }
            Statement::Domain(p, c) | Statement::Range(p, c) => {
                need_class(&o, c, line, &mut dangling);
                let is_domain = matches!(s, Statement::Domain(..));
                let Some(decl) = o.object_properties.get_mut(p) else {
                    dangling.push((line, p.clone()));
                    continue;
                };
                let slot = if is_domain { &mut decl.domain } else { &mut decl.range };
                match slot {
                    Some(prev) if prev != c => {
                        return Err(OntologyError::Malformed {
                            line,
                            message: format!(
                                "property `{p}` already has {} `{prev}`",
                                if is_domain { "domain" } else { "range" }
                            ),
                        })
                    }
                    _ => *slot = Some(c.clone()),
                }
            }
            Statement::Assertion(a, p, b) => {
                need_class(&o, a, line, &mut dangling);
                need_class(&o, b, line, &mut dangling);
                if !o.object_properties.contains_key(p) {
                    dangling.push((line, p.clone()));
                }
                o.property_assertions.insert((a.clone(), p.clone(), b.clone()));
            }
        }
    }
    if !dangling.is_empty() {
        dangling.sort();
        dangling.dedup_by(|x, y| x.1 == y.1);
        return Err(OntologyError::Dangling(dangling));
    }
    Ok(o)
}

pub fn load_ontology(path: &Path) -> crate::Result<Ontology> {
    let text = crate::io::read_to_string(path)?;
    Ok(parse_ontology(&text)?)
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl Ontology {
    pub fn add_class(&mut self, iri: &str, label: Option<&str>) {
        self.classes.insert(iri.to_string(), label.map(str::to_string));
    }

    pub fn add_subclass(&mut self, sub: &str, sup: &str) {
        self.subclass_axioms.insert((sub.to_string(), sup.to_string()));
    }

    pub fn add_equivalence(&mut self, a: &str, b: &str) {
        if a != b {
            self.equivalence_axioms.insert(ordered(a, b));
        }
    }

    pub fn add_property(&mut self, iri: &str, domain: Option<&str>, range: Option<&str>) {
        self.object_properties.insert(
            iri.to_string(),
            PropertyDecl {
                domain: domain.map(str::to_string),
                range: range.map(str::to_string),
            },
        );
    }

    pub fn add_assertion(&mut self, subject: &str, property: &str, object: &str) {
        self.property_assertions
            .insert((subject.to_string(), property.to_string(), object.to_string()));
    }

    pub fn axiom_count(&self) -> usize {
        self.subclass_axioms.len()
            + self.equivalence_axioms.len()
            + self.property_assertions.len()
            + self
                .object_properties
                .values()
                .map(|d| d.domain.is_some() as usize + d.range.is_some() as usize)
                .sum::<usize>()
    }

    /// Check the structural invariants for ontologies built in code.
    pub fn validate(&self) -> Result<(), OntologyError> {
        let mut dangling = BTreeSet::new();
        let class = |iri: &String, out: &mut BTreeSet<String>| {
            if !self.classes.contains_key(iri) {
                out.insert(iri.clone());
            }
        };
        for (a, b) in &self.subclass_axioms {
            if a == b {
                return Err(OntologyError::SelfSubclass { line: 0, iri: a.clone() });
            }
            class(a, &mut dangling);
            class(b, &mut dangling);
        }
        for (a, b) in &self.equivalence_axioms {
            class(a, &mut dangling);
            class(b, &mut dangling);
        }
        for d in self.object_properties.values() {
            for c in d.domain.iter().chain(&d.range) {
                class(c, &mut dangling);
            }
        }
        for (a, p, b) in &self.property_assertions {
            class(a, &mut dangling);
            class(b, &mut dangling);
            if !self.object_properties.contains_key(p) {
                dangling.insert(p.clone());
            }
        }
        if dangling.is_empty() {
            Ok(())
        } else {
            Err(OntologyError::Dangling(dangling.into_iter().map(|i| (0, i)).collect()))
        }
    }

    /// Serialize in the snapshot format, statements in a canonical order.
    pub fn to_snapshot(&self) -> String {
        let mut out = String::new();
        for (c, label) in &self.classes {
            let _ = writeln!(out, "<{c}>\t{RDF_TYPE}\t{OWL_CLASS}");
            if let Some(l) = label {
                let _ = writeln!(out, "<{c}>\t{RDFS_LABEL}\t\"{}\"", l.replace('"', "\\\""));
            }
        }
        for (p, d) in &self.object_properties {
            let _ = writeln!(out, "<{p}>\t{RDF_TYPE}\t{OWL_OBJECT_PROPERTY}");
            if let Some(c) = &d.domain {
                let _ = writeln!(out, "<{p}>\t{RDFS_DOMAIN}\t<{c}>");
            }
            if let Some(c) = &d.range {
                let _ = writeln!(out, "<{p}>\t{RDFS_RANGE}\t<{c}>");
            }
        }
        for (a, b) in &self.subclass_axioms {
            let _ = writeln!(out, "<{a}>\t{RDFS_SUBCLASS_OF}\t<{b}>");
        }
        for (a, b) in &self.equivalence_axioms {
            let _ = writeln!(out, "<{a}>\t{OWL_EQUIVALENT_CLASS}\t<{b}>");
        }
        for (a, p, b) in &self.property_assertions {
            let _ = writeln!(out, "<{a}>\t<{p}>\t<{b}>");
        }
        out
    }

    /// Label used for matching: the declared label, else the IRI's local
    /// name with CamelCase split into words.
    pub fn display_label(&self, iri: &str) -> Option<String> {
        let label = self.classes.get(iri)?;
        Some(match label {
            Some(l) => l.clone(),
            None => split_camel(local_name(iri)),
        })
    }
}

impl fmt::Display for Ontology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} classes, {} object properties, {} subclass axioms, {} equivalence axioms, {} property assertions",
            self.classes.len(),
            self.object_properties.len(),
            self.subclass_axioms.len(),
            self.equivalence_axioms.len(),
            self.property_assertions.len()
        )
    }
}

pub fn local_name(iri: &str) -> &str {
    iri.rsplit(['/', '#', ':']).next().unwrap_or(iri)
}

fn split_camel(name: &str) -> String {
    let mut out = String::new();
    let chars: Vec<char> = name.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        if c == '_' || c == '-' {
            out.push(' ');
            continue;
        }
        if i > 0 && c.is_uppercase() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            if prev.is_lowercase() || prev.is_ascii_digit() || (prev.is_uppercase() && next_lower) {
                out.push(' ');
            }
        }
        out.push(c);
    }
    out
}

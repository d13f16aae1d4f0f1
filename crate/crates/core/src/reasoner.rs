//! The usefulness rule. A link is useful when its source and target
//! concepts are equivalent, one is a subclass of the other, or an object
//! property relates them; the first property that holds, in that order, is
//! reported.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::matcher::ConceptRecord;
use crate::ontology::{OntologyClosure, OntologyError, QueryKind};
use crate::LinkLabel;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InferredProperty {
    EquivalentClass,
    SubclassOf,
    HasSuperclass,
    ObjectProperty(String),
    None,
}

impl InferredProperty {
    pub const BUCKETS: [&'static str; 5] = [
        "EQUIVALENT_CLASS",
        "SUBCLASS_OF",
        "HAS_SUPERCLASS",
        "OBJECT_PROPERTY",
        "NONE",
    ];

    /// Bucket name without the property IRI.
    pub fn bucket(&self) -> &'static str {
        match self {
            InferredProperty::EquivalentClass => Self::BUCKETS[0],
            InferredProperty::SubclassOf => Self::BUCKETS[1],
            InferredProperty::HasSuperclass => Self::BUCKETS[2],
            InferredProperty::ObjectProperty(_) => Self::BUCKETS[3],
            InferredProperty::None => Self::BUCKETS[4],
        }
    }
}

impl fmt::Display for InferredProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InferredProperty::ObjectProperty(p) => write!(f, "OBJECT_PROPERTY({p})"),
            other => f.write_str(other.bucket()),
        }
    }
}

impl FromStr for InferredProperty {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "EQUIVALENT_CLASS" => InferredProperty::EquivalentClass,
            "SUBCLASS_OF" => InferredProperty::SubclassOf,
            "HAS_SUPERCLASS" => InferredProperty::HasSuperclass,
            "NONE" => InferredProperty::None,
            _ => match s
                .strip_prefix("OBJECT_PROPERTY(")
                .and_then(|r| r.strip_suffix(')'))
            {
                Some(p) if !p.is_empty() => InferredProperty::ObjectProperty(p.to_string()),
                _ => return Err(format!("unknown inferred property `{s}`")),
            },
        })
    }
}

impl Serialize for InferredProperty {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InferredProperty {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub label: LinkLabel,
    pub property: InferredProperty,
    pub justification: Vec<String>,
}

pub fn classify_link(
    closure: &OntologyClosure,
    source: &str,
    target: &str,
) -> Result<Classification, OntologyError> {
    let checks = [
        (QueryKind::Equivalent, InferredProperty::EquivalentClass),
        (QueryKind::Subclass, InferredProperty::SubclassOf),
        (QueryKind::Superclass, InferredProperty::HasSuperclass),
    ];
    for (kind, property) in checks {
        let answer = closure.query(kind, source, target)?;
        if answer.holds {
            return Ok(Classification {
                label: LinkLabel::Useful,
                property,
                justification: answer.justification,
            });
        }
    }
    if let Some(p) = closure.related(source, target)?.into_iter().next() {
        let answer = closure.query(QueryKind::Related, source, target)?;
        return Ok(Classification {
            label: LinkLabel::Useful,
            property: InferredProperty::ObjectProperty(p),
            justification: answer.justification,
        });
    }
    Ok(Classification {
        label: LinkLabel::Noisy,
        property: InferredProperty::None,
        justification: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedRecord {
    pub subject: String,
    pub object: String,
    pub inferred_property: InferredProperty,
    pub reasoner_label: LinkLabel,
    pub source_domain: String,
    pub user_label: LinkLabel,
    pub link_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyBreakdown {
    pub total: usize,
    pub counts: BTreeMap<String, usize>,
    pub fractions: BTreeMap<String, f64>,
    /// Records per object property IRI within the OBJECT_PROPERTY bucket.
    pub object_properties: BTreeMap<String, usize>,
}

impl PropertyBreakdown {
    pub fn from_records(records: &[ClassifiedRecord]) -> Self {
        let mut counts: BTreeMap<String, usize> = InferredProperty::BUCKETS
            .iter()
            .map(|b| (b.to_string(), 0))
            .collect();
        let mut object_properties = BTreeMap::new();
        for r in records {
            *counts.get_mut(r.inferred_property.bucket()).expect("bucket") += 1;
            if let InferredProperty::ObjectProperty(p) = &r.inferred_property {
                *object_properties.entry(p.clone()).or_insert(0) += 1;
            }
        }
        let total = records.len();
        let fractions = counts
            .iter()
            .map(|(k, c)| {
                let f = if total == 0 { 0.0 } else { *c as f64 / total as f64 };
                (k.clone(), f)
            })
            .collect();
        PropertyBreakdown {
            total,
            counts,
            fractions,
            object_properties,
        }
    }
}

/// One classified record per input, in input order.
pub fn classify_dataset(
    records: &[ConceptRecord],
    closure: &OntologyClosure,
) -> Result<(Vec<ClassifiedRecord>, PropertyBreakdown), OntologyError> {
    let out = records
        .iter()
        .map(|r| {
            let c = classify_link(closure, &r.source_class, &r.target_class)?;
            Ok(ClassifiedRecord {
                subject: r.source_class.clone(),
                object: r.target_class.clone(),
                inferred_property: c.property,
                reasoner_label: c.label,
                source_domain: r.source_domain.clone(),
                user_label: r.user_label,
                link_id: r.link_id.clone(),
            })
        })
        .collect::<Result<Vec<_>, OntologyError>>()?;
    let breakdown = PropertyBreakdown::from_records(&out);
    Ok((out, breakdown))
}

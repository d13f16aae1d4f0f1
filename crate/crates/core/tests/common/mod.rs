//! Shared helpers for integration tests, including a brute-force reference
//! reasoner that works directly on the asserted axioms.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use noisylink::crawl::RawHyperlink;
use noisylink::ontology::Ontology;
use noisylink::reasoner::{ClassifiedRecord, InferredProperty};
use noisylink::LinkLabel;
use proptest::prelude::*;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub const DBO: &str = "http://dbpedia.org/ontology/";

pub fn dbo(local: &str) -> String {
    format!("{DBO}{local}")
}

/// Reference relation tables computed with dense boolean matrices and
/// Warshall's algorithm.
pub struct Oracle {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
    eq: Vec<Vec<bool>>,
    sub: Vec<Vec<bool>>,
    ontology: Ontology,
}

fn warshall(m: &mut [Vec<bool>]) {
    let n = m.len();
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
}

impl Oracle {
    pub fn new(o: &Ontology) -> Oracle {
        let names: Vec<String> = o.classes.keys().cloned().collect();
        let index: BTreeMap<String, usize> = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        let n = names.len();
        let mut eq = vec![vec![false; n]; n];
        let mut sub = vec![vec![false; n]; n];
        for i in 0..n {
            eq[i][i] = true;
            sub[i][i] = true;
        }
        for (a, b) in &o.equivalence_axioms {
            let (a, b) = (index[a], index[b]);
            eq[a][b] = true;
            eq[b][a] = true;
            sub[a][b] = true;
            sub[b][a] = true;
        }
        for (a, b) in &o.subclass_axioms {
            sub[index[a]][index[b]] = true;
        }
        warshall(&mut eq);
        warshall(&mut sub);
        Oracle {
            names,
            index,
            eq,
            sub,
            ontology: o.clone(),
        }
    }

    pub fn classes(&self) -> &[String] {
        &self.names
    }

    pub fn equivalent(&self, a: &str, b: &str) -> bool {
        self.eq[self.index[a]][self.index[b]]
    }

    /// Reflexive-transitive subsumption.
    pub fn subsumed(&self, a: &str, b: &str) -> bool {
        self.sub[self.index[a]][self.index[b]]
    }

    /// Every property relating the pair, by assertion between equivalent
    /// classes or by a fully declared domain and range, in either direction.
    pub fn related(&self, a: &str, b: &str) -> Vec<String> {
        let mut out = Vec::new();
        for (p, decl) in &self.ontology.object_properties {
            let asserted = self.ontology.property_assertions.iter().any(|(s, q, t)| {
                q == p
                    && ((self.equivalent(s, a) && self.equivalent(t, b))
                        || (self.equivalent(s, b) && self.equivalent(t, a)))
            });
            let inferred = match (&decl.domain, &decl.range) {
                (Some(d), Some(r)) => {
                    (self.subsumed(a, d) && self.subsumed(b, r)) || (self.subsumed(b, d) && self.subsumed(a, r))
                }
                _ => false,
            };
            if asserted || inferred {
                out.push(p.clone());
            }
        }
        out.sort();
        out
    }

    pub fn classify(&self, a: &str, b: &str) -> InferredProperty {
        if self.equivalent(a, b) {
            InferredProperty::EquivalentClass
        } else if self.subsumed(a, b) {
            InferredProperty::SubclassOf
        } else if self.subsumed(b, a) {
            InferredProperty::HasSuperclass
        } else if let Some(p) = self.related(a, b).into_iter().next() {
            InferredProperty::ObjectProperty(p)
        } else {
            InferredProperty::None
        }
    }
}

/// Records laid out so that their confusion matrix is exactly
/// `(tp, fp, fn, tn)`, spread over a few domains.
pub fn records_with_confusion(tp: usize, fp: usize, fn_: usize, tn: usize) -> Vec<ClassifiedRecord> {
    let cells = [
        (tp, LinkLabel::Useful, LinkLabel::Useful),
        (fp, LinkLabel::Useful, LinkLabel::Noisy),
        (fn_, LinkLabel::Noisy, LinkLabel::Useful),
        (tn, LinkLabel::Noisy, LinkLabel::Noisy),
    ];
    let mut out = Vec::new();
    for (count, reasoner, user) in cells {
        for _ in 0..count {
            let i = out.len();
            out.push(ClassifiedRecord {
                subject: dbo("Thing"),
                object: dbo(&format!("Target{}", i % 4)),
                inferred_property: if reasoner == LinkLabel::Useful {
                    InferredProperty::EquivalentClass
                } else {
                    InferredProperty::None
                },
                reasoner_label: reasoner,
                source_domain: format!("site{}.example", i % 6),
                user_label: user,
                link_id: format!("{i:016x}"),
            });
        }
    }
    out
}

/// Random hyperlinks that hit every filter rule with useful frequency.
pub fn arb_links(max: usize) -> impl Strategy<Value = Vec<RawHyperlink>> {
    let source = prop::sample::select(vec![
        "http://a.example/",
        "http://a.example/page.html",
        "http://b.example/x?y=1",
    ]);
    let target = prop::sample::select(vec![
        "http://a.example/",
        "http://a.example/#top",
        "http://a.example/page.html",
        "http://a.example/page.html#s2",
        "http://b.example/pic.JPG",
        "http://b.example/doc.pdf",
        "http://b.example/x?y=1",
        "https://c.example/video.mp4?autoplay=1",
        "mailto:someone@a.example",
        "javascript:void(0)",
        "ftp://files.example/a.txt",
        "http://c.example/about",
    ]);
    let anchor = prop::sample::select(vec!["", "  ", "\n", "home", "Read more", "photo"]);
    let link = (source, target, anchor, 0usize..4).prop_map(|(s, t, a, pos)| RawHyperlink {
        source_url: s.to_string(),
        target_url: t.to_string(),
        anchor_text: a.to_string(),
        paragraph_text: String::new(),
        source_domain: url_host(s),
        position_index: pos,
    });
    prop::collection::vec(link, 0..max)
}

fn url_host(u: &str) -> String {
    u.split("//").nth(1).and_then(|r| r.split('/').next()).unwrap_or("").to_string()
}

/// Relative error between two gradient vectors, guarded near zero.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt() + b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale < 1e-12 {
        0.0
    } else {
        diff / scale
    }
}

//! Seeded generators for synthetic ontologies, corpora and datasets.
//! Every generator is a pure function of its arguments.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matcher::ConceptRecord;
use crate::ontology::Ontology;
use crate::topics::LabeledDocument;
use crate::LinkLabel;

pub const SYNTH_NS: &str = "http://example.org/synth#";

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn class_iri(i: usize) -> String {
    format!("{SYNTH_NS}C{i:03}")
}

fn prop_iri(i: usize) -> String {
    format!("{SYNTH_NS}p{i:03}")
}

/// Random ontology with 2..=`max_classes` classes and at most
/// `max_axioms` axioms (as counted by [`Ontology::axiom_count`]). Subclass
/// cycles, equivalences, domain/range declarations and assertions all occur.
pub fn random_ontology(seed: u64, max_classes: usize, max_axioms: usize) -> Ontology {
    let mut r = rng(seed);
    let n = r.gen_range(2..=max_classes.max(2));
    let mut o = Ontology::default();
    for i in 0..n {
        o.add_class(&class_iri(i), None);
    }
    let budget = r.gen_range(0..=max_axioms);
    let mut props = 0usize;
    let mut attempts = 0;
    while o.axiom_count() < budget && attempts < 10 * max_axioms + 10 {
        attempts += 1;
        let room = budget - o.axiom_count();
        let a = class_iri(r.gen_range(0..n));
        let b = class_iri(r.gen_range(0..n));
        match r.gen_range(0..100) {
            0..=49 => {
                if a != b {
                    o.add_subclass(&a, &b);
                }
            }
            50..=64 => o.add_equivalence(&a, &b),
            65..=79 if room >= 2 => {
                o.add_property(&prop_iri(props), Some(&a), Some(&b));
                props += 1;
            }
            80..=84 => {
                // Half-declared property: never supports inference.
                let (d, rg) = if r.gen_bool(0.5) { (Some(a.as_str()), None) } else { (None, Some(b.as_str())) };
                o.add_property(&prop_iri(props), d, rg);
                props += 1;
            }
            _ => {
                if props == 0 {
                    o.add_property(&prop_iri(props), None, None);
                    props += 1;
                }
                let p = prop_iri(r.gen_range(0..props));
                o.add_assertion(&a, &p, &b);
            }
        }
    }
    o
}

const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

fn word(r: &mut ChaCha8Rng, syllables: usize) -> String {
    let mut w = String::new();
    for _ in 0..syllables {
        w.push(CONSONANTS[r.gen_range(0..CONSONANTS.len())] as char);
        w.push(VOWELS[r.gen_range(0..VOWELS.len())] as char);
    }
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => w,
    }
}

/// Tree-shaped taxonomy of `n` classes with distinct pronounceable labels.
pub fn labeled_ontology(seed: u64, n: usize) -> Ontology {
    let mut r = rng(seed);
    let mut o = Ontology::default();
    let mut used = BTreeSet::new();
    for i in 0..n {
        let label = loop {
            let l = if r.gen_bool(0.2) {
                format!("{} {}", word(&mut r, 2), word(&mut r, 3))
            } else {
                word(&mut r, 3)
            };
            if used.insert(l.to_lowercase()) {
                break l;
            }
        };
        o.add_class(&class_iri(i), Some(&label));
        if i > 0 && r.gen_bool(0.85) {
            o.add_subclass(&class_iri(i), &class_iri(r.gen_range(0..i)));
        }
    }
    o
}

pub fn class_labels(o: &Ontology) -> Vec<String> {
    o.classes.values().flatten().cloned().collect()
}

/// Topics of which exactly `round(n · garbage_fraction)` are garbage
/// strings. The rest are class labels, sometimes re-cased or pluralized.
/// Returns `(topic, is_garbage)` pairs in shuffled order.
pub fn planted_match_topics(seed: u64, labels: &[String], n: usize, garbage_fraction: f64) -> Vec<(String, bool)> {
    let mut r = rng(seed);
    let garbage = (n as f64 * garbage_fraction).round() as usize;
    let mut out = Vec::with_capacity(n);
    for _ in 0..garbage {
        let len = r.gen_range(9..=14);
        let s: String = (0..len)
            .map(|_| b"qxjwhcy"[r.gen_range(0..7)] as char)
            .collect();
        out.push((s, true));
    }
    for _ in garbage..n {
        let l = labels.choose(&mut r).expect("labels").clone();
        let t = match r.gen_range(0..3) {
            0 => l,
            1 => l.to_uppercase(),
            _ => format!("{l}s"),
        };
        out.push((t, false));
    }
    out.shuffle(&mut r);
    out
}

/// Token `j` of the vocabulary reserved for label index `label`.
pub fn vocab_word(label: usize, j: usize) -> String {
    format!("t{label}w{j}")
}

/// Documents whose tokens come from disjoint per-label vocabularies.
pub fn separable_corpus(
    seed: u64,
    labels: &[String],
    docs_per_label: usize,
    vocab_per_label: usize,
    doc_len: usize,
) -> Vec<LabeledDocument> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for (li, label) in labels.iter().enumerate() {
        for d in 0..docs_per_label {
            out.push(LabeledDocument {
                doc_id: format!("{li}-{d}"),
                tokens: (0..doc_len)
                    .map(|_| vocab_word(li, r.gen_range(0..vocab_per_label)))
                    .collect(),
                topic_label: label.clone(),
            });
        }
    }
    out.shuffle(&mut r);
    out
}

/// The same documents with their labels randomly permuted.
pub fn shuffle_labels(corpus: &[LabeledDocument], seed: u64) -> Vec<LabeledDocument> {
    let mut labels: Vec<String> = corpus.iter().map(|d| d.topic_label.clone()).collect();
    labels.shuffle(&mut rng(seed));
    corpus
        .iter()
        .zip(labels)
        .map(|(d, topic_label)| LabeledDocument {
            topic_label,
            ..d.clone()
        })
        .collect()
}

/// Prediction documents for a model trained on [`separable_corpus`] with
/// the same label count and vocabulary size. Exactly
/// `round(n · unclassifiable_fraction)` documents are planted to be
/// unclassifiable: half use only out-of-vocabulary tokens, half mix one
/// token from every label. Returns `(tokens, planted)` pairs.
pub fn planted_topic_documents(
    seed: u64,
    labels: usize,
    vocab_per_label: usize,
    n: usize,
    unclassifiable_fraction: f64,
) -> Vec<(Vec<String>, bool)> {
    let mut r = rng(seed);
    let planted = (n as f64 * unclassifiable_fraction).round() as usize;
    let mut out = Vec::with_capacity(n);
    for i in 0..planted {
        let tokens = if i % 2 == 0 {
            (0..4).map(|k| format!("oov{i}x{k}")).collect()
        } else {
            (0..labels)
                .map(|l| vocab_word(l, r.gen_range(0..vocab_per_label)))
                .collect()
        };
        out.push((tokens, true));
    }
    for _ in planted..n {
        let l = r.gen_range(0..labels);
        let len = r.gen_range(3..=8);
        out.push(((0..len).map(|_| vocab_word(l, r.gen_range(0..vocab_per_label))).collect(), false));
    }
    out.shuffle(&mut r);
    out
}

/// Taxonomy with properties and assertions sized for timing the reasoner.
pub fn bench_ontology(seed: u64, classes: usize, properties: usize) -> Ontology {
    let mut r = rng(seed);
    let mut o = Ontology::default();
    for i in 0..classes {
        o.add_class(&class_iri(i), None);
        if i > 0 && r.gen_bool(0.9) {
            let lo = i.saturating_sub(50);
            o.add_subclass(&class_iri(i), &class_iri(r.gen_range(lo..i)));
        }
    }
    for _ in 0..classes / 50 {
        o.add_equivalence(&class_iri(r.gen_range(0..classes)), &class_iri(r.gen_range(0..classes)));
    }
    for p in 0..properties {
        let d = class_iri(r.gen_range(0..classes));
        let g = class_iri(r.gen_range(0..classes));
        o.add_property(&prop_iri(p), Some(&d), Some(&g));
    }
    for _ in 0..classes / 4 {
        let p = prop_iri(r.gen_range(0..properties.max(1)));
        if properties == 0 {
            o.add_property(&p, None, None);
        }
        o.add_assertion(&class_iri(r.gen_range(0..classes)), &p, &class_iri(r.gen_range(0..classes)));
    }
    o
}

/// Random concept records over the classes of `o`.
pub fn concept_records(seed: u64, o: &Ontology, n: usize, domains: usize) -> Vec<ConceptRecord> {
    let mut r = rng(seed);
    let classes: Vec<&String> = o.classes.keys().collect();
    (0..n)
        .map(|i| ConceptRecord {
            source_class: classes[r.gen_range(0..classes.len())].clone(),
            target_class: classes[r.gen_range(0..classes.len())].clone(),
            user_label: if r.gen_bool(0.7) { LinkLabel::Useful } else { LinkLabel::Noisy },
            source_domain: format!("site{}", r.gen_range(0..domains.max(1))),
            link_id: format!("{i:08x}"),
        })
        .collect()
}

/// Ontology and records where record `i` is built to land in a known
/// reasoner bucket. `counts` follows the bucket order EQUIVALENT_CLASS,
/// SUBCLASS_OF, HAS_SUPERCLASS, OBJECT_PROPERTY, NONE.
pub fn planted_breakdown(seed: u64, counts: [usize; 5]) -> (Ontology, Vec<ConceptRecord>) {
    let mut o = Ontology::default();
    o.add_property(&prop_iri(0), None, None);
    let mut records = Vec::new();
    let mut k = 0usize;
    for (bucket, &count) in counts.iter().enumerate() {
        for _ in 0..count {
            let a = format!("{SYNTH_NS}A{k:05}");
            let b = format!("{SYNTH_NS}B{k:05}");
            o.add_class(&a, None);
            o.add_class(&b, None);
            match bucket {
                0 => o.add_equivalence(&a, &b),
                1 => o.add_subclass(&a, &b),
                2 => o.add_subclass(&b, &a),
                3 => o.add_assertion(&a, &prop_iri(0), &b),
                _ => {}
            }
            records.push(ConceptRecord {
                source_class: a,
                target_class: b,
                user_label: LinkLabel::Useful,
                source_domain: "planted".into(),
                link_id: format!("{k:08x}"),
            });
            k += 1;
        }
    }
    records.shuffle(&mut rng(seed));
    (o, records)
}

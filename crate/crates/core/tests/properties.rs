mod common;

use std::sync::OnceLock;

use noisylink::eval::{confusion, domain_report, exact_metrics, metrics, ConfusionMatrix};
use noisylink::linkprep::filter_links;
use noisylink::matcher::{MatchConfig, Matcher};
use noisylink::ontology::{build_closure, parse_ontology, Ontology};
use noisylink::reasoner::{classify_link, ClassifiedRecord, InferredProperty};
use noisylink::synth;
use noisylink::topics::{train, Algorithm, TopicModel, TrainConfig};
use noisylink::LinkLabel;
use num_rational::Ratio;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{arb_links, Oracle};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn filter_counts_are_conserved(links in arb_links(40)) {
        let (kept, report) = filter_links(&links);
        prop_assert_eq!(report.input_count, links.len());
        prop_assert_eq!(report.kept_count, kept.len());
        prop_assert_eq!(report.kept_count + report.removed(), report.input_count);
        let (again, second) = filter_links(&kept);
        prop_assert_eq!(&again, &kept);
        prop_assert_eq!(second.removed(), 0);
    }

    #[test]
    fn filtering_preserves_relative_order(links in arb_links(30)) {
        let (kept, _) = filter_links(&links);
        let mut it = links.iter();
        for k in &kept {
            prop_assert!(it.any(|l| l == k));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn closure_agrees_with_reference(seed in any::<u64>()) {
        let o = synth::random_ontology(seed, 15, 40);
        let oracle = Oracle::new(&o);
        let closure = build_closure(o);
        for a in oracle.classes() {
            for b in oracle.classes() {
                prop_assert_eq!(closure.equivalent(a, b).unwrap(), oracle.equivalent(a, b));
                prop_assert_eq!(closure.reachable(a, b).unwrap(), oracle.subsumed(a, b));
                let related: Vec<String> = closure.related(a, b).unwrap().into_iter().collect();
                prop_assert_eq!(related, oracle.related(a, b));
                prop_assert_eq!(classify_link(&closure, a, b).unwrap().property, oracle.classify(a, b));
            }
        }
    }

    #[test]
    fn adding_axioms_never_loses_usefulness(seed in any::<u64>(), kind in 0u8..3, i in 0usize..64, j in 0usize..64) {
        let o = synth::random_ontology(seed, 12, 30);
        let names: Vec<String> = o.classes.keys().cloned().collect();
        let (a, b) = (&names[i % names.len()], &names[j % names.len()]);
        let mut bigger = o.clone();
        match kind {
            0 if a != b => bigger.add_subclass(a, b),
            1 => bigger.add_equivalence(a, b),
            _ => {
                bigger.add_property("http://example.org/synth#extra", None, None);
                bigger.add_assertion(a, "http://example.org/synth#extra", b);
            }
        }
        let before = build_closure(o);
        let after = build_closure(bigger);
        for x in &names {
            for y in &names {
                if before.reachable(x, y).unwrap() {
                    prop_assert!(after.reachable(x, y).unwrap());
                }
                if classify_link(&before, x, y).unwrap().label == LinkLabel::Useful {
                    prop_assert_eq!(classify_link(&after, x, y).unwrap().label, LinkLabel::Useful);
                }
            }
        }
    }

    #[test]
    fn classification_is_symmetric_for_equivalence_and_relatedness(seed in any::<u64>()) {
        let o = synth::random_ontology(seed, 12, 30);
        let names: Vec<String> = o.classes.keys().cloned().collect();
        let closure = build_closure(o);
        for a in &names {
            for b in &names {
                let ab = classify_link(&closure, a, b).unwrap().property;
                let ba = classify_link(&closure, b, a).unwrap().property;
                match ab {
                    InferredProperty::EquivalentClass => prop_assert_eq!(ba, InferredProperty::EquivalentClass),
                    // On a subclass cycle both directions are SUBCLASS_OF.
                    InferredProperty::SubclassOf if closure.reachable(b, a).unwrap() => {
                        prop_assert_eq!(ba, InferredProperty::SubclassOf)
                    }
                    InferredProperty::SubclassOf => prop_assert_eq!(ba, InferredProperty::HasSuperclass),
                    InferredProperty::HasSuperclass => prop_assert_eq!(ba, InferredProperty::SubclassOf),
                    other => prop_assert_eq!(ba, other),
                }
            }
        }
    }

    #[test]
    fn snapshot_round_trip(seed in any::<u64>()) {
        let o = synth::random_ontology(seed, 20, 50);
        let back = parse_ontology(&o.to_snapshot()).unwrap();
        prop_assert_eq!(back, o);
    }
}

fn labeled() -> &'static (Ontology, Vec<String>) {
    static CELL: OnceLock<(Ontology, Vec<String>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let o = synth::labeled_ontology(11, 40);
        let labels = synth::class_labels(&o);
        (o, labels)
    })
}

fn topic_strategy() -> impl Strategy<Value = String> {
    let labels = labeled().1.clone();
    prop_oneof![
        prop::sample::select(labels.clone()),
        (prop::sample::select(labels), "[a-z]{0,2}").prop_map(|(l, s)| format!("{l}{s}")),
        "[a-z]{1,10}( [a-z]{1,6})?",
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matcher_scores_and_acceptance(topic in topic_strategy(), alpha in 0.0f64..=1.0) {
        let (o, labels) = labeled();
        let closure = build_closure(o.clone());
        let config = MatchConfig { accept_threshold: 0.7, string_weight: alpha };
        let m = Matcher::new(&closure, config).match_topic(&topic);
        prop_assert!((0.0..=1.0).contains(&m.score));
        match &m.class {
            Some(c) => {
                prop_assert!(closure.is_declared(c));
                prop_assert!(m.score >= 0.7);
            }
            None => prop_assert!(m.score < 0.7),
        }
        if labels.contains(&topic) {
            let c = m.class.expect("exact label must match");
            prop_assert_eq!(o.display_label(&c).unwrap(), topic);
            prop_assert!((m.score - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn raising_the_threshold_only_drops_matches(topic in topic_strategy(), t1 in 0.05f64..=1.0, t2 in 0.05f64..=1.0) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let closure = build_closure(labeled().0.clone());
        let at = |t| Matcher::new(&closure, MatchConfig { accept_threshold: t, string_weight: 0.5 }).match_topic(&topic);
        let (low, high) = (at(lo), at(hi));
        if let Some(c) = &high.class {
            prop_assert_eq!(low.class.as_ref(), Some(c));
        }
        prop_assert!((low.score - high.score).abs() < 1e-12);
    }
}

fn model() -> &'static TopicModel {
    static CELL: OnceLock<TopicModel> = OnceLock::new();
    CELL.get_or_init(|| {
        let labels: Vec<String> = (0..4).map(|i| format!("topic{i}")).collect();
        let corpus = synth::separable_corpus(5, &labels, 30, 8, 6);
        let cfg = TrainConfig { algorithm: Algorithm::MaxEntropy, split: 1.0, folds: 0, seed: 5, ..TrainConfig::default() };
        train(&corpus, &cfg).unwrap().0
    })
}

fn token_strategy() -> impl Strategy<Value = Vec<String>> {
    let mut words: Vec<String> = (0..4).flat_map(|l| (0..8).map(move |j| synth::vocab_word(l, j))).collect();
    words.push("unseenword".into());
    prop::collection::vec(prop::sample::select(words), 1..25)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn posterior_is_a_distribution(tokens in token_strategy()) {
        let m = model();
        match m.posterior(&tokens) {
            Some(p) => {
                prop_assert_eq!(p.len(), m.topic_labels.len());
                prop_assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
                prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
            None => prop_assert!(tokens.iter().all(|t| t == "unseenword")),
        }
    }

    #[test]
    fn word_order_does_not_matter(tokens in token_strategy(), seed in any::<u64>()) {
        let m = model();
        let mut shuffled = tokens.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let (a, b) = (m.posterior(&tokens), m.posterior(&shuffled));
        match (a, b) {
            (Some(a), Some(b)) => {
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).abs() < 1e-12);
                }
            }
            (a, b) => prop_assert_eq!(a, b),
        }
        prop_assert_eq!(m.predict("d", &tokens).topic, m.predict("d", &shuffled).topic);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn metric_identities_hold_exactly(tp in 0u64..100_000, fp in 0u64..100_000, fn_ in 0u64..100_000, tn in 0u64..100_000) {
        let m = ConfusionMatrix::new(tp, fp, fn_, tn);
        if m.total() == 0 {
            prop_assert!(exact_metrics(&m).is_err());
            return Ok(());
        }
        let e = exact_metrics(&m).unwrap();
        prop_assert_eq!(e.accuracy + e.error_rate, Ratio::from_integer(1));
        prop_assert_eq!(e.precision * Ratio::from_integer(tp + fp), Ratio::from_integer(tp));
        prop_assert_eq!(e.recall * Ratio::from_integer(tp + fn_), Ratio::from_integer(tp));
        prop_assert_eq!(e.specificity * Ratio::from_integer(tn + fp), Ratio::from_integer(tn));
        let p = e.precision;
        let r = e.recall;
        if p + r == Ratio::from_integer(0) {
            prop_assert_eq!(e.f1, Ratio::from_integer(0));
        } else {
            prop_assert_eq!(e.f1, Ratio::from_integer(2) * p * r / (p + r));
        }
        let f = metrics(&m).unwrap();
        for v in [f.accuracy, f.error_rate, f.precision, f.recall, f.specificity, f.f1] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn domain_report_conserves_records(cells in (0usize..40, 0usize..40, 0usize..40, 0usize..40)) {
        let records: Vec<ClassifiedRecord> = common::records_with_confusion(cells.0, cells.1, cells.2, cells.3);
        let r = domain_report(&records);
        prop_assert_eq!(r.total, records.len());
        prop_assert_eq!(r.domains.iter().map(|d| d.total).sum::<usize>(), records.len());
        for d in &r.domains {
            prop_assert_eq!(d.reasoner_useful + d.reasoner_noisy, d.total);
            prop_assert_eq!(d.user_useful + d.user_noisy, d.total);
        }
        let c = confusion(&records);
        prop_assert_eq!((c.tp, c.fp, c.fn_, c.tn), (cells.0 as u64, cells.1 as u64, cells.2 as u64, cells.3 as u64));
        prop_assert_eq!(r.reasoner.useful as u64, c.tp + c.fp);
        prop_assert_eq!(r.user.useful as u64, c.tp + c.fn_);
        for p in [&r.reasoner, &r.user] {
            prop_assert!((0.0..=100.0).contains(&p.useful_percent));
            if !records.is_empty() {
                prop_assert!((p.useful_percent + p.noisy_percent - 100.0).abs() < 1e-9);
            }
        }
    }
}

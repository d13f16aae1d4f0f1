use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::reasoner::ClassifiedRecord;

pub const TOP_K: usize = 5;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainCounts {
    pub domain: String,
    pub total: usize,
    pub reasoner_useful: usize,
    pub reasoner_noisy: usize,
    pub user_useful: usize,
    pub user_noisy: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Perspective {
    pub useful: usize,
    pub noisy: usize,
    pub useful_percent: f64,
    pub noisy_percent: f64,
}

impl Perspective {
    fn new(useful: usize, noisy: usize) -> Self {
        let total = useful + noisy;
        let pct = |n: usize| if total == 0 { 0.0 } else { 100.0 * n as f64 / total as f64 };
        Perspective {
            useful,
            noisy,
            useful_percent: pct(useful),
            noisy_percent: pct(noisy),
        }
    }
}

/// A domain's count and its share of all links with that label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainShare {
    pub domain: String,
    pub count: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptCount {
    pub class: String,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DomainReport {
    pub total: usize,
    pub reasoner: Perspective,
    pub user: Perspective,
    pub domains: Vec<DomainCounts>,
    pub reasoner_top_useful: Vec<DomainShare>,
    pub reasoner_top_noisy: Vec<DomainShare>,
    pub user_top_useful: Vec<DomainShare>,
    pub user_top_noisy: Vec<DomainShare>,
    /// Most frequent target classes among links the reasoner judged noisy.
    pub top_noisy_targets: Vec<ConceptCount>,
}

fn top(domains: &[DomainCounts], count: impl Fn(&DomainCounts) -> usize, of: usize) -> Vec<DomainShare> {
    let mut v: Vec<&DomainCounts> = domains.iter().filter(|d| count(d) > 0).collect();
    v.sort_by(|a, b| count(b).cmp(&count(a)).then_with(|| a.domain.cmp(&b.domain)));
    v.into_iter()
        .take(TOP_K)
        .map(|d| DomainShare {
            domain: d.domain.clone(),
            count: count(d),
            percent: 100.0 * count(d) as f64 / of as f64,
        })
        .collect()
}

pub fn domain_report(records: &[ClassifiedRecord]) -> DomainReport {
    let mut per: BTreeMap<&str, DomainCounts> = BTreeMap::new();
    let mut noisy_targets: BTreeMap<&str, usize> = BTreeMap::new();
    for r in records {
        let d = per.entry(&r.source_domain).or_insert_with(|| DomainCounts {
            domain: r.source_domain.clone(),
            ..DomainCounts::default()
        });
        d.total += 1;
        if r.reasoner_label.is_useful() {
            d.reasoner_useful += 1;
        } else {
            d.reasoner_noisy += 1;
            *noisy_targets.entry(&r.object).or_insert(0) += 1;
        }
        if r.user_label.is_useful() {
            d.user_useful += 1;
        } else {
            d.user_noisy += 1;
        }
    }
    let domains: Vec<DomainCounts> = per.into_values().collect();
    let sum = |f: fn(&DomainCounts) -> usize| domains.iter().map(f).sum::<usize>();
    let reasoner = Perspective::new(sum(|d| d.reasoner_useful), sum(|d| d.reasoner_noisy));
    let user = Perspective::new(sum(|d| d.user_useful), sum(|d| d.user_noisy));

    let mut targets: Vec<ConceptCount> = noisy_targets
        .into_iter()
        .map(|(class, count)| ConceptCount {
            class: class.to_string(),
            count,
        })
        .collect();
    targets.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.class.cmp(&b.class)));
    targets.truncate(TOP_K);

    DomainReport {
        total: records.len(),
        reasoner_top_useful: top(&domains, |d| d.reasoner_useful, reasoner.useful),
        reasoner_top_noisy: top(&domains, |d| d.reasoner_noisy, reasoner.noisy),
        user_top_useful: top(&domains, |d| d.user_useful, user.useful),
        user_top_noisy: top(&domains, |d| d.user_noisy, user.noisy),
        reasoner,
        user,
        domains,
        top_noisy_targets: targets,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reasoner::InferredProperty;
    use crate::LinkLabel::{self, *};

    fn rec(domain: &str, object: &str, user: LinkLabel, reasoner: LinkLabel) -> ClassifiedRecord {
        ClassifiedRecord {
            subject: "s".into(),
            object: object.into(),
            inferred_property: InferredProperty::None,
            reasoner_label: reasoner,
            source_domain: domain.into(),
            user_label: user,
            link_id: String::new(),
        }
    }

    #[test]
    fn single_domain_holds_everything() {
        let rs = vec![rec("a", "X", Useful, Noisy), rec("a", "Y", Noisy, Noisy)];
        let r = domain_report(&rs);
        assert_eq!(r.domains.len(), 1);
        assert_eq!(r.reasoner_top_noisy[0].percent, 100.0);
        assert_eq!(r.user_top_useful[0].percent, 100.0);
        assert_eq!(r.user.useful_percent, 50.0);
        assert_eq!(r.reasoner.noisy_percent, 100.0);
        assert_eq!(r.top_noisy_targets.len(), 2);
    }

    #[test]
    fn ranking_and_empty() {
        let rs = vec![
            rec("b", "X", Useful, Useful),
            rec("a", "X", Useful, Useful),
            rec("c", "X", Useful, Useful),
            rec("c", "X", Useful, Noisy),
        ];
        let r = domain_report(&rs);
        let order: Vec<_> = r.reasoner_top_useful.iter().map(|d| d.domain.as_str()).collect();
        assert_eq!(order, vec!["a", "b", "c"]);
        assert!(r.user_top_noisy.is_empty());
        let empty = domain_report(&[]);
        assert_eq!(empty.reasoner.useful_percent, 0.0);
    }
}

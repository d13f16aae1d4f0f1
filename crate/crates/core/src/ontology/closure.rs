use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use super::{Ontology, OntologyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum QueryKind {
    Equivalent,
    Subclass,
    Superclass,
    Related,
}

impl FromStr for QueryKind {
    type Err = OntologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "EQUIVALENT" => Ok(QueryKind::Equivalent),
            "SUBCLASS" => Ok(QueryKind::Subclass),
            "SUPERCLASS" => Ok(QueryKind::Superclass),
            "RELATED" => Ok(QueryKind::Related),
            _ => Err(OntologyError::UnknownQueryKind(s.to_string())),
        }
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryKind::Equivalent => "EQUIVALENT",
            QueryKind::Subclass => "SUBCLASS",
            QueryKind::Superclass => "SUPERCLASS",
            QueryKind::Related => "RELATED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryAnswer {
    pub holds: bool,
    /// Axioms witnessing a true answer, in chain order.
    pub justification: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
enum Edge {
    Sub(usize),
    Equiv(usize),
}

/// Inferred structures over an immutable [`Ontology`].
///
/// Classes are numbered in IRI order. Equivalence classes are merged with
/// union-find and represented by their smallest IRI. Subclass reachability
/// is computed on the strongly connected components of the subclass graph
/// over representatives, one bitset row per component.
#[derive(Debug, Clone)]
pub struct OntologyClosure {
    ontology: Ontology,
    names: Vec<String>,
    index: HashMap<String, usize>,
    rep: Vec<usize>,
    scc: Vec<usize>,
    reach: Vec<FixedBitSet>,
    depth: Vec<usize>,
    explicit: HashMap<(usize, usize), BTreeSet<String>>,
    ranged: Vec<(String, usize, usize)>,
    adjacency: Vec<Vec<Edge>>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub fn build_closure(ontology: Ontology) -> OntologyClosure {
    OntologyClosure::new(ontology)
}

impl OntologyClosure {
    pub fn new(ontology: Ontology) -> Self {
        let names: Vec<String> = ontology.classes.keys().cloned().collect();
        let index: HashMap<String, usize> =
            names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let n = names.len();
        let ix = |iri: &String| index[iri];

        let mut parent: Vec<usize> = (0..n).collect();
        for (a, b) in &ontology.equivalence_axioms {
            let (ra, rb) = (find(&mut parent, ix(a)), find(&mut parent, ix(b)));
            // The smaller index, hence the smaller IRI, stays the root.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent[hi] = lo;
        }
        let rep: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();

        let mut graph: DiGraph<usize, ()> = DiGraph::with_capacity(n, ontology.subclass_axioms.len());
        let nodes: Vec<_> = (0..n).map(|i| graph.add_node(i)).collect();
        for (a, b) in &ontology.subclass_axioms {
            let (ra, rb) = (rep[ix(a)], rep[ix(b)]);
            if ra != rb {
                graph.update_edge(nodes[ra], nodes[rb], ());
            }
        }
        // Tarjan yields components in reverse topological order, so every
        // superclass component is finished before its subclasses.
        let components = tarjan_scc(&graph);
        let mut scc = vec![0usize; n];
        for (c, members) in components.iter().enumerate() {
            for node in members {
                scc[graph[*node]] = c;
            }
        }
        let k = components.len();
        let mut reach: Vec<FixedBitSet> = Vec::with_capacity(k);
        let mut depth = vec![0usize; k];
        for (c, members) in components.iter().enumerate() {
            let mut row = FixedBitSet::with_capacity(k);
            row.insert(c);
            let mut deepest_parent = 0;
            for node in members {
                for succ in graph.neighbors(*node) {
                    let sc = scc[graph[succ]];
                    if sc != c {
                        row.union_with(&reach[sc]);
                        deepest_parent = deepest_parent.max(depth[sc]);
                    }
                }
            }
            depth[c] = deepest_parent + 1;
            reach.push(row);
        }
        let scc: Vec<usize> = (0..n).map(|i| scc[rep[i]]).collect();

        let mut explicit: HashMap<(usize, usize), BTreeSet<String>> = HashMap::new();
        for (a, p, b) in &ontology.property_assertions {
            let (ra, rb) = (rep[ix(a)], rep[ix(b)]);
            explicit.entry((ra, rb)).or_default().insert(p.clone());
            explicit.entry((rb, ra)).or_default().insert(p.clone());
        }
        let ranged = ontology
            .object_properties
            .iter()
            .filter_map(|(p, d)| match (&d.domain, &d.range) {
                (Some(dom), Some(rng)) => Some((p.clone(), ix(dom), ix(rng))),
                _ => None,
            })
            .collect();

        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in &ontology.subclass_axioms {
            adjacency[ix(a)].push(Edge::Sub(ix(b)));
        }
        for (a, b) in &ontology.equivalence_axioms {
            adjacency[ix(a)].push(Edge::Equiv(ix(b)));
            adjacency[ix(b)].push(Edge::Equiv(ix(a)));
        }

        OntologyClosure {
            ontology,
            names,
            index,
            rep,
            scc,
            reach,
            depth,
            explicit,
            ranged,
            adjacency,
        }
    }

    pub fn ontology(&self) -> &Ontology {
        &self.ontology
    }

    pub fn class_count(&self) -> usize {
        self.names.len()
    }

    pub fn is_declared(&self, iri: &str) -> bool {
        self.index.contains_key(iri)
    }

    fn id(&self, iri: &str) -> Result<usize, OntologyError> {
        self.index
            .get(iri)
            .copied()
            .ok_or_else(|| OntologyError::UndeclaredClass(iri.to_string()))
    }

    /// Canonical representative of the class's equivalence partition.
    pub fn canonical(&self, iri: &str) -> Result<&str, OntologyError> {
        Ok(&self.names[self.rep[self.id(iri)?]])
    }

    fn reach_ids(&self, a: usize, b: usize) -> bool {
        self.reach[self.scc[a]].contains(self.scc[b])
    }

    pub fn equivalent(&self, a: &str, b: &str) -> Result<bool, OntologyError> {
        Ok(self.rep[self.id(a)?] == self.rep[self.id(b)?])
    }

    /// Reflexive-transitive subclass reachability through equivalences.
    pub fn reachable(&self, a: &str, b: &str) -> Result<bool, OntologyError> {
        Ok(self.reach_ids(self.id(a)?, self.id(b)?))
    }

    fn related_ids(&self, a: usize, b: usize) -> BTreeSet<String> {
        let mut out = self
            .explicit
            .get(&(self.rep[a], self.rep[b]))
            .cloned()
            .unwrap_or_default();
        for (p, dom, rng) in &self.ranged {
            let forward = self.reach_ids(a, *dom) && self.reach_ids(b, *rng);
            let backward = self.reach_ids(b, *dom) && self.reach_ids(a, *rng);
            if forward || backward {
                out.insert(p.clone());
            }
        }
        out
    }

    /// Properties relating the two classes in either direction.
    pub fn related(&self, a: &str, b: &str) -> Result<BTreeSet<String>, OntologyError> {
        Ok(self.related_ids(self.id(a)?, self.id(b)?))
    }

    pub fn query(&self, kind: QueryKind, a: &str, b: &str) -> Result<QueryAnswer, OntologyError> {
        let (ia, ib) = (self.id(a)?, self.id(b)?);
        let equivalent = self.rep[ia] == self.rep[ib];
        let (holds, justification) = match kind {
            QueryKind::Equivalent => (equivalent, self.chain(ia, ib, true)),
            QueryKind::Subclass => {
                let holds = !equivalent && self.reach_ids(ia, ib);
                (holds, self.chain(ia, ib, false))
            }
            QueryKind::Superclass => {
                let holds = !equivalent && self.reach_ids(ib, ia);
                (holds, self.chain(ib, ia, false))
            }
            QueryKind::Related => {
                let props = self.related_ids(ia, ib);
                let why = props
                    .iter()
                    .next()
                    .map(|p| vec![self.explain_property(p, ia, ib)])
                    .unwrap_or_default();
                (!props.is_empty(), why)
            }
        };
        Ok(QueryAnswer {
            holds,
            justification: if holds { justification } else { Vec::new() },
        })
    }

    fn explain_property(&self, p: &str, a: usize, b: usize) -> String {
        let (ra, rb) = (self.rep[a], self.rep[b]);
        let asserted = self.ontology.property_assertions.iter().find(|(s, q, o)| {
            let (rs, ro) = (self.rep[self.index[s]], self.rep[self.index[o]]);
            q == p && ((rs, ro) == (ra, rb) || (rs, ro) == (rb, ra))
        });
        if let Some((s, q, o)) = asserted {
            return format!("{s} {q} {o}");
        }
        let d = &self.ontology.object_properties[p];
        format!(
            "{p} rdfs:domain {} ; rdfs:range {}",
            d.domain.as_deref().unwrap_or("?"),
            d.range.as_deref().unwrap_or("?")
        )
    }

    /// Shortest axiom chain from `from` to `to` over subclass edges
    /// (forward only) and equivalence edges (both ways).
    fn chain(&self, from: usize, to: usize, equivalence_only: bool) -> Vec<String> {
        if from == to {
            return Vec::new();
        }
        let mut prev: Vec<Option<(usize, bool)>> = vec![None; self.names.len()];
        let mut seen = FixedBitSet::with_capacity(self.names.len());
        seen.insert(from);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for e in &self.adjacency[u] {
                let (v, is_sub) = match *e {
                    Edge::Sub(v) => (v, true),
                    Edge::Equiv(v) => (v, false),
                };
                if (is_sub && equivalence_only) || seen.contains(v) {
                    continue;
                }
                seen.insert(v);
                prev[v] = Some((u, is_sub));
                queue.push_back(v);
            }
        }
        let mut steps = Vec::new();
        let mut cur = to;
        while let Some((u, is_sub)) = prev[cur] {
            let rel = if is_sub { "rdfs:subClassOf" } else { "owl:equivalentClass" };
            steps.push(format!("{} {rel} {}", self.names[u], self.names[cur]));
            cur = u;
        }
        steps.reverse();
        steps
    }

    /// Longest-path depth in the subclass hierarchy; classes without a
    /// superclass sit at depth 1 below a synthetic root at depth 0.
    pub fn depth(&self, iri: &str) -> Result<usize, OntologyError> {
        Ok(self.depth[self.scc[self.id(iri)?]])
    }

    /// Wu-Palmer similarity `2·depth(lcs) / (depth(a) + depth(b))`.
    pub fn wu_palmer(&self, a: &str, b: &str) -> Result<f64, OntologyError> {
        let (sa, sb) = (self.scc[self.id(a)?], self.scc[self.id(b)?]);
        if sa == sb {
            return Ok(1.0);
        }
        let mut common = self.reach[sa].clone();
        common.intersect_with(&self.reach[sb]);
        let lcs = common.ones().map(|c| self.depth[c]).max().unwrap_or(0);
        Ok(2.0 * lcs as f64 / (self.depth[sa] + self.depth[sb]) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn onto(classes: &[&str], sub: &[(&str, &str)], eq: &[(&str, &str)]) -> Ontology {
        let mut o = Ontology::default();
        for c in classes {
            o.add_class(c, None);
        }
        for (a, b) in sub {
            o.add_subclass(a, b);
        }
        for (a, b) in eq {
            o.add_equivalence(a, b);
        }
        o.validate().unwrap();
        o
    }

    #[test]
    fn transitivity() {
        let c = build_closure(onto(&["A", "B", "C"], &[("A", "B"), ("B", "C")], &[]));
        assert!(c.reachable("A", "C").unwrap());
        assert!(!c.reachable("C", "A").unwrap());
        let q = c.query(QueryKind::Subclass, "A", "C").unwrap();
        assert!(q.holds);
        assert_eq!(q.justification, vec!["A rdfs:subClassOf B", "B rdfs:subClassOf C"]);
    }

    #[test]
    fn reachability_through_equivalence() {
        let c = build_closure(onto(&["A", "B", "C", "D"], &[("B", "C")], &[("A", "B")]));
        assert!(c.reachable("A", "C").unwrap());
        assert!(!c.reachable("A", "D").unwrap());
        assert_eq!(c.canonical("B").unwrap(), "A");
        let q = c.query(QueryKind::Subclass, "A", "C").unwrap();
        assert_eq!(q.justification, vec!["A owl:equivalentClass B", "B rdfs:subClassOf C"]);
    }

    #[test]
    fn cycle_is_not_equivalence() {
        let c = build_closure(onto(&["A", "B"], &[("A", "B"), ("B", "A")], &[]));
        assert!(c.query(QueryKind::Subclass, "A", "B").unwrap().holds);
        assert!(c.query(QueryKind::Superclass, "A", "B").unwrap().holds);
        assert!(!c.query(QueryKind::Equivalent, "A", "B").unwrap().holds);
    }

    #[test]
    fn related_both_directions() {
        let mut o = onto(&["Monkey", "Banana", "Fruit", "Animal"], &[("Banana", "Fruit")], &[]);
        o.add_property("eats", None, None);
        o.add_assertion("Monkey", "eats", "Banana");
        o.add_property("feedsOn", Some("Animal"), Some("Fruit"));
        let c = build_closure(o);
        assert!(c.related("Monkey", "Banana").unwrap().contains("eats"));
        assert!(c.related("Banana", "Monkey").unwrap().contains("eats"));
        // Monkey is not below Animal here, so no domain/range inference.
        assert!(!c.related("Monkey", "Fruit").unwrap().contains("feedsOn"));
        assert!(c.related("Animal", "Banana").unwrap().contains("feedsOn"));
        assert!(c.related("Banana", "Animal").unwrap().contains("feedsOn"));
    }

    #[test]
    fn wu_palmer_chain() {
        let c = build_closure(onto(
            &["Agent", "Person", "Woman", "Film"],
            &[("Person", "Agent"), ("Woman", "Person")],
            &[],
        ));
        assert_eq!(c.depth("Woman").unwrap(), 3);
        assert!((c.wu_palmer("Woman", "Person").unwrap() - 0.8).abs() < 1e-12);
        assert_eq!(c.wu_palmer("Woman", "Film").unwrap(), 0.0);
        assert_eq!(c.wu_palmer("Film", "Film").unwrap(), 1.0);
    }

    #[test]
    fn undeclared_is_an_error() {
        let c = build_closure(onto(&["A"], &[], &[]));
        assert!(c.query(QueryKind::Equivalent, "A", "A").unwrap().holds);
        assert_eq!(
            c.query(QueryKind::Related, "A", "Z").unwrap_err(),
            OntologyError::UndeclaredClass("Z".into())
        );
    }
}

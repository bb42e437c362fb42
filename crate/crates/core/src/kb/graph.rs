//! Graph encodings of the TBox (subsumption hierarchy rooted at `TOP`) and
//! of the ABox (labeled individuals and role edges).

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{Axiom, AxiomKind, ExplanationDataset, Vocabulary, EXEMPLAR, TOP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TBoxNodeKind {
    Concept,
    Role,
    Top,
}

/// Directed subsumption graph over `CN ∪ RN ∪ {TOP}`.
///
/// Every atom without an outgoing subsumption edge points at `TOP`. For
/// cyclic hierarchies, each cycle that cannot leave itself is attached to
/// `TOP` through its smallest member, so the undirected graph is always
/// connected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TBoxGraph {
    names: Vec<String>,
    kinds: Vec<TBoxNodeKind>,
    index: BTreeMap<String, usize>,
    edges: Vec<(usize, usize)>,
    undirected: Vec<Vec<usize>>,
}

impl TBoxGraph {
    pub fn new(vocabulary: &Vocabulary, tbox: &[Axiom]) -> Self {
        let mut names = Vec::new();
        let mut kinds = Vec::new();
        for c in &vocabulary.concept_names {
            names.push(c.clone());
            kinds.push(TBoxNodeKind::Concept);
        }
        for r in &vocabulary.role_names {
            names.push(r.clone());
            kinds.push(TBoxNodeKind::Role);
        }
        names.push(TOP.to_string());
        kinds.push(TBoxNodeKind::Top);
        let index: BTreeMap<String, usize> =
            names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let top = names.len() - 1;

        let mut edge_set = BTreeSet::new();
        for ax in tbox {
            let expected = match ax.kind {
                AxiomKind::Concept => TBoxNodeKind::Concept,
                AxiomKind::Role => TBoxNodeKind::Role,
            };
            if let (Some(&a), Some(&b)) = (index.get(&ax.sub), index.get(&ax.sup)) {
                if kinds[a] == expected && kinds[b] == expected {
                    edge_set.insert((a, b));
                }
            }
        }

        let mut succ = vec![Vec::new(); top];
        for &(a, b) in &edge_set {
            succ[a].push(b);
        }
        let comp = strongly_connected(&succ);
        let n_comp = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut leaves = vec![true; n_comp];
        for &(a, b) in &edge_set {
            if comp[a] != comp[b] {
                leaves[comp[a]] = false;
            }
        }
        let mut attached = vec![false; n_comp];
        for (node, &c) in comp.iter().enumerate() {
            // nodes are visited in index order, so the first member of a
            // sink component is its smallest name within the kind
            if leaves[c] && !attached[c] {
                attached[c] = true;
                edge_set.insert((node, top));
            }
        }

        let edges: Vec<(usize, usize)> = edge_set.into_iter().collect();
        let mut undirected = vec![Vec::new(); names.len()];
        for &(a, b) in &edges {
            undirected[a].push(b);
            if a != b {
                undirected[b].push(a);
            }
        }
        TBoxGraph { names, kinds, index, edges, undirected }
    }

    pub fn from_dataset(ds: &ExplanationDataset) -> Self {
        Self::new(&ds.vocabulary, &ds.kb.tbox)
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn node(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, node: usize) -> &str {
        &self.names[node]
    }

    pub fn kind(&self, node: usize) -> TBoxNodeKind {
        self.kinds[node]
    }

    pub fn top(&self) -> usize {
        self.names.len() - 1
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edges as name pairs, sorted by node index.
    pub fn named_edges(&self) -> Vec<(&str, &str)> {
        self.edges.iter().map(|&(a, b)| (self.name(a), self.name(b))).collect()
    }

    /// Undirected hop counts from `source`; `u32::MAX` marks unreachable.
    pub fn distances_from(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.names.len()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let next = dist[v] + 1;
            for &w in &self.undirected[v] {
                if dist[w] == u32::MAX {
                    dist[w] = next;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Component id per node (Kosaraju, iterative).
fn strongly_connected(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    let mut pred = vec![Vec::new(); n];
    for (a, outs) in succ.iter().enumerate() {
        for &b in outs {
            pred[b].push(a);
        }
    }
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for start in 0..n {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut stack = vec![(start, 0usize)];
        while let Some((v, i)) = stack.pop() {
            if i < succ[v].len() {
                stack.push((v, i + 1));
                let w = succ[v][i];
                if !visited[w] {
                    visited[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(v);
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for &root in order.iter().rev() {
        if comp[root] != usize::MAX {
            continue;
        }
        comp[root] = next;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &w in &pred[v] {
                if comp[w] == usize::MAX {
                    comp[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Groups of atoms that subsume each other (cycles, including `a ⊑ a`),
/// each sorted, in sorted order.
pub fn tbox_cycles(tbox: &[Axiom]) -> Vec<Vec<String>> {
    let mut names: BTreeSet<&str> = BTreeSet::new();
    for ax in tbox {
        names.insert(&ax.sub);
        names.insert(&ax.sup);
    }
    let names: Vec<&str> = names.into_iter().collect();
    let idx = |n: &str| names.binary_search(&n).unwrap();
    let mut succ = vec![Vec::new(); names.len()];
    let mut self_loops = BTreeSet::new();
    for ax in tbox {
        let (a, b) = (idx(&ax.sub), idx(&ax.sup));
        if a == b {
            self_loops.insert(a);
        }
        succ[a].push(b);
    }
    let comp = strongly_connected(&succ);
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &c) in comp.iter().enumerate() {
        groups.entry(c).or_default().push(v);
    }
    let mut cycles: Vec<Vec<String>> = groups
        .into_values()
        .filter(|g| g.len() > 1 || self_loops.contains(&g[0]))
        .map(|g| g.into_iter().map(|v| names[v].to_string()).collect())
        .collect();
    cycles.sort();
    cycles
}

/// Labeled ABox graph: nodes are individuals, node labels concept names,
/// edge labels role names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ABoxGraph {
    node_labels: BTreeMap<String, BTreeSet<String>>,
    edge_labels: BTreeMap<(String, String), BTreeSet<String>>,
    successors: BTreeMap<String, BTreeSet<String>>,
    predecessors: BTreeMap<String, BTreeSet<String>>,
}

impl ABoxGraph {
    /// Encodes the dataset's ABox; exemplars carry the `Exemplar` label.
    pub fn from_dataset(ds: &ExplanationDataset) -> Self {
        let mut g = ABoxGraph::default();
        for ind in &ds.vocabulary.individual_names {
            g.add_node(ind);
        }
        for e in &ds.exemplars {
            g.add_concept(EXEMPLAR, e);
        }
        for ca in &ds.kb.concept_assertions {
            g.add_concept(&ca.concept, &ca.individual);
        }
        for ra in &ds.kb.role_assertions {
            g.add_role(&ra.role, &ra.subject, &ra.object);
        }
        g
    }

    pub fn add_node(&mut self, node: &str) {
        if !self.node_labels.contains_key(node) {
            self.node_labels.insert(node.to_string(), BTreeSet::new());
        }
    }

    pub fn add_concept(&mut self, concept: &str, node: &str) {
        self.add_node(node);
        self.node_labels.get_mut(node).unwrap().insert(concept.to_string());
    }

    pub fn add_role(&mut self, role: &str, subject: &str, object: &str) {
        self.add_node(subject);
        self.add_node(object);
        self.edge_labels
            .entry((subject.to_string(), object.to_string()))
            .or_default()
            .insert(role.to_string());
        self.successors.entry(subject.to_string()).or_default().insert(object.to_string());
        self.predecessors.entry(object.to_string()).or_default().insert(subject.to_string());
    }

    pub fn contains(&self, node: &str) -> bool {
        self.node_labels.contains_key(node)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.node_labels.keys().map(String::as_str)
    }

    pub fn node_count(&self) -> usize {
        self.node_labels.len()
    }

    pub fn labels(&self, node: &str) -> Option<&BTreeSet<String>> {
        self.node_labels.get(node)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, &BTreeSet<String>)> {
        self.edge_labels.iter().map(|((a, b), l)| (a.as_str(), b.as_str(), l))
    }

    pub fn edge_count(&self) -> usize {
        self.edge_labels.len()
    }

    pub fn edge_labels(&self, subject: &str, object: &str) -> Option<&BTreeSet<String>> {
        self.edge_labels.get(&(subject.to_string(), object.to_string()))
    }

    pub fn successors(&self, node: &str) -> impl Iterator<Item = &str> {
        self.successors.get(node).into_iter().flatten().map(String::as_str)
    }

    fn neighbors(&self, node: &str) -> impl Iterator<Item = &str> {
        self.successors(node)
            .chain(self.predecessors.get(node).into_iter().flatten().map(String::as_str))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("unknown exemplar `{0}`")]
    UnknownExemplar(String),
}

/// Connected component (ignoring edge direction) around one exemplar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ABoxComponent {
    pub exemplar: String,
    pub graph: ABoxGraph,
}

pub fn exemplar_component(g: &ABoxGraph, exemplar: &str) -> Result<ABoxComponent, GraphError> {
    if !g.contains(exemplar) {
        return Err(GraphError::UnknownExemplar(exemplar.to_string()));
    }
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(exemplar);
    queue.push_back(exemplar);
    while let Some(v) = queue.pop_front() {
        for w in g.neighbors(v) {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    let mut sub = ABoxGraph::default();
    for &v in &seen {
        sub.add_node(v);
        for c in g.labels(v).into_iter().flatten() {
            sub.add_concept(c, v);
        }
        for w in g.successors(v) {
            for r in g.edge_labels(v, w).into_iter().flatten() {
                sub.add_role(r, v, w);
            }
        }
    }
    Ok(ABoxComponent { exemplar: exemplar.to_string(), graph: sub })
}

//! Exact graph edit distance between two ABox components.
//!
//! Depth-first branch and bound over node mappings (source nodes in id
//! order, each mapped to an unused target node or deleted), seeded with a
//! greedy upper bound and pruned with a label-only assignment lower bound.
//!
//! Costs mirror the set-based rules: node substitution is the label edit
//! distance of the two concept sets, edge substitution that of the two role
//! sets, and insertion/deletion of a node or edge is the sum of its members'
//! distances to `TOP`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::cost::{Atom, CostError, CostModel};
use crate::edit::{label_edit_distance, EditError, EditOp, EditPath, LabelPair, Site};
use crate::kb::graph::ABoxComponent;
use crate::kb::EXEMPLAR;
use crate::matching::{min_weight_full_match, CostMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GedBudget {
    pub max_nodes: usize,
}

impl Default for GedBudget {
    fn default() -> Self {
        GedBudget { max_nodes: 10 }
    }
}

/// Polled during search; returning true stops it with the best result so
/// far marked non-optimal.
pub trait Interrupt {
    fn should_stop(&self) -> bool;
}

impl<F: Fn() -> bool> Interrupt for F {
    fn should_stop(&self) -> bool {
        self()
    }
}

/// Never interrupts.
pub struct Never;

impl Interrupt for Never {
    fn should_stop(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GraphEditKind {
    NodeSubstitute,
    NodeDelete,
    NodeInsert,
    EdgeSubstitute,
    EdgeDelete,
    EdgeInsert,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GraphElement {
    Node(String),
    Edge(String, String),
}

impl GraphElement {
    fn site_name(&self) -> String {
        match self {
            GraphElement::Node(n) => n.clone(),
            GraphElement::Edge(a, b) => format!("{a}->{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphEditOp {
    pub kind: GraphEditKind,
    pub source: Option<GraphElement>,
    pub target: Option<GraphElement>,
    pub source_labels: BTreeSet<Atom>,
    pub target_labels: BTreeSet<Atom>,
    pub cost: f64,
    /// Atom-level edits realizing this operation.
    pub edits: Vec<EditOp>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GedResult {
    pub cost: f64,
    pub ops: Vec<GraphEditOp>,
    /// False when the search was interrupted.
    pub optimal: bool,
    /// `(source node, target node)`; `None` for deletions/insertions.
    pub mapping: Vec<(Option<String>, Option<String>)>,
}

impl GedResult {
    /// Flattens the graph edits into an atom-level edit path.
    pub fn to_edit_path(&self, source: &str, target: &str) -> EditPath {
        let mut path = EditPath::empty(source, target);
        for op in &self.ops {
            let site = Site {
                source: op.source.as_ref().map(GraphElement::site_name),
                target: op.target.as_ref().map(GraphElement::site_name),
            };
            for e in &op.edits {
                path.ops.push(EditOp { site: Some(site.clone()), ..e.clone() });
            }
        }
        path.alignment = self
            .mapping
            .iter()
            .map(|(s, t)| LabelPair { source: s.clone(), target: t.clone() })
            .collect();
        path.total_cost = path.op_cost_sum();
        path
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GedError {
    #[error("component with {nodes} nodes exceeds the node budget of {limit}")]
    BudgetExceeded { limit: usize, nodes: usize },
    #[error(transparent)]
    Cost(#[from] CostError),
}

const NONE: usize = usize::MAX;

struct Side {
    nodes: Vec<String>,
    labels: Vec<BTreeSet<Atom>>,
    edges: Vec<(usize, usize)>,
    edge_labels: Vec<BTreeSet<Atom>>,
    adj: Vec<Vec<usize>>,
}

impl Side {
    fn new(comp: &ABoxComponent) -> Side {
        let nodes: Vec<String> = comp.graph.nodes().map(String::from).collect();
        let index: BTreeMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let labels = nodes
            .iter()
            .map(|n| {
                comp.graph
                    .labels(n)
                    .into_iter()
                    .flatten()
                    .filter(|c| c.as_str() != EXEMPLAR)
                    .map(|c| Atom::concept(c))
                    .collect()
            })
            .collect();
        let mut edges = Vec::new();
        let mut edge_labels = Vec::new();
        let mut adj = vec![vec![NONE; nodes.len()]; nodes.len()];
        for (a, b, roles) in comp.graph.edges() {
            let (i, j) = (index[a], index[b]);
            adj[i][j] = edges.len();
            edges.push((i, j));
            edge_labels.push(roles.iter().map(|r| Atom::role(r)).collect());
        }
        Side { nodes, labels, edges, edge_labels, adj }
    }
}

fn set_cost(cm: &CostModel, a: &BTreeSet<Atom>, b: &BTreeSet<Atom>) -> Result<f64, CostError> {
    match label_edit_distance(cm, a, b) {
        Ok((c, _)) => Ok(c),
        Err(EditError::Infeasible(_)) => Ok(f64::INFINITY),
        Err(EditError::Cost(e)) => Err(e),
        Err(EditError::InconsistentPath(_)) => unreachable!(),
    }
}

fn remove_all(cm: &CostModel, set: &BTreeSet<Atom>, delete: bool) -> Result<(f64, Vec<EditOp>), CostError> {
    let mut total = 0.0;
    let mut ops = Vec::new();
    for atom in set {
        let (from, to) = if delete { (atom.clone(), Atom::Top) } else { (Atom::Top, atom.clone()) };
        let cost = cm.edit_cost(&from, &to)?;
        total += cost;
        ops.push(EditOp { from, to, cost, site: None });
    }
    Ok((total, ops))
}

struct Costs {
    node_sub: Vec<Vec<f64>>,
    node_del: Vec<f64>,
    node_ins: Vec<f64>,
    edge_sub: Vec<Vec<f64>>,
    edge_del: Vec<f64>,
    edge_ins: Vec<f64>,
}

struct Search<'a> {
    a: &'a Side,
    b: &'a Side,
    c: &'a Costs,
    interrupt: &'a dyn Interrupt,
    map: Vec<usize>,
    used: Vec<bool>,
    best: f64,
    best_map: Vec<usize>,
    found_by_search: bool,
    expansions: u64,
    stopped: bool,
}

impl Search<'_> {
    /// Cost added by mapping source node `i` to `x` given `map[..i]`.
    fn step_cost(&self, i: usize, x: usize) -> f64 {
        let (a, b, c) = (self.a, self.b, self.c);
        let mut cost = if x == NONE { c.node_del[i] } else { c.node_sub[i][x] };
        for k in 0..=i {
            let y = if k == i { x } else { self.map[k] };
            let directions: &[(usize, usize, usize, usize)] =
                if k == i { &[(i, i, x, x)] } else { &[(i, k, x, y), (k, i, y, x)] };
            for &(p, q, ip, iq) in directions {
                let ea = a.adj[p][q];
                let eb = if ip != NONE && iq != NONE { b.adj[ip][iq] } else { NONE };
                match (ea != NONE, eb != NONE) {
                    (true, true) => cost += c.edge_sub[ea][eb],
                    (true, false) => cost += c.edge_del[ea],
                    (false, true) => cost += c.edge_ins[eb],
                    (false, false) => {}
                }
            }
        }
        cost
    }

    /// Insertion of every unused target node and its incident edges.
    fn completion(&self) -> f64 {
        let mut cost = 0.0;
        for (j, &u) in self.used.iter().enumerate() {
            if !u {
                cost += self.c.node_ins[j];
            }
        }
        for (e, &(s, t)) in self.b.edges.iter().enumerate() {
            if !self.used[s] || !self.used[t] {
                cost += self.c.edge_ins[e];
            }
        }
        cost
    }

    /// Admissible bound: optimal assignment of remaining nodes on node
    /// costs alone.
    fn lower_bound(&self, from: usize) -> f64 {
        let rows: Vec<usize> = (from..self.a.nodes.len()).collect();
        let cols: Vec<usize> = (0..self.b.nodes.len()).filter(|&j| !self.used[j]).collect();
        let (r, u) = (rows.len(), cols.len());
        if r + u == 0 {
            return 0.0;
        }
        let mut w = CostMatrix::new(r + u, u + r, f64::INFINITY);
        for (ri, &i) in rows.iter().enumerate() {
            for (ci, &j) in cols.iter().enumerate() {
                w.set(ri, ci, self.c.node_sub[i][j]);
            }
            w.set(ri, u + ri, self.c.node_del[i]);
        }
        for (ci, &j) in cols.iter().enumerate() {
            w.set(r + ci, ci, self.c.node_ins[j]);
            for k in 0..r {
                w.set(r + ci, u + k, 0.0);
            }
        }
        min_weight_full_match(&w).map_or(f64::INFINITY, |m| m.cost)
    }

    fn pruned(&self, bound: f64) -> bool {
        if self.found_by_search {
            bound >= self.best
        } else {
            bound > self.best
        }
    }

    fn dfs(&mut self, i: usize, g: f64) {
        if self.stopped {
            return;
        }
        self.expansions += 1;
        if self.expansions % 256 == 1 && self.interrupt.should_stop() {
            self.stopped = true;
            return;
        }
        if i == self.a.nodes.len() {
            let total = g + self.completion();
            if total < self.best || (!self.found_by_search && total <= self.best) {
                self.best = total;
                self.best_map.clone_from(&self.map);
                self.found_by_search = true;
            }
            return;
        }
        if self.pruned(g + self.lower_bound(i)) {
            return;
        }
        let nb = self.b.nodes.len();
        for x in (0..nb).chain(core::iter::once(NONE)) {
            if x != NONE && self.used[x] {
                continue;
            }
            let step = self.step_cost(i, x);
            if self.pruned(g + step) {
                continue;
            }
            self.map[i] = x;
            if x != NONE {
                self.used[x] = true;
            }
            self.dfs(i + 1, g + step);
            if x != NONE {
                self.used[x] = false;
            }
            self.map[i] = NONE;
            if self.stopped {
                return;
            }
        }
    }

    fn greedy(&mut self) -> (f64, Vec<usize>) {
        let mut g = 0.0;
        let nb = self.b.nodes.len();
        for i in 0..self.a.nodes.len() {
            let mut choice = (f64::INFINITY, NONE);
            for x in (0..nb).chain(core::iter::once(NONE)) {
                if x != NONE && self.used[x] {
                    continue;
                }
                let s = self.step_cost(i, x);
                if s < choice.0 {
                    choice = (s, x);
                }
            }
            self.map[i] = choice.1;
            if choice.1 != NONE {
                self.used[choice.1] = true;
            }
            g += choice.0;
        }
        let total = g + self.completion();
        let map = core::mem::replace(&mut self.map, vec![NONE; self.a.nodes.len()]);
        self.used.fill(false);
        (total, map)
    }
}

/// Exact graph edit distance from component `a` to component `b`.
pub fn exact_ged(
    cm: &CostModel,
    a: &ABoxComponent,
    b: &ABoxComponent,
    budget: &GedBudget,
    interrupt: &dyn Interrupt,
) -> Result<GedResult, GedError> {
    for comp in [a, b] {
        let nodes = comp.graph.node_count();
        if nodes > budget.max_nodes {
            return Err(GedError::BudgetExceeded { limit: budget.max_nodes, nodes });
        }
    }
    let (sa, sb) = (Side::new(a), Side::new(b));
    let mut costs = Costs {
        node_sub: vec![vec![0.0; sb.nodes.len()]; sa.nodes.len()],
        node_del: Vec::new(),
        node_ins: Vec::new(),
        edge_sub: vec![vec![0.0; sb.edges.len()]; sa.edges.len()],
        edge_del: Vec::new(),
        edge_ins: Vec::new(),
    };
    for (i, la) in sa.labels.iter().enumerate() {
        for (j, lb) in sb.labels.iter().enumerate() {
            costs.node_sub[i][j] = set_cost(cm, la, lb)?;
        }
        costs.node_del.push(remove_all(cm, la, true)?.0);
    }
    for lb in &sb.labels {
        costs.node_ins.push(remove_all(cm, lb, false)?.0);
    }
    for (i, la) in sa.edge_labels.iter().enumerate() {
        for (j, lb) in sb.edge_labels.iter().enumerate() {
            costs.edge_sub[i][j] = set_cost(cm, la, lb)?;
        }
        costs.edge_del.push(remove_all(cm, la, true)?.0);
    }
    for lb in &sb.edge_labels {
        costs.edge_ins.push(remove_all(cm, lb, false)?.0);
    }

    let mut search = Search {
        a: &sa,
        b: &sb,
        c: &costs,
        interrupt,
        map: vec![NONE; sa.nodes.len()],
        used: vec![false; sb.nodes.len()],
        best: f64::INFINITY,
        best_map: Vec::new(),
        found_by_search: false,
        expansions: 0,
        stopped: false,
    };
    let (ub, ub_map) = search.greedy();
    search.best = ub;
    search.best_map = ub_map;
    search.dfs(0, 0.0);
    let optimal = !search.stopped;
    let best_map = search.best_map;
    build_result(cm, &sa, &sb, &best_map, optimal)
}

fn build_result(cm: &CostModel, a: &Side, b: &Side, map: &[usize], optimal: bool) -> Result<GedResult, GedError> {
    let mut ops = Vec::new();
    let mut mapping = Vec::new();
    let mut used = vec![false; b.nodes.len()];
    let node = |s: &Side, i: usize| GraphElement::Node(s.nodes[i].clone());
    let edge = |s: &Side, e: usize| {
        let (p, q) = s.edges[e];
        GraphElement::Edge(s.nodes[p].clone(), s.nodes[q].clone())
    };
    let sub_edits = |x: &BTreeSet<Atom>, y: &BTreeSet<Atom>| -> Result<(f64, Vec<EditOp>), GedError> {
        match label_edit_distance(cm, x, y) {
            Ok(r) => Ok(r),
            Err(EditError::Cost(e)) => Err(e.into()),
            Err(_) => Ok((f64::INFINITY, Vec::new())),
        }
    };

    for (i, &x) in map.iter().enumerate() {
        if x == NONE {
            let (cost, edits) = remove_all(cm, &a.labels[i], true)?;
            ops.push(GraphEditOp {
                kind: GraphEditKind::NodeDelete,
                source: Some(node(a, i)),
                target: None,
                source_labels: a.labels[i].clone(),
                target_labels: BTreeSet::new(),
                cost,
                edits,
            });
            mapping.push((Some(a.nodes[i].clone()), None));
        } else {
            used[x] = true;
            mapping.push((Some(a.nodes[i].clone()), Some(b.nodes[x].clone())));
            if a.labels[i] != b.labels[x] {
                let (cost, edits) = sub_edits(&a.labels[i], &b.labels[x])?;
                ops.push(GraphEditOp {
                    kind: GraphEditKind::NodeSubstitute,
                    source: Some(node(a, i)),
                    target: Some(node(b, x)),
                    source_labels: a.labels[i].clone(),
                    target_labels: b.labels[x].clone(),
                    cost,
                    edits,
                });
            }
        }
    }
    for (j, &u) in used.iter().enumerate() {
        if !u {
            let (cost, edits) = remove_all(cm, &b.labels[j], false)?;
            ops.push(GraphEditOp {
                kind: GraphEditKind::NodeInsert,
                source: None,
                target: Some(node(b, j)),
                source_labels: BTreeSet::new(),
                target_labels: b.labels[j].clone(),
                cost,
                edits,
            });
            mapping.push((None, Some(b.nodes[j].clone())));
        }
    }
    let mut matched_b = vec![false; b.edges.len()];
    for (ea, &(p, q)) in a.edges.iter().enumerate() {
        let (ip, iq) = (map[p], map[q]);
        let eb = if ip != NONE && iq != NONE { b.adj[ip][iq] } else { NONE };
        if eb == NONE {
            let (cost, edits) = remove_all(cm, &a.edge_labels[ea], true)?;
            ops.push(GraphEditOp {
                kind: GraphEditKind::EdgeDelete,
                source: Some(edge(a, ea)),
                target: None,
                source_labels: a.edge_labels[ea].clone(),
                target_labels: BTreeSet::new(),
                cost,
                edits,
            });
            continue;
        }
        matched_b[eb] = true;
        if a.edge_labels[ea] != b.edge_labels[eb] {
            let (cost, edits) = sub_edits(&a.edge_labels[ea], &b.edge_labels[eb])?;
            ops.push(GraphEditOp {
                kind: GraphEditKind::EdgeSubstitute,
                source: Some(edge(a, ea)),
                target: Some(edge(b, eb)),
                source_labels: a.edge_labels[ea].clone(),
                target_labels: b.edge_labels[eb].clone(),
                cost,
                edits,
            });
        }
    }
    for (eb, &m) in matched_b.iter().enumerate() {
        if !m {
            let (cost, edits) = remove_all(cm, &b.edge_labels[eb], false)?;
            ops.push(GraphEditOp {
                kind: GraphEditKind::EdgeInsert,
                source: None,
                target: Some(edge(b, eb)),
                source_labels: BTreeSet::new(),
                target_labels: b.edge_labels[eb].clone(),
                cost,
                edits,
            });
        }
    }
    let cost = ops.iter().map(|o| o.cost).sum();
    Ok(GedResult { cost, ops, optimal, mapping })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::fixtures::animal_tbox;
    use crate::kb::graph::{exemplar_component, ABoxGraph};
    use crate::kb::DatasetBuilder;

    fn component(build: DatasetBuilder, e: &str) -> (ABoxComponent, crate::kb::ExplanationDataset) {
        let (ds, _) = build.build().unwrap();
        let g = ABoxGraph::from_dataset(&ds);
        (exemplar_component(&g, e).unwrap(), ds)
    }

    fn pets() -> DatasetBuilder {
        let mut b = DatasetBuilder::new();
        for ax in animal_tbox() {
            b = b.axiom(ax);
        }
        b.assert_role("depicts", "e1", "x")
            .assert_concept("Cat", "x")
            .assert_role("depicts", "e2", "y")
            .assert_concept("Dog", "y")
            .exemplar("e1", "A")
            .exemplar("e2", "B")
    }

    #[test]
    fn identical_components() {
        let (c, ds) = component(pets(), "e1");
        let cm = CostModel::from_dataset(&ds);
        let r = exact_ged(&cm, &c, &c, &GedBudget::default(), &Never).unwrap();
        assert_eq!(r.cost, 0.0);
        assert!(r.ops.is_empty());
        assert!(r.optimal);
    }

    #[test]
    fn one_label_differs() {
        let (c1, ds) = component(pets(), "e1");
        let (c2, _) = component(pets(), "e2");
        let cm = CostModel::from_dataset(&ds);
        let r = exact_ged(&cm, &c1, &c2, &GedBudget::default(), &Never).unwrap();
        assert_eq!(r.cost, 2.0);
        assert_eq!(r.ops.len(), 1);
        assert_eq!(r.ops[0].kind, GraphEditKind::NodeSubstitute);
        assert_eq!(r.ops[0].edits[0].from, Atom::concept("Cat"));
        assert_eq!(r.ops[0].edits[0].to, Atom::concept("Dog"));
        let p = r.to_edit_path("e1", "e2");
        assert_eq!(p.total_cost, 2.0);
    }

    #[test]
    fn budget_is_enforced() {
        let (c, ds) = component(pets(), "e1");
        let cm = CostModel::from_dataset(&ds);
        let err = exact_ged(&cm, &c, &c, &GedBudget { max_nodes: 1 }, &Never).unwrap_err();
        assert_eq!(err, GedError::BudgetExceeded { limit: 1, nodes: 2 });
    }

    #[test]
    fn interrupted_search_is_flagged() {
        let (c1, ds) = component(pets(), "e1");
        let (c2, _) = component(pets(), "e2");
        let cm = CostModel::from_dataset(&ds);
        let stop = || true;
        let r = exact_ged(&cm, &c1, &c2, &GedBudget::default(), &stop).unwrap();
        assert!(!r.optimal);
        assert_eq!(r.cost, 2.0);
    }
}

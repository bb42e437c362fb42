//! Exhaustive reference implementations and random-case builders shared by
//! the property suites and the acceptance runner.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use semcf_core::kb::graph::ABoxGraph;
use semcf_core::{
    ABoxComponent, Atom, Axiom, ConceptSetDescription, CostModel, Label, TBoxGraph, Vocabulary,
};

const INF: f64 = f64::INFINITY;

/// Minimum over every assignment of the smaller side of `w` into the larger.
pub fn brute_assignment(w: &[Vec<f64>]) -> f64 {
    let rows = w.len();
    let cols = w.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let get = |i: usize, j: usize| if rows <= cols { w[i][j] } else { w[j][i] };
    let (small, large) = (rows.min(cols), rows.max(cols));
    fn go(i: usize, small: usize, large: usize, used: &mut Vec<bool>, get: &dyn Fn(usize, usize) -> f64) -> f64 {
        if i == small {
            return 0.0;
        }
        let mut best = INF;
        for j in 0..large {
            if used[j] || get(i, j) == INF {
                continue;
            }
            used[j] = true;
            let c = get(i, j) + go(i + 1, small, large, used, get);
            used[j] = false;
            if c < best {
                best = c;
            }
        }
        best
    }
    go(0, small, large, &mut vec![false; large], &get)
}

pub fn insert_cost(cm: &CostModel, set: &BTreeSet<Atom>) -> f64 {
    set.iter().map(|x| cm.edit_cost(&Atom::Top, x).unwrap()).sum()
}

pub fn delete_cost(cm: &CostModel, set: &BTreeSet<Atom>) -> f64 {
    set.iter().map(|x| cm.edit_cost(x, &Atom::Top).unwrap()).sum()
}

/// Label-set distance by enumerating every bijection after padding the
/// smaller set with `TOP`.
pub fn brute_label(cm: &CostModel, a: &BTreeSet<Atom>, b: &BTreeSet<Atom>) -> f64 {
    let k = a.len().max(b.len());
    let pad = |s: &BTreeSet<Atom>| {
        let mut v: Vec<Atom> = s.iter().cloned().collect();
        v.resize(k, Atom::Top);
        v
    };
    let (a, b) = (pad(a), pad(b));
    let w: Vec<Vec<f64>> = a
        .iter()
        .map(|x| b.iter().map(|y| if x == y { 0.0 } else { cm.edit_cost(x, y).unwrap() }).collect())
        .collect();
    brute_assignment(&w)
}

/// Description distance by enumerating every label bijection after padding
/// the smaller side with empty labels.
pub fn brute_description(cm: &CostModel, a: &ConceptSetDescription, b: &ConceptSetDescription) -> f64 {
    let k = a.labels.len().max(b.labels.len());
    fn side(d: &ConceptSetDescription, k: usize) -> Vec<Option<&BTreeSet<Atom>>> {
        let mut v: Vec<Option<&BTreeSet<Atom>>> = d.labels.iter().map(|l| Some(&l.atoms)).collect();
        v.resize(k, None);
        v
    }
    let (sa, sb) = (side(a, k), side(b, k));
    let w: Vec<Vec<f64>> = sa
        .iter()
        .map(|x| {
            sb.iter()
                .map(|y| match (x, y) {
                    (Some(x), Some(y)) => brute_label(cm, x, y),
                    (Some(x), None) => delete_cost(cm, x),
                    (None, Some(y)) => insert_cost(cm, y),
                    (None, None) => unreachable!(),
                })
                .collect()
        })
        .collect();
    brute_assignment(&w)
}

fn concepts(c: &ABoxComponent, n: &str) -> BTreeSet<Atom> {
    c.graph.labels(n).unwrap().iter().filter(|x| x.as_str() != "Exemplar").map(|x| Atom::concept(x)).collect()
}

fn roles(set: &BTreeSet<String>) -> BTreeSet<Atom> {
    set.iter().map(|r| Atom::role(r)).collect()
}

/// Graph edit distance by enumerating every partial injective node map.
pub fn brute_ged(cm: &CostModel, a: &ABoxComponent, b: &ABoxComponent) -> f64 {
    let an: Vec<&str> = a.graph.nodes().collect();
    let bn: Vec<&str> = b.graph.nodes().collect();
    let mut best = INF;
    let mut map: Vec<Option<usize>> = vec![None; an.len()];
    let mut used = vec![false; bn.len()];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        cm: &CostModel,
        a: &ABoxComponent,
        b: &ABoxComponent,
        an: &[&str],
        bn: &[&str],
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        best: &mut f64,
    ) {
        if i == an.len() {
            let c = mapping_cost(cm, a, b, an, bn, map);
            if c < *best {
                *best = c;
            }
            return;
        }
        map[i] = None;
        rec(i + 1, cm, a, b, an, bn, map, used, best);
        for j in 0..bn.len() {
            if !used[j] {
                used[j] = true;
                map[i] = Some(j);
                rec(i + 1, cm, a, b, an, bn, map, used, best);
                used[j] = false;
            }
        }
        map[i] = None;
    }
    rec(0, cm, a, b, &an, &bn, &mut map, &mut used, &mut best);
    best
}

fn mapping_cost(
    cm: &CostModel,
    a: &ABoxComponent,
    b: &ABoxComponent,
    an: &[&str],
    bn: &[&str],
    map: &[Option<usize>],
) -> f64 {
    let mut cost = 0.0;
    let mut hit = vec![false; bn.len()];
    for (i, m) in map.iter().enumerate() {
        match m {
            Some(j) => {
                hit[*j] = true;
                cost += brute_label(cm, &concepts(a, an[i]), &concepts(b, bn[*j]));
            }
            None => cost += delete_cost(cm, &concepts(a, an[i])),
        }
    }
    for (j, h) in hit.iter().enumerate() {
        if !h {
            cost += insert_cost(cm, &concepts(b, bn[j]));
        }
    }
    let index = |names: &[&str], n: &str| names.iter().position(|x| *x == n).unwrap();
    let mut covered = BTreeSet::new();
    for (s, t, ra) in a.graph.edges() {
        let image = match (map[index(an, s)], map[index(an, t)]) {
            (Some(x), Some(y)) => b.graph.edge_labels(bn[x], bn[y]).map(|rb| (x, y, rb)),
            _ => None,
        };
        match image {
            Some((x, y, rb)) => {
                covered.insert((x, y));
                cost += brute_label(cm, &roles(ra), &roles(rb));
            }
            None => cost += delete_cost(cm, &roles(ra)),
        }
    }
    for (s, t, rb) in b.graph.edges() {
        if !covered.contains(&(index(bn, s), index(bn, t))) {
            cost += insert_cost(cm, &roles(rb));
        }
    }
    cost
}

/// All-pairs undirected hop counts over the subsumption graph built from
/// scratch: one edge per axiom, and an edge to `TOP` for every name without
/// a superclass. Only meaningful for acyclic hierarchies.
pub fn floyd_warshall(vocab: &Vocabulary, tbox: &[Axiom]) -> BTreeMap<(String, String), f64> {
    let mut names: Vec<String> = vocab.concept_names.iter().chain(&vocab.role_names).cloned().collect();
    names.push("TOP".into());
    let n = names.len();
    let idx = |s: &str| names.iter().position(|x| x == s).unwrap();
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    let mut has_sup = vec![false; n];
    for ax in tbox {
        let (s, t) = (idx(&ax.sub), idx(&ax.sup));
        has_sup[s] = true;
        d[s][t] = d[s][t].min(1.0);
        d[t][s] = d[t][s].min(1.0);
    }
    let top = n - 1;
    for i in 0..top {
        if !has_sup[i] {
            d[i][top] = 1.0;
            d[top][i] = 1.0;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            out.insert((names[i].clone(), names[j].clone()), d[i][j]);
        }
    }
    out
}

/// Random-case description independent of any generator library.
#[derive(Debug, Clone)]
pub struct RawTBox {
    pub concepts: usize,
    pub roles: usize,
    /// `(sub, sup)` index pairs; only pairs with `sub < sup` are used, which
    /// keeps the hierarchy acyclic.
    pub concept_axioms: Vec<(usize, usize)>,
    pub role_axioms: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RawAtom {
    Concept(usize),
    Exists(usize, usize),
}

pub fn concept_name(i: usize) -> String {
    format!("C{i}")
}

pub fn role_name(i: usize) -> String {
    format!("r{i}")
}

impl RawTBox {
    pub fn vocabulary(&self) -> Vocabulary {
        Vocabulary {
            concept_names: (0..self.concepts).map(concept_name).collect(),
            role_names: (0..self.roles).map(role_name).collect(),
            individual_names: BTreeSet::new(),
        }
    }

    pub fn axioms(&self) -> Vec<Axiom> {
        let mut out = Vec::new();
        for &(s, t) in &self.concept_axioms {
            let (s, t) = (s % self.concepts, t % self.concepts);
            if s < t {
                out.push(Axiom::concept(&concept_name(s), &concept_name(t)));
            }
        }
        for &(s, t) in &self.role_axioms {
            let (s, t) = (s % self.roles, t % self.roles);
            if s < t {
                out.push(Axiom::role(&role_name(s), &role_name(t)));
            }
        }
        out.sort_by(|a, b| (&a.sub, &a.sup).cmp(&(&b.sub, &b.sup)));
        out.dedup();
        out
    }

    pub fn cost_model(&self) -> CostModel {
        CostModel::new(TBoxGraph::new(&self.vocabulary(), &self.axioms()))
    }

    pub fn atom(&self, a: RawAtom) -> Atom {
        match a {
            RawAtom::Concept(c) => Atom::concept(&concept_name(c % self.concepts)),
            RawAtom::Exists(r, c) => Atom::exists(&role_name(r % self.roles), &concept_name(c % self.concepts)),
        }
    }

    pub fn description(&self, exemplar: &str, labels: &[Vec<RawAtom>]) -> ConceptSetDescription {
        ConceptSetDescription {
            exemplar: exemplar.into(),
            labels: labels
                .iter()
                .enumerate()
                .map(|(i, l)| Label {
                    node: format!("{exemplar}{i}"),
                    atoms: l.iter().map(|&a| self.atom(a)).collect(),
                })
                .collect(),
        }
    }

    /// Component whose node `i` carries concepts `nodes[i]`; `edges` are
    /// `(subject, object, role)` index triples. Node 0 is the exemplar.
    pub fn component(&self, exemplar: &str, nodes: &[Vec<usize>], edges: &[(usize, usize, usize)]) -> ABoxComponent {
        let name = |i: usize| if i == 0 { exemplar.to_string() } else { format!("{exemplar}{i}") };
        let mut g = ABoxGraph::default();
        g.add_concept("Exemplar", exemplar);
        for (i, cs) in nodes.iter().enumerate() {
            g.add_node(&name(i));
            for &c in cs {
                g.add_concept(&concept_name(c % self.concepts), &name(i));
            }
        }
        for &(s, t, r) in edges {
            let (s, t) = (s % nodes.len(), t % nodes.len());
            g.add_role(&role_name(r % self.roles), &name(s), &name(t));
        }
        ABoxComponent { exemplar: exemplar.into(), graph: g }
    }
}

//! Roll-up of an exemplar's ABox component into a multiset of label-sets.
//!
//! Each non-exemplar node contributes one label-set: its concept names plus
//! `∃r.C` for every outgoing edge `r(a, b)` with `C(b)`.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cost::Atom;
use crate::kb::graph::ABoxComponent;
use crate::kb::{EXEMPLAR, TOP};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    /// Individual the label-set was rolled up from.
    pub node: String,
    pub atoms: BTreeSet<Atom>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptSetDescription {
    pub exemplar: String,
    /// Sorted by originating node.
    pub labels: Vec<Label>,
}

impl ConceptSetDescription {
    /// Label-sets without node tags, sorted; two descriptions are equal as
    /// multisets of sets iff these are equal.
    pub fn multiset(&self) -> Vec<&BTreeSet<Atom>> {
        let mut sets: Vec<_> = self.labels.iter().map(|l| &l.atoms).collect();
        sets.sort();
        sets
    }

    pub fn same_labels(&self, other: &ConceptSetDescription) -> bool {
        self.multiset() == other.multiset()
    }

    pub fn label(&self, node: &str) -> Option<&Label> {
        self.labels.iter().find(|l| l.node == node)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct RollupOptions {
    /// Emit `∃r.⊤` for edges whose target carries no concept.
    pub unlabeled_filler_as_top: bool,
}

fn concepts_of<'a>(comp: &'a ABoxComponent, node: &str) -> impl Iterator<Item = &'a String> {
    comp.graph.labels(node).into_iter().flatten().filter(|c| c.as_str() != EXEMPLAR)
}

pub fn roll_up(comp: &ABoxComponent, opts: &RollupOptions) -> ConceptSetDescription {
    let mut labels = Vec::new();
    for node in comp.graph.nodes() {
        if node == comp.exemplar {
            continue;
        }
        let mut atoms: BTreeSet<Atom> = concepts_of(comp, node).map(|c| Atom::Concept(c.clone())).collect();
        for object in comp.graph.successors(node) {
            let roles = comp.graph.edge_labels(node, object).into_iter().flatten();
            let fillers: Vec<&String> = concepts_of(comp, object).collect();
            for role in roles {
                if fillers.is_empty() {
                    if opts.unlabeled_filler_as_top {
                        atoms.insert(Atom::exists(role, TOP));
                    }
                    continue;
                }
                for filler in &fillers {
                    atoms.insert(Atom::exists(role, filler));
                }
            }
        }
        labels.push(Label { node: node.into(), atoms });
    }
    ConceptSetDescription { exemplar: comp.exemplar.clone(), labels }
}

#![allow(dead_code)]

use proptest::collection::vec;
use proptest::prelude::*;

use crate::support::{RawAtom, RawTBox};

pub fn tbox(max_concepts: usize, max_roles: usize) -> impl Strategy<Value = RawTBox> {
    (1..=max_concepts, 1..=max_roles).prop_flat_map(move |(c, r)| {
        (vec((0..c, 0..c), 0..=2 * c), vec((0..r, 0..r), 0..=r)).prop_map(move |(ca, ra)| RawTBox {
            concepts: c,
            roles: r,
            concept_axioms: ca,
            role_axioms: ra,
        })
    })
}

pub fn atom() -> impl Strategy<Value = RawAtom> {
    prop_oneof![
        (0..16usize).prop_map(RawAtom::Concept),
        (0..16usize, 0..16usize).prop_map(|(r, c)| RawAtom::Exists(r, c)),
    ]
}

pub fn label(max_atoms: usize) -> impl Strategy<Value = Vec<RawAtom>> {
    vec(atom(), 0..=max_atoms)
}

pub fn labels(max_labels: usize, max_atoms: usize) -> impl Strategy<Value = Vec<Vec<RawAtom>>> {
    vec(label(max_atoms), 0..=max_labels)
}

/// Node concepts and `(subject, object, role)` edges.
pub type RawComponent = (Vec<Vec<usize>>, Vec<(usize, usize, usize)>);

/// `(node concepts, edges)` for a component of at most `max_nodes` nodes.
pub fn component(max_nodes: usize) -> impl Strategy<Value = RawComponent> {
    (1..=max_nodes).prop_flat_map(|n| {
        (vec(vec(0..16usize, 0..=2), n), vec((0..n, 0..n, 0..16usize), 0..=n + 1))
    })
}

pub fn weight() -> impl Strategy<Value = f64> {
    prop_oneof![9 => (0..=10u32).prop_map(f64::from), 1 => Just(f64::INFINITY)]
}

pub fn matrix(max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| vec(vec(weight(), c), r))
}

/// Random dataset: exemplar `e{i}` depicts its own individuals `e{i}n{j}`,
/// which carry concepts and role edges among themselves. Classes cycle
/// through `K0..K{classes}`.
#[derive(Debug, Clone)]
pub struct RawDataset {
    pub tbox: RawTBox,
    pub exemplars: Vec<RawComponent>,
    pub classes: Vec<usize>,
}

impl RawDataset {
    pub fn build(&self) -> semcf_core::ExplanationDataset {
        use crate::support::{concept_name, role_name};
        let mut b = semcf_core::DatasetBuilder::new().role("depicts");
        for c in 0..self.tbox.concepts {
            b = b.concept(&concept_name(c));
        }
        for r in 0..self.tbox.roles {
            b = b.role(&role_name(r));
        }
        for ax in self.tbox.axioms() {
            b = b.axiom(ax);
        }
        for (i, (nodes, edges)) in self.exemplars.iter().enumerate() {
            let e = format!("e{i}");
            let ind = |j: usize| format!("e{i}n{j}");
            for (j, cs) in nodes.iter().enumerate() {
                b = b.assert_role("depicts", &e, &ind(j));
                for &c in cs {
                    b = b.assert_concept(&concept_name(c % self.tbox.concepts), &ind(j));
                }
            }
            if !nodes.is_empty() {
                for &(s, t, r) in edges {
                    b = b.assert_role(&role_name(r % self.tbox.roles), &ind(s % nodes.len()), &ind(t % nodes.len()));
                }
            }
            b = b.exemplar(&e, &format!("K{}", self.classes[i]));
        }
        b.build().unwrap().0
    }
}

pub fn dataset(max_exemplars: usize, classes: usize) -> impl Strategy<Value = RawDataset> {
    (
        tbox(6, 3),
        vec((vec(vec(0..16usize, 0..=2), 0..=3), vec((0..3usize, 0..3usize, 0..4usize), 0..=3)), 2..=max_exemplars),
    )
        .prop_flat_map(move |(tbox, exemplars)| {
            let n = exemplars.len();
            (Just(tbox), Just(exemplars), vec(0..classes, n))
        })
        .prop_map(|(tbox, exemplars, classes)| RawDataset { tbox, exemplars, classes })
}

mod strategies;
mod support;

use std::cell::Cell;

use proptest::prelude::*;
use semcf_core::ged::Never;
use semcf_core::{exact_ged, roll_up, description_edit_distance, GedBudget, GedError, RollupOptions};
use support::{brute_ged, RawTBox};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn exact_ged_matches_enumeration(t in strategies::tbox(6, 3), (na, ea) in strategies::component(5), (nb, eb) in strategies::component(5)) {
        let cm = t.cost_model();
        let (a, b) = (t.component("a", &na, &ea), t.component("b", &nb, &eb));
        let r = exact_ged(&cm, &a, &b, &GedBudget::default(), &Never).unwrap();
        prop_assert!(r.optimal);
        prop_assert_eq!(r.cost, brute_ged(&cm, &a, &b));
        let path = r.to_edit_path("a", "b");
        prop_assert_eq!(path.total_cost, r.cost);
        prop_assert_eq!(r.ops.iter().map(|o| o.cost).sum::<f64>(), r.cost);
    }

    #[test]
    fn exact_ged_symmetric(t in strategies::tbox(6, 3), (na, ea) in strategies::component(4), (nb, eb) in strategies::component(4)) {
        let cm = t.cost_model();
        let (a, b) = (t.component("a", &na, &ea), t.component("b", &nb, &eb));
        let ab = exact_ged(&cm, &a, &b, &GedBudget::default(), &Never).unwrap();
        let ba = exact_ged(&cm, &b, &a, &GedBudget::default(), &Never).unwrap();
        prop_assert_eq!(ab.cost, ba.cost);
    }

    #[test]
    fn both_backends_zero_on_identical(t in strategies::tbox(6, 3), (n, e) in strategies::component(5)) {
        let cm = t.cost_model();
        let a = t.component("a", &n, &e);
        prop_assert_eq!(exact_ged(&cm, &a, &a, &GedBudget::default(), &Never).unwrap().cost, 0.0);
        let d = roll_up(&a, &RollupOptions::default());
        prop_assert_eq!(description_edit_distance(&cm, &d, &d).unwrap().total_cost, 0.0);
    }

    #[test]
    fn interrupted_search_is_an_upper_bound(t in strategies::tbox(6, 3), (na, ea) in strategies::component(5), (nb, eb) in strategies::component(5)) {
        let cm = t.cost_model();
        let (a, b) = (t.component("a", &na, &ea), t.component("b", &nb, &eb));
        let stop = || true;
        let r = exact_ged(&cm, &a, &b, &GedBudget::default(), &stop).unwrap();
        prop_assert!(!r.optimal);
        prop_assert!(r.cost >= brute_ged(&cm, &a, &b));
        prop_assert_eq!(r.ops.iter().map(|o| o.cost).sum::<f64>(), r.cost);
    }
}

#[test]
fn interrupt_polled_during_long_searches() {
    let t = RawTBox { concepts: 4, roles: 2, concept_axioms: vec![], role_axioms: vec![] };
    let nodes: Vec<Vec<usize>> = (0..8).map(|i| vec![i % 4]).collect();
    let edges: Vec<(usize, usize, usize)> = (0..8).map(|i| (i, (i + 1) % 8, i % 2)).collect();
    let a = t.component("a", &nodes, &edges);
    let b = t.component("b", &nodes.iter().rev().cloned().collect::<Vec<_>>(), &edges);
    let polls = Cell::new(0usize);
    let count = || {
        polls.set(polls.get() + 1);
        false
    };
    let r = exact_ged(&t.cost_model(), &a, &b, &GedBudget::default(), &count).unwrap();
    assert!(r.optimal);
    assert!(polls.get() >= 1);
}

#[test]
fn budget_enforced() {
    let t = RawTBox { concepts: 1, roles: 1, concept_axioms: vec![], role_axioms: vec![] };
    let nodes = vec![vec![0]; 4];
    let a = t.component("a", &nodes, &[]);
    let err = exact_ged(&t.cost_model(), &a, &a, &GedBudget { max_nodes: 3 }, &Never).unwrap_err();
    assert_eq!(err, GedError::BudgetExceeded { limit: 3, nodes: 4 });
}

mod strategies;
mod support;

use proptest::prelude::*;
use semcf_core::{Atom, CostModel, Overrides};
use support::{concept_name, floyd_warshall, role_name, RawTBox};

fn atomic(t: &RawTBox) -> Vec<Atom> {
    let mut v: Vec<Atom> = (0..t.concepts).map(|i| Atom::concept(&concept_name(i))).collect();
    v.extend((0..t.roles).map(|i| Atom::role(&role_name(i))));
    v.push(Atom::Top);
    v
}

fn same_kind(x: &Atom, y: &Atom) -> bool {
    !matches!((x, y), (Atom::Concept(_), Atom::Role(_)) | (Atom::Role(_), Atom::Concept(_)))
}

fn every_atom(t: &RawTBox) -> Vec<Atom> {
    let mut v: Vec<Atom> = (0..t.concepts).map(|i| Atom::concept(&concept_name(i))).collect();
    for r in 0..t.roles {
        for c in 0..t.concepts {
            v.push(Atom::exists(&role_name(r), &concept_name(c)));
        }
        v.push(Atom::exists(&role_name(r), "TOP"));
    }
    v.push(Atom::Top);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn distances_match_all_pairs_shortest_paths(t in strategies::tbox(12, 8)) {
        let cm = t.cost_model();
        let fw = floyd_warshall(&t.vocabulary(), &t.axioms());
        let name = |a: &Atom| match a {
            Atom::Concept(n) | Atom::Role(n) => n.clone(),
            _ => "TOP".to_string(),
        };
        let atoms = atomic(&t);
        for x in &atoms {
            for y in &atoms {
                if same_kind(x, y) {
                    prop_assert_eq!(cm.atom_distance(x, y).unwrap(), fw[&(name(x), name(y))], "{} {}", x, y);
                } else {
                    prop_assert!(cm.atom_distance(x, y).is_err());
                }
            }
        }
    }

    #[test]
    fn atom_distance_is_a_metric(t in strategies::tbox(8, 4)) {
        let cm = t.cost_model();
        let atoms = atomic(&t);
        for x in &atoms {
            for y in atoms.iter().filter(|y| same_kind(x, y)) {
                let dxy = cm.atom_distance(x, y).unwrap();
                prop_assert!(dxy.is_finite());
                for z in atoms.iter().filter(|z| same_kind(y, z) && same_kind(x, z)) {
                    prop_assert!(cm.atom_distance(x, z).unwrap() <= dxy + cm.atom_distance(y, z).unwrap());
                }
            }
        }
    }

    #[test]
    fn edit_cost_symmetric_with_zero_diagonal(t in strategies::tbox(5, 3)) {
        let cm = t.cost_model();
        let atoms = every_atom(&t);
        for x in &atoms {
            if !x.is_top() {
                prop_assert_eq!(cm.edit_cost(x, x).unwrap(), 0.0);
            }
            for y in &atoms {
                if x.is_top() && y.is_top() {
                    continue;
                }
                prop_assert_eq!(cm.edit_cost(x, y).unwrap(), cm.edit_cost(y, x).unwrap());
            }
        }
    }

    #[test]
    fn existential_cost_monotone_in_parts(t in strategies::tbox(6, 3)) {
        let cm = t.cost_model();
        let c = |i: usize| Atom::concept(&concept_name(i));
        let r = |i: usize| Atom::role(&role_name(i));
        for r0 in 0..t.roles {
            for s in 0..t.roles {
                for c0 in 0..t.concepts {
                    for d in 0..t.concepts {
                        let whole = cm
                            .edit_cost(
                                &Atom::exists(&role_name(r0), &concept_name(c0)),
                                &Atom::exists(&role_name(s), &concept_name(d)),
                            )
                            .unwrap();
                        let parts = cm.atom_distance(&r(r0), &r(s)).unwrap() + cm.atom_distance(&c(c0), &c(d)).unwrap();
                        prop_assert_eq!(whole, parts);
                        for d2 in 0..t.concepts {
                            if cm.atom_distance(&c(c0), &c(d2)).unwrap() >= cm.atom_distance(&c(c0), &c(d)).unwrap() {
                                let deeper = cm
                                    .edit_cost(
                                        &Atom::exists(&role_name(r0), &concept_name(c0)),
                                        &Atom::exists(&role_name(s), &concept_name(d2)),
                                    )
                                    .unwrap();
                                prop_assert!(deeper >= whole);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn overrides_take_precedence(
        t in strategies::tbox(6, 3),
        picks in proptest::collection::vec((0..64usize, 0..64usize, 0..20u32), 1..6),
    ) {
        let atoms = every_atom(&t);
        let mut ov = Overrides::new();
        let mut expected = std::collections::BTreeMap::new();
        for (i, j, c) in picks {
            let (x, y) = (&atoms[i % atoms.len()], &atoms[j % atoms.len()]);
            if x == y {
                continue;
            }
            let cost = f64::from(c) / 2.0;
            ov.insert(x.clone(), y.clone(), cost).unwrap();
            expected.insert((x.clone(), y.clone()), cost);
        }
        let cm = t.cost_model().with_overrides(ov);
        for ((x, y), c) in expected {
            prop_assert_eq!(cm.edit_cost(&x, &y).unwrap(), c);
        }
    }
}

#[test]
fn top_to_top_and_identity_overrides_rejected() {
    let t = RawTBox { concepts: 2, roles: 1, concept_axioms: vec![], role_axioms: vec![] };
    let cm: CostModel = t.cost_model();
    assert!(cm.edit_cost(&Atom::Top, &Atom::Top).is_err());
    let mut ov = Overrides::new();
    assert!(ov.insert(Atom::Top, Atom::Top, 1.0).is_err());
    assert!(ov.insert(Atom::concept("C0"), Atom::concept("C0"), 1.0).is_err());
    assert!(ov.insert(Atom::concept("C0"), Atom::concept("C1"), -1.0).is_err());
    assert!(ov.insert(Atom::concept("C0"), Atom::concept("C1"), f64::NAN).is_err());
}

mod strategies;
mod support;

use std::collections::BTreeSet;

use proptest::prelude::*;
use semcf_core::matching::Side;
use semcf_core::{min_weight_full_match, CostMatrix, MatchError};
use support::brute_assignment;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn agrees_with_exhaustive_search(w in strategies::matrix(6)) {
        let expected = brute_assignment(&w);
        let m = CostMatrix::from_rows(&w).unwrap();
        match min_weight_full_match(&m) {
            Ok(r) => {
                prop_assert_eq!(r.cost, expected);
                let small = w.len().min(w[0].len());
                prop_assert_eq!(r.pairs.len(), small);
                let rows: BTreeSet<_> = r.pairs.iter().map(|p| p.0).collect();
                let cols: BTreeSet<_> = r.pairs.iter().map(|p| p.1).collect();
                prop_assert_eq!(rows.len(), small);
                prop_assert_eq!(cols.len(), small);
                let sum: f64 = r.pairs.iter().map(|&(i, j)| w[i][j]).sum();
                prop_assert_eq!(sum, r.cost);
            }
            Err(MatchError::Infeasible { side, blocking }) => {
                prop_assert_eq!(expected, f64::INFINITY);
                // Hall violator: the blocking elements see fewer finite partners.
                let neighbours: BTreeSet<usize> = blocking
                    .iter()
                    .flat_map(|&b| {
                        let w = &w;
                        (0..if side == Side::Rows { w[0].len() } else { w.len() }).filter(move |&o| {
                            let x = if side == Side::Rows { w[b][o] } else { w[o][b] };
                            x.is_finite()
                        })
                    })
                    .collect();
                prop_assert!(!blocking.is_empty());
                prop_assert!(neighbours.len() < blocking.len());
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn transpose_invariant(w in strategies::matrix(5)) {
        let t: Vec<Vec<f64>> = (0..w[0].len()).map(|j| w.iter().map(|r| r[j]).collect()).collect();
        let a = min_weight_full_match(&CostMatrix::from_rows(&w).unwrap()).map(|m| m.cost).ok();
        let b = min_weight_full_match(&CostMatrix::from_rows(&t).unwrap()).map(|m| m.cost).ok();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn ties_resolve_to_lexicographic_minimum(w in strategies::matrix(5)) {
        let m = CostMatrix::from_rows(&w).unwrap();
        if let Ok(r) = min_weight_full_match(&m) {
            let transposed = w.len() > w[0].len();
            let mut seq: Vec<(usize, usize)> =
                r.pairs.iter().map(|&(i, j)| if transposed { (j, i) } else { (i, j) }).collect();
            seq.sort();
            let got: Vec<usize> = seq.into_iter().map(|p| p.1).collect();
            prop_assert_eq!(got, lexmin_optimal(&w).unwrap());
        }
    }

    #[test]
    fn deterministic_pairs(w in strategies::matrix(5)) {
        let m = CostMatrix::from_rows(&w).unwrap();
        prop_assert_eq!(min_weight_full_match(&m), min_weight_full_match(&m));
    }
}

/// Lexicographically smallest optimal assignment of the smaller side.
fn lexmin_optimal(w: &[Vec<f64>]) -> Option<Vec<usize>> {
    let (rows, cols) = (w.len(), w[0].len());
    let get = |i: usize, j: usize| if rows <= cols { w[i][j] } else { w[j][i] };
    let (small, large) = (rows.min(cols), rows.max(cols));
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut cur = Vec::new();
    fn go(
        i: usize,
        small: usize,
        large: usize,
        acc: f64,
        cur: &mut Vec<usize>,
        best: &mut Option<(f64, Vec<usize>)>,
        get: &dyn Fn(usize, usize) -> f64,
    ) {
        if i == small {
            if best.as_ref().is_none_or(|b| acc < b.0) {
                *best = Some((acc, cur.clone()));
            }
            return;
        }
        for j in 0..large {
            if cur.contains(&j) || get(i, j).is_infinite() {
                continue;
            }
            cur.push(j);
            go(i + 1, small, large, acc + get(i, j), cur, best, get);
            cur.pop();
        }
    }
    go(0, small, large, 0.0, &mut cur, &mut best, &get);
    best.map(|b| b.1)
}

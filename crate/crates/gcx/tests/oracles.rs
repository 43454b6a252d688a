//! Independent oracles: brute-force isomorphism and orientation signs, and
//! dense fraction-free rank.

use std::collections::HashMap;

mod common;

use common::*;
use gcx::canon::{canonical_form, perm_sign, Structure};
use gcx::exactla::{rank, rank_in, Field, SparseMatrix};
use gcx::gcomplex::{Base, Flavor};
use gcx::homology::{assemble, basis_at};
use proptest::prelude::*;

#[test]
fn canonical_partition_matches_brute_force() {
    let rules = plain_directed(false);
    for v in 1..=4 {
        let perms = permutations(v);
        for e in 0..=5 {
            let graphs = all_labeled(v, e);
            let mut by_canon: HashMap<Structure, usize> = HashMap::new();
            let mut by_brute: HashMap<Vec<(u8, u8, u8)>, usize> = HashMap::new();
            let mut pairs: HashMap<(usize, usize), ()> = HashMap::new();
            for g in &graphs {
                let nc = by_canon.len();
                let c = *by_canon.entry(canonical_form(g, &rules).form).or_insert(nc);
                let nb = by_brute.len();
                let b = *by_brute.entry(brute_form(g, &perms)).or_insert(nb);
                pairs.insert((c, b), ());
            }
            // a bijection between the two labelings of classes
            assert_eq!(by_canon.len(), by_brute.len(), "v={v} e={e}");
            assert_eq!(pairs.len(), by_canon.len(), "v={v} e={e}");
        }
    }
}

#[test]
fn odd_vertex_signs_match_brute_force() {
    let rules = plain_directed(true);
    for v in 1..=4 {
        let perms = permutations(v);
        for e in 0..=5 {
            for g in all_labeled(v, e) {
                let c = canonical_form(&g, &rules);
                assert_eq!(c.sign == 0, vanishes_by_brute_force(&g, &perms), "{g:?}");
                if c.sign != 0 {
                    // relabeling to the canonical form costs the vertex sign
                    assert_eq!(c.sign, perm_sign(&c.relabel), "{g:?}");
                }
            }
        }
    }
}

#[test]
fn sparse_rank_matches_bareiss_on_graph_matrices() {
    let f = Flavor::new(Base::DirectedDGC, 3);
    for (v, e) in [(2, 3), (3, 4), (3, 5), (4, 5)] {
        let cols = basis_at(&f, v, e).unwrap();
        let rows = basis_at(&f, v + 1, e + 1).unwrap();
        let m = assemble(&f, &cols, &rows).unwrap();
        if m.n_rows > 50 || m.n_cols > 50 {
            continue;
        }
        let dense: Vec<Vec<i64>> =
            m.to_dense().iter().map(|r| r.iter().map(|x| x.to_integer().try_into().unwrap()).collect()).collect();
        assert_eq!(rank(&m), bareiss_rank(&dense), "v={v} e={e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sparse_rank_matches_bareiss(
        rows in 1usize..50,
        cols in 1usize..50,
        entries in prop::collection::vec(-3i64..=3, 2500),
        density in 0u32..4,
    ) {
        let dense: Vec<Vec<i64>> = (0..rows)
            .map(|i| (0..cols).map(|j| {
                let x = entries[i * 50 + j];
                if density > 0 && !((i + j) as u32).is_multiple_of(density + 1) { 0 } else { x }
            }).collect())
            .collect();
        let m = SparseMatrix::from_dense(&dense);
        prop_assert_eq!(rank(&m), bareiss_rank(&dense));
    }

    #[test]
    fn low_rank_products(rows in 2usize..50, cols in 2usize..50, r in 0usize..6, seed in prop::collection::vec(-4i64..=4, 8..40)) {
        let dense = low_rank(rows, cols, r, &seed);
        let m = SparseMatrix::from_dense(&dense);
        let want = bareiss_rank(&dense);
        prop_assert!(want <= r);
        prop_assert_eq!(rank(&m), want);
        // the prime never overshoots the rational rank
        prop_assert!(rank_in(&m, Field::Prime(32003)).unwrap().rank <= want);
    }
}

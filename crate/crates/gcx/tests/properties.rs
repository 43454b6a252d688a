use gcx::canon::{canonical_form, perm_sign, Rules, Structure};
use gcx::exactla::{export_sms, import_sms, rank, SparseMatrix};
use gcx::gcomplex::{Base, Flavor, GraphComplex};
use gcx::grtwitness::mixed_rules;
use gcx::Lc;
use proptest::prelude::*;

fn structure(max_v: usize, kinds: u8) -> impl Strategy<Value = Structure> {
    (1..=max_v).prop_flat_map(move |v| {
        prop::collection::vec((0..v as u8, 0..v as u8, 0..kinds), 0..=7)
            .prop_map(move |edges| Structure { colors: vec![0; v], edges })
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn with_perm(max_v: usize, kinds: u8) -> impl Strategy<Value = (Structure, Vec<usize>)> {
    structure(max_v, kinds).prop_flat_map(|s| {
        let n = s.n();
        (Just(s), permutation(n))
    })
}

fn rule_sets() -> Vec<(Rules, u8)> {
    let mut out = vec![(mixed_rules(), 4)];
    for base in [Base::UndirectedFull, Base::DirectedFull] {
        for k in [2, 3] {
            out.push((Flavor::new(base, k).rules().clone(), 1));
        }
    }
    out
}

fn odd_edge_sign(s: &Structure, order: &[usize], rules: &Rules) -> i32 {
    let odd: Vec<usize> = order.iter().copied().filter(|&i| rules.kinds[s.edges[i].2 as usize].odd).collect();
    let mut sorted = odd.clone();
    sorted.sort_unstable();
    let p: Vec<usize> = odd.iter().map(|i| sorted.binary_search(i).unwrap()).collect();
    perm_sign(&p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_form_ignores_relabeling((s, p) in with_perm(5, 4)) {
        for (rules, kinds) in rule_sets() {
            let mut s = s.clone();
            for e in s.edges.iter_mut() {
                e.2 %= kinds;
            }
            let t = s.relabel(&p);
            let (a, b) = (canonical_form(&s, &rules), canonical_form(&t, &rules));
            prop_assert_eq!(&a.form, &b.form);
            prop_assert_eq!(a.sign == 0, b.sign == 0);
            if a.sign != 0 {
                let vs = if rules.vertex_sign { perm_sign(&p) } else { 1 };
                prop_assert_eq!(a.sign, vs * b.sign);
            }
        }
    }

    #[test]
    fn edge_reordering_costs_the_odd_sign(s in structure(4, 4), shuffle in prop::collection::vec(any::<u32>(), 7)) {
        for (rules, kinds) in rule_sets() {
            let mut s = s.clone();
            for e in s.edges.iter_mut() {
                e.2 %= kinds;
            }
            let mut order: Vec<usize> = (0..s.edges.len()).collect();
            order.sort_by_key(|&i| shuffle[i]);
            let t = Structure { colors: s.colors.clone(), edges: order.iter().map(|&i| s.edges[i]).collect() };
            let (a, b) = (canonical_form(&s, &rules), canonical_form(&t, &rules));
            prop_assert_eq!(&a.form, &b.form);
            if a.sign != 0 {
                prop_assert_eq!(b.sign, a.sign * odd_edge_sign(&s, &order, &rules));
            }
        }
    }

    #[test]
    fn composed_relabelings_multiply((s, p) in with_perm(5, 1), q in permutation(5)) {
        let rules = Flavor::new(Base::DirectedFull, 3).rules().clone();
        let n = s.n();
        let q: Vec<usize> = q.into_iter().filter(|&x| x < n).collect();
        let t = s.relabel(&p);
        let u = t.relabel(&q);
        let (a, b, c) = (canonical_form(&s, &rules), canonical_form(&t, &rules), canonical_form(&u, &rules));
        if a.sign != 0 {
            prop_assert_eq!(a.sign * b.sign, perm_sign(&p));
            prop_assert_eq!(b.sign * c.sign, perm_sign(&q));
            prop_assert_eq!(a.sign * c.sign, perm_sign(&p) * perm_sign(&q));
        }
    }

    #[test]
    fn lc_is_a_module(
        xs in prop::collection::vec((0u8..6, -5i64..5), 0..10),
        ys in prop::collection::vec((0u8..6, -5i64..5), 0..10),
        zs in prop::collection::vec((0u8..6, -5i64..5), 0..10),
        c in -4i64..4,
    ) {
        let mk = |v: &[(u8, i64)]| {
            let mut l = Lc::new();
            for &(k, x) in v {
                l.add(format!("g{k}"), x);
            }
            l
        };
        let (x, y, z) = (mk(&xs), mk(&ys), mk(&zs));
        let sum = |a: &Lc, b: &Lc| {
            let mut o = a.clone();
            o.add_lc(b, 1);
            o
        };
        prop_assert_eq!(sum(&x, &y), sum(&y, &x));
        prop_assert_eq!(sum(&sum(&x, &y), &z), sum(&x, &sum(&y, &z)));
        prop_assert!(sum(&x, &x.scaled(-1)).is_zero());
        prop_assert_eq!(sum(&x, &y).scaled(c), sum(&x.scaled(c), &y.scaled(c)));
        prop_assert!(x.iter().all(|(_, v)| v != 0));
    }

    #[test]
    fn sms_round_trip(rows in 1usize..12, cols in 1usize..12, entries in prop::collection::vec(-9i64..=9, 144)) {
        let dense: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| entries[i * 12 + j]).collect()).collect();
        let m = SparseMatrix::from_dense(&dense);
        let back = import_sms(&export_sms(&m)).unwrap();
        prop_assert_eq!(back.n_rows, m.n_rows);
        prop_assert_eq!(back.n_cols, m.n_cols);
        prop_assert_eq!(back.to_dense(), m.to_dense());
    }

    #[test]
    fn rank_of_transpose(rows in 1usize..20, cols in 1usize..20, entries in prop::collection::vec(-2i64..=2, 400)) {
        let dense: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| entries[i * 20 + j]).collect()).collect();
        let m = SparseMatrix::from_dense(&dense);
        prop_assert_eq!(rank(&m), rank(&m.transpose()));
    }
}

//! Brute-force oracles shared by the oracle tests and the acceptance run.
#![allow(dead_code)]

use gcx::canon::{perm_sign, Rules, Structure};
use num_bigint::BigInt;
use num_traits::Zero;

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Least sorted edge list over all relabelings.
pub fn brute_form(s: &Structure, perms: &[Vec<usize>]) -> Vec<(u8, u8, u8)> {
    perms
        .iter()
        .map(|p| {
            let mut e = s.relabel(p).edges;
            e.sort_unstable();
            e
        })
        .min()
        .unwrap()
}

/// Every labeled directed multigraph (loops allowed) on `v` vertices with
/// `e` edges, as sorted edge multisets.
pub fn all_labeled(v: usize, e: usize) -> Vec<Structure> {
    let pairs: Vec<(u8, u8)> = (0..v as u8).flat_map(|a| (0..v as u8).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, left: usize, pairs: &[(u8, u8)], cur: &mut Vec<(u8, u8, u8)>, v: usize, out: &mut Vec<Structure>) {
        if left == 0 {
            out.push(Structure::plain(v, cur.clone()));
            return;
        }
        for i in start..pairs.len() {
            cur.push((pairs[i].0, pairs[i].1, 0));
            rec(i, left - 1, pairs, cur, v, out);
            cur.pop();
        }
    }
    rec(0, e, &pairs, &mut cur, v, &mut out);
    out
}

pub fn plain_directed(vertex_sign: bool) -> Rules {
    Rules { vertex_sign, kinds: vec![gcx::canon::EdgeKind::new(true, false, false)] }
}

/// Some automorphism permutes the vertices oddly (single even edge kind).
pub fn vanishes_by_brute_force(s: &Structure, perms: &[Vec<usize>]) -> bool {
    let mut edges = s.edges.clone();
    edges.sort_unstable();
    perms.iter().any(|p| {
        let mut e = s.relabel(p).edges;
        e.sort_unstable();
        e == edges && perm_sign(p) == -1
    })
}

pub fn bareiss_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let (n, m) = (a.len(), a.first().map_or(0, |r| r.len()));
    let mut prev = BigInt::from(1);
    let mut r = 0;
    for c in 0..m {
        let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..n {
            for j in c + 1..m {
                let x = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = x / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

pub fn low_rank(rows: usize, cols: usize, r: usize, seed: &[i64]) -> Vec<Vec<i64>> {
    let at = |i: usize| seed[i % seed.len()];
    (0..rows)
        .map(|i| (0..cols).map(|j| (0..r).map(|t| at(i * 7 + t) * at(j * 3 + t + 1)).sum()).collect())
        .collect()
}

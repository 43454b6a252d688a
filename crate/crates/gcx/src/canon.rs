//! Canonical labeling with orientation signs.
//!
//! A [`Structure`] is a vertex-colored multigraph whose edges carry a kind.
//! Each kind says whether it is directed, whether it is an odd object (so
//! permuting such edges among themselves costs the permutation sign), and
//! whether reversing it costs a sign. [`Rules::vertex_sign`] makes vertex
//! permutations signed as well.
//!
//! The search is individualization-refinement over all leaves; the least
//! encoding wins and every other leaf with the same encoding is an
//! automorphism.

use std::cmp::Ordering;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EdgeKind {
    pub directed: bool,
    pub odd: bool,
    pub flip_sign: bool,
}

impl EdgeKind {
    pub const fn new(directed: bool, odd: bool, flip_sign: bool) -> Self {
        EdgeKind { directed, odd, flip_sign }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rules {
    pub vertex_sign: bool,
    pub kinds: Vec<EdgeKind>,
}

/// Edge: (tail, head, kind). 0-based vertices.
pub type Edge = (u8, u8, u8);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Structure {
    pub colors: Vec<u32>,
    pub edges: Vec<Edge>,
}

impl Structure {
    pub fn plain(n: usize, edges: Vec<Edge>) -> Self {
        Structure { colors: vec![0; n], edges }
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    pub fn relabel(&self, perm: &[usize]) -> Structure {
        let mut colors = vec![0; self.n()];
        for (old, &new) in perm.iter().enumerate() {
            colors[new] = self.colors[old];
        }
        let edges = self
            .edges
            .iter()
            .map(|&(t, h, k)| (perm[t as usize] as u8, perm[h as usize] as u8, k))
            .collect();
        Structure { colors, edges }
    }
}

#[derive(Clone, Debug)]
pub struct Canonical {
    /// The canonical representative, with its edges in canonical order.
    pub form: Structure,
    /// Sign of the input relative to `form`; 0 when the class vanishes.
    pub sign: i32,
    /// old vertex -> canonical vertex
    pub relabel: Vec<usize>,
    /// Order of the automorphism group (of the uncolored-by-sign structure).
    pub aut_order: usize,
}

pub fn perm_sign(p: &[usize]) -> i32 {
    let mut seen = vec![false; p.len()];
    let mut s = 1;
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        if len % 2 == 0 {
            s = -s;
        }
    }
    s
}

struct Adj {
    // per vertex: (neighbor, code)
    nbrs: Vec<Vec<(usize, u32)>>,
}

impl Adj {
    fn new(s: &Structure, rules: &Rules) -> Self {
        let mut nbrs = vec![Vec::new(); s.n()];
        for &(t, h, k) in &s.edges {
            let (t, h) = (t as usize, h as usize);
            let kind = rules.kinds[k as usize];
            let base = (k as u32) * 3;
            if kind.directed {
                nbrs[t].push((h, base));
                nbrs[h].push((t, base + 1));
            } else {
                nbrs[t].push((h, base + 2));
                nbrs[h].push((t, base + 2));
            }
        }
        Adj { nbrs }
    }
}

fn refine(cells: &mut Vec<Vec<usize>>, adj: &Adj, n: usize) {
    let mut cell_of = vec![0usize; n];
    loop {
        for (i, c) in cells.iter().enumerate() {
            for &v in c {
                cell_of[v] = i;
            }
        }
        let mut next: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
        for c in cells.iter() {
            if c.len() == 1 {
                next.push(c.clone());
                continue;
            }
            let mut sigs: Vec<(Vec<(u32, usize)>, usize)> = c
                .iter()
                .map(|&v| {
                    let mut sg: Vec<(u32, usize)> =
                        adj.nbrs[v].iter().map(|&(w, code)| (code, cell_of[w])).collect();
                    sg.sort_unstable();
                    (sg, v)
                })
                .collect();
            sigs.sort();
            let mut start = 0;
            for i in 1..=sigs.len() {
                if i == sigs.len() || sigs[i].0 != sigs[start].0 {
                    next.push(sigs[start..i].iter().map(|x| x.1).collect());
                    start = i;
                }
            }
        }
        // splits only ever add cells
        let stable = next.len() == cells.len();
        *cells = next;
        if stable {
            break;
        }
    }
}

struct Leaf {
    enc: Vec<u32>,
    sign: i32,
    relabel: Vec<usize>,
    order: Vec<usize>,
}

fn leaf(s: &Structure, rules: &Rules, order: &[usize]) -> Leaf {
    let n = s.n();
    let mut relabel = vec![0usize; n];
    for (pos, &v) in order.iter().enumerate() {
        relabel[v] = pos;
    }
    let mut sign = if rules.vertex_sign { perm_sign(&relabel) } else { 1 };
    let mut mapped: Vec<(u8, u8, u8, usize)> = Vec::with_capacity(s.edges.len());
    for (i, &(t, h, k)) in s.edges.iter().enumerate() {
        let kind = rules.kinds[k as usize];
        let (mut a, mut b) = (relabel[t as usize] as u8, relabel[h as usize] as u8);
        if !kind.directed && a > b {
            std::mem::swap(&mut a, &mut b);
            if kind.flip_sign {
                sign = -sign;
            }
        }
        mapped.push((a, b, k, i));
    }
    mapped.sort();
    // sign of the permutation of odd edges: input order -> sorted order
    let odd_input: Vec<usize> = s
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| rules.kinds[e.2 as usize].odd)
        .map(|(i, _)| i)
        .collect();
    if odd_input.len() > 1 {
        let mut rank_of = vec![usize::MAX; s.edges.len()];
        for (r, &i) in odd_input.iter().enumerate() {
            rank_of[i] = r;
        }
        let mut p = vec![0usize; odd_input.len()];
        let mut pos = 0;
        for m in &mapped {
            let r = rank_of[m.3];
            if r != usize::MAX {
                p[r] = pos;
                pos += 1;
            }
        }
        sign *= perm_sign(&p);
    }
    let mut enc = Vec::with_capacity(n + 3 * mapped.len());
    for &v in order {
        enc.push(s.colors[v]);
    }
    for m in &mapped {
        enc.push(m.0 as u32);
        enc.push(m.1 as u32);
        enc.push(m.2 as u32);
    }
    Leaf { enc, sign, relabel, order: order.to_vec() }
}

struct Search<'a> {
    s: &'a Structure,
    rules: &'a Rules,
    adj: Adj,
    best: Option<Leaf>,
    aut: usize,
    odd_aut: bool,
    auts: Option<Vec<Vec<usize>>>,
}

impl<'a> Search<'a> {
    fn run(&mut self, mut cells: Vec<Vec<usize>>) {
        refine(&mut cells, &self.adj, self.s.n());
        match cells.iter().position(|c| c.len() > 1) {
            None => {
                let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
                let lf = leaf(self.s, self.rules, &order);
                let cmp = match &self.best {
                    None => Ordering::Less,
                    Some(b) => lf.enc.cmp(&b.enc),
                };
                match cmp {
                    Ordering::Less => {
                        self.best = Some(lf);
                        self.aut = 1;
                        self.odd_aut = false;
                        if let Some(a) = self.auts.as_mut() {
                            a.clear();
                            a.push((0..self.s.n()).collect());
                        }
                    }
                    Ordering::Equal => {
                        let b = self.best.as_ref().unwrap();
                        self.aut += 1;
                        if lf.sign != b.sign {
                            self.odd_aut = true;
                        }
                        if let Some(a) = self.auts.as_mut() {
                            // automorphism: v -> best.order[lf.relabel[v]]
                            let p: Vec<usize> =
                                (0..self.s.n()).map(|v| b.order[lf.relabel[v]]).collect();
                            a.push(p);
                        }
                    }
                    Ordering::Greater => {}
                }
            }
            Some(ci) => {
                let cell = cells[ci].clone();
                for &v in &cell {
                    let mut next = Vec::with_capacity(cells.len() + 1);
                    next.extend_from_slice(&cells[..ci]);
                    next.push(vec![v]);
                    next.push(cell.iter().copied().filter(|&w| w != v).collect());
                    next.extend_from_slice(&cells[ci + 1..]);
                    self.run(next);
                }
            }
        }
    }
}

fn initial_cells(s: &Structure) -> Vec<Vec<usize>> {
    let mut vs: Vec<usize> = (0..s.n()).collect();
    vs.sort_by_key(|&v| (s.colors[v], v));
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for v in vs {
        match cells.last_mut() {
            Some(c) if s.colors[c[0]] == s.colors[v] => c.push(v),
            _ => cells.push(vec![v]),
        }
    }
    cells
}

fn forced_zero(s: &Structure, rules: &Rules) -> bool {
    let mut odd: Vec<(u8, u8, u8)> = Vec::new();
    for &(t, h, k) in &s.edges {
        let kind = rules.kinds[k as usize];
        if t == h && !kind.directed && kind.flip_sign {
            return true;
        }
        if kind.odd {
            let (a, b) = if !kind.directed && t > h { (h, t) } else { (t, h) };
            odd.push((a, b, k));
        }
    }
    odd.sort_unstable();
    odd.windows(2).any(|w| w[0] == w[1])
}

fn search<'a>(s: &'a Structure, rules: &'a Rules, want_auts: bool) -> Search<'a> {
    let mut st = Search {
        s,
        rules,
        adj: Adj::new(s, rules),
        best: None,
        aut: 0,
        odd_aut: false,
        auts: if want_auts { Some(Vec::new()) } else { None },
    };
    if s.n() == 0 {
        st.best = Some(leaf(s, rules, &[]));
        st.aut = 1;
        return st;
    }
    st.run(initial_cells(s));
    st
}

/// Canonical form of `s` together with the orientation sign.
pub fn canonical_form(s: &Structure, rules: &Rules) -> Canonical {
    let st = search(s, rules, false);
    let best = st.best.unwrap();
    let form = s.relabel(&best.relabel);
    let form = sorted_edges(&form, rules);
    let zero = st.odd_aut || forced_zero(s, rules);
    Canonical {
        form,
        sign: if zero { 0 } else { best.sign },
        relabel: best.relabel,
        aut_order: st.aut,
    }
}

/// All vertex permutations mapping `s` onto itself (edge kinds and
/// directions respected; undirected kinds may reverse).
pub fn automorphisms(s: &Structure, rules: &Rules) -> Vec<Vec<usize>> {
    search(s, rules, true).auts.unwrap_or_default()
}

/// Normalize undirected edges to tail <= head and sort the edge list.
/// Used only on canonical forms, whose sign is +1 by construction.
fn sorted_edges(s: &Structure, rules: &Rules) -> Structure {
    let mut edges: Vec<Edge> = s
        .edges
        .iter()
        .map(|&(t, h, k)| {
            if !rules.kinds[k as usize].directed && t > h {
                (h, t, k)
            } else {
                (t, h, k)
            }
        })
        .collect();
    edges.sort_unstable();
    Structure { colors: s.colors.clone(), edges }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn directed(odd_edges: bool) -> Rules {
        Rules { vertex_sign: !odd_edges, kinds: vec![EdgeKind::new(true, odd_edges, false)] }
    }

    #[test]
    fn sign_of_transposition() {
        assert_eq!(perm_sign(&[1, 0, 2]), -1);
        assert_eq!(perm_sign(&[1, 2, 0]), 1);
    }

    #[test]
    fn double_edge_even_k_vanishes() {
        let s = Structure::plain(2, vec![(0, 1, 0), (0, 1, 0)]);
        assert_eq!(canonical_form(&s, &directed(true)).sign, 0);
        assert_ne!(canonical_form(&s, &directed(false)).sign, 0);
    }

    #[test]
    fn three_cycle_automorphisms() {
        let s = Structure::plain(3, vec![(0, 1, 0), (1, 2, 0), (2, 0, 0)]);
        assert_eq!(automorphisms(&s, &directed(true)).len(), 3);
    }

    #[test]
    fn canonical_form_is_fixed() {
        let s = Structure::plain(4, vec![(2, 0, 0), (1, 3, 0), (3, 2, 0), (0, 1, 0), (1, 2, 0)]);
        for r in [directed(true), directed(false)] {
            let c = canonical_form(&s, &r);
            let c2 = canonical_form(&c.form, &r);
            assert_eq!(c2.form, c.form);
            assert_eq!(c2.sign, 1);
        }
    }
}

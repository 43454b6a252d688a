//! Differentials of the undirected and directed graph complexes.
//!
//! Sign convention: splitting vertex `x` keeps label `x` for the vertex that
//! retains the unmoved half-edges, appends the new vertex as `v+1`, and
//! appends the new edge `x -> v+1` as edge `e+1`. The two univalent-creating
//! reattachments (nothing moved, everything moved) are exactly the terms
//! removed by the out- and in-antenna parts of the differential, so the full
//! differential sums over proper nonempty reattachments.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::canon::{canonical_form, EdgeKind, Rules, Structure};
use crate::graphcore::{
    classify_from_valences, degree_of, format_structure, parse_structure, Subcomplex, TextStyle, VertexClass,
};
use crate::{Error, Lc};

/// A complex whose basis elements are canonical classes of [`Structure`]s.
pub trait GraphComplex: Sync {
    fn tag(&self) -> String;
    fn rules(&self) -> &Rules;
    fn style(&self) -> TextStyle;
    /// Generator constraints and quotient projection.
    fn keep(&self, s: &Structure) -> bool;
    /// Labeled terms of the differential of a labeled structure.
    fn raw_d(&self, s: &Structure) -> Vec<(Structure, i64)>;

    fn key_of(&self, s: &Structure) -> String {
        format!("{}|{}", self.tag(), format_structure(s, self.style()))
    }

    fn parse_key(&self, key: &str) -> Structure {
        let body = key.split_once('|').map(|x| x.1).unwrap_or(key);
        parse_structure(body).expect("malformed key")
    }

    /// Canonical key and sign, or `None` for vanishing or projected terms.
    fn class_of(&self, s: &Structure) -> Option<(String, i64)> {
        if !self.keep(s) {
            return None;
        }
        let c = canonical_form(s, self.rules());
        if c.sign == 0 {
            return None;
        }
        Some((self.key_of(&c.form), c.sign as i64))
    }

    fn lc_of(&self, terms: Vec<(Structure, i64)>) -> Lc {
        let mut lc = Lc::new();
        for (s, c) in terms {
            if let Some((k, sg)) = self.class_of(&s) {
                lc.add(k, sg * c);
            }
        }
        lc
    }

    fn d_key(&self, key: &str) -> Lc {
        self.lc_of(self.raw_d(&self.parse_key(key)))
    }

    fn d(&self, lc: &Lc) -> Lc {
        let mut out = Lc::new();
        for (k, c) in lc.iter() {
            out.add_lc(&self.d_key(k), c);
        }
        out
    }
}

/// Half-edges at `x`: (edge index, 0 = tail end, 1 = head end).
pub fn incidences(s: &Structure, x: usize) -> Vec<(usize, u8)> {
    let mut out = Vec::new();
    for (i, &(t, h, _)) in s.edges.iter().enumerate() {
        if t as usize == x {
            out.push((i, 0));
        }
        if h as usize == x {
            out.push((i, 1));
        }
    }
    out
}

/// Move the half-edges selected by `mask` from `x` to a new vertex `v+1`
/// and join them by a new edge `x -> v+1` of kind `kind`.
pub fn split_vertex(s: &Structure, x: usize, inc: &[(usize, u8)], mask: u64, new_color: u32, kind: u8) -> Structure {
    let n = s.n() as u8;
    let mut t = s.clone();
    for (j, &(i, end)) in inc.iter().enumerate() {
        if mask >> j & 1 == 1 {
            if end == 0 {
                t.edges[i].0 = n;
            } else {
                t.edges[i].1 = n;
            }
        }
    }
    t.colors.push(new_color);
    t.edges.push((x as u8, n, kind));
    t
}

pub fn valences(s: &Structure) -> (Vec<usize>, Vec<usize>) {
    let mut out = vec![0; s.n()];
    let mut inn = vec![0; s.n()];
    for &(t, h, _) in &s.edges {
        out[t as usize] += 1;
        inn[h as usize] += 1;
    }
    (out, inn)
}

pub fn vertex_classes(s: &Structure) -> Vec<VertexClass> {
    let (o, i) = valences(s);
    o.iter().zip(&i).map(|(&a, &b)| classify_from_valences(a, b)).collect()
}

pub fn has_source_s(s: &Structure) -> bool {
    vertex_classes(s).iter().any(|c| matches!(c, VertexClass::Source | VertexClass::UnivalentOut))
}

pub fn has_target_s(s: &Structure) -> bool {
    vertex_classes(s).iter().any(|c| matches!(c, VertexClass::Target | VertexClass::UnivalentIn))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Base {
    /// cfGC: all connected undirected graphs.
    UndirectedFull,
    /// GC: at least trivalent, no tadpoles.
    UndirectedGC,
    /// Loop graphs: every vertex bivalent.
    LoopGraphs,
    /// cfdGC: all connected directed graphs.
    DirectedFull,
    /// dGC: no univalent or passing vertex, some vertex at least trivalent,
    /// no tadpoles.
    DirectedDGC,
}

#[derive(Clone, Debug)]
pub struct Flavor {
    pub base: Base,
    pub k: i64,
    /// Quotient by this subcomplex (its classes are projected to zero).
    pub quotient: Option<Subcomplex>,
    rules: Rules,
}

impl Flavor {
    pub fn new(base: Base, k: i64) -> Self {
        let even = k % 2 == 0;
        let directed = matches!(base, Base::DirectedFull | Base::DirectedDGC);
        let kind = if directed { EdgeKind::new(true, even, false) } else { EdgeKind::new(false, even, !even) };
        Flavor { base, k, quotient: None, rules: Rules { vertex_sign: !even, kinds: vec![kind] } }
    }

    pub fn quotient(base: Base, k: i64, q: Subcomplex) -> Self {
        let mut f = Flavor::new(base, k);
        f.quotient = Some(q);
        f
    }

    /// dGC^↺: directed graphs modulo those with a source or a target.
    pub fn wheeled(k: i64) -> Self {
        Flavor::quotient(Base::DirectedDGC, k, Subcomplex::SPlusT)
    }

    pub fn is_directed(&self) -> bool {
        matches!(self.base, Base::DirectedFull | Base::DirectedDGC)
    }

    pub fn name(&self) -> String {
        let b = match self.base {
            Base::UndirectedFull => "cfGC",
            Base::UndirectedGC => "GC",
            Base::LoopGraphs => "b2GC",
            Base::DirectedFull => "cfdGC",
            Base::DirectedDGC => "dGC",
        };
        match self.quotient {
            None => b.to_string(),
            Some(q) => format!("{b}/{}", subcomplex_name(q)),
        }
    }

    pub fn degree(&self, s: &Structure) -> i64 {
        degree_of(s.n(), s.edges.len(), self.k)
    }
}

pub fn subcomplex_name(q: Subcomplex) -> &'static str {
    match q {
        Subcomplex::Sourced => "s",
        Subcomplex::Targeted => "t",
        Subcomplex::St => "st",
        Subcomplex::SPlusT => "s+t",
        Subcomplex::Oriented => "or",
        Subcomplex::WheeledOnly => "wh",
    }
}

pub fn structure_in(s: &Structure, which: Subcomplex) -> bool {
    let g = crate::graphcore::DirectedGraph::from_structure(s);
    crate::graphcore::subcomplex_membership(&g, which)
}

impl GraphComplex for Flavor {
    fn tag(&self) -> String {
        let parity = if self.k % 2 == 0 { "even" } else { "odd" };
        let dir = if self.is_directed() { "directed" } else { "undirected" };
        format!("{parity}/{dir}")
    }

    fn rules(&self) -> &Rules {
        &self.rules
    }

    fn style(&self) -> TextStyle {
        TextStyle::Plain
    }

    fn keep(&self, s: &Structure) -> bool {
        let (o, i) = valences(s);
        let val: Vec<usize> = o.iter().zip(&i).map(|(a, b)| a + b).collect();
        let tadpole = s.edges.iter().any(|e| e.0 == e.1);
        let ok = match self.base {
            Base::UndirectedFull | Base::DirectedFull => true,
            Base::UndirectedGC => !tadpole && val.iter().all(|&d| d >= 3),
            Base::LoopGraphs => val.iter().all(|&d| d == 2),
            Base::DirectedDGC => {
                !tadpole
                    && val.iter().all(|&d| d >= 2)
                    && !o.iter().zip(&i).any(|(&a, &b)| a == 1 && b == 1)
                    && val.iter().any(|&d| d >= 3)
            }
        };
        ok && !self.quotient.is_some_and(|q| structure_in(s, q))
    }

    fn raw_d(&self, s: &Structure) -> Vec<(Structure, i64)> {
        let mut out = Vec::new();
        for x in 0..s.n() {
            let inc = incidences(s, x);
            let full = (1u64 << inc.len()) - 1;
            // undirected: M and its complement give the same term, count it once
            let end = if self.is_directed() { full } else { full.div_ceil(2) };
            for mask in 1..end {
                out.push((split_vertex(s, x, &inc, mask, 0, 0), 1));
            }
        }
        out
    }
}

/// δ_x: all reattachments of the half-edges at `x`, including the two that
/// leave a univalent vertex. At an isolated vertex those two roles coincide
/// as labeled graphs but still count as two terms.
pub fn vertex_split(f: &Flavor, s: &Structure, x: usize) -> Lc {
    let inc = incidences(s, x);
    let full = (1u64 << inc.len()) - 1;
    let mut terms = vec![(split_vertex(s, x, &inc, 0, 0, 0), 1), (split_vertex(s, x, &inc, full, 0, 0), 1)];
    terms.extend((1..full).map(|m| (split_vertex(s, x, &inc, m, 0, 0), 1)));
    full_lc(f, terms)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
}

/// δ′_x (an outgoing antenna at `x`) or δ″_x (an incoming antenna). The
/// incoming antenna is labeled so that the univalent vertex keeps label `x`
/// and the old vertex becomes `v+1`, joined by edge `e+1`.
pub fn add_univalent(f: &Flavor, s: &Structure, x: usize, dir: Direction) -> Lc {
    let inc = incidences(s, x);
    let mask = match dir {
        Direction::Out => 0,
        Direction::In => (1u64 << inc.len()) - 1,
    };
    full_lc(f, vec![(split_vertex(s, x, &inc, mask, 0, 0), 1)])
}

/// Canonicalize without the generator filter (for the raw pieces δ, δ′, δ″).
fn full_lc(f: &Flavor, terms: Vec<(Structure, i64)>) -> Lc {
    let mut lc = Lc::new();
    for (s, c) in terms {
        let cf = canonical_form(&s, f.rules());
        if cf.sign != 0 {
            lc.add(f.key_of(&cf.form), c * cf.sign as i64);
        }
    }
    lc
}

/// d on a linear combination; every input term must satisfy the flavor.
pub fn differential<C: GraphComplex + ?Sized>(lc: &Lc, cx: &C) -> Result<Lc, Error> {
    for k in lc.keys() {
        if !cx.keep(&cx.parse_key(k)) {
            return Err(Error::Invalid(format!("term outside the complex: {k}")));
        }
    }
    Ok(cx.d(lc))
}

/// d∘d on every basis key; returns the keys where it does not vanish.
pub fn d_squared_failures<C: GraphComplex + ?Sized>(cx: &C, keys: &[String]) -> Vec<(String, Lc)> {
    let first: Vec<Lc> = keys.par_iter().map(|k| cx.d_key(k)).collect();
    let mut mids: Vec<String> = first.iter().flat_map(|lc| lc.keys().cloned()).collect();
    mids.sort();
    mids.dedup();
    let second: HashMap<String, Lc> = mids.par_iter().map(|k| (k.clone(), cx.d_key(k))).collect();
    keys.iter()
        .zip(&first)
        .filter_map(|(k, d1)| {
            let mut dd = Lc::new();
            for (m, c) in d1.iter() {
                dd.add_lc(&second[m], c);
            }
            (!dd.is_zero()).then(|| (k.clone(), dd))
        })
        .collect()
}

/// Checks the grading contract of `d` on `keys`: degree +1, loop number kept.
pub fn grading_failures(f: &Flavor, keys: &[String]) -> Vec<String> {
    keys.par_iter()
        .filter(|k| {
            let s = f.parse_key(k);
            let (deg, b) = (f.degree(&s), s.edges.len() as i64 - s.n() as i64);
            f.d_key(k).keys().any(|t| {
                let u = f.parse_key(t);
                f.degree(&u) != deg + 1 || u.edges.len() as i64 - u.n() as i64 != b
            })
        })
        .cloned()
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeBound {
    pub max_degree: i64,
    pub verified_empty_above: bool,
}

/// Enumerates GC_k in loop order `b` and checks no generator sits above
/// degree (3-k)b-3.
pub fn degree_bound_check(k: i64, b: i64) -> Result<DegreeBound, Error> {
    if b < 2 {
        return Err(Error::Invalid("loop order must be at least 2".into()));
    }
    if b > 5 {
        return Err(Error::Window(format!("loop order {b}")));
    }
    let bound = (3 - k) * b - 3;
    let f = Flavor::new(Base::UndirectedGC, k);
    let mut ok = true;
    // 3v <= 2e = 2(b+v-1) gives v <= 2b-2; scan two more to witness emptiness
    for v in 1..=(2 * b as usize) {
        let e = b as usize + v - 1;
        let deg = degree_of(v, e, k);
        let basis = crate::homology::basis_at(&f, v, e)?;
        if deg > bound && !basis.is_empty() {
            ok = false;
        }
    }
    Ok(DegreeBound { max_degree: bound, verified_empty_above: ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: usize, e: &[(u8, u8)]) -> Structure {
        Structure::plain(n, e.iter().map(|&(a, b)| (a, b, 0)).collect())
    }

    #[test]
    fn example_vertex_has_eight_reattachments() {
        // one outgoing and two incoming edges at vertex 0
        let g = s(4, &[(0, 1), (2, 0), (3, 0)]);
        let inc = incidences(&g, 0);
        assert_eq!(1usize << inc.len(), 8);
    }

    #[test]
    fn univalent_vertex_splits_twice() {
        let g = s(2, &[(0, 1)]);
        assert_eq!(1usize << incidences(&g, 1).len(), 2);
        let f = Flavor::new(Base::DirectedFull, 3);
        // δ on the univalent end equals δ′ + δ″ there, so d vanishes at it
        let mut lhs = vertex_split(&f, &g, 1);
        lhs.add_lc(&add_univalent(&f, &g, 1, Direction::Out), -1);
        lhs.add_lc(&add_univalent(&f, &g, 1, Direction::In), -1);
        assert!(lhs.is_zero());
    }

    #[test]
    fn isolated_vertex_antennas_cancel() {
        let g = s(1, &[]);
        for k in [2, 3] {
            let f = Flavor::new(Base::DirectedFull, k);
            let mut d = vertex_split(&f, &g, 0);
            assert_eq!(d.iter().map(|x| x.1.abs()).sum::<i64>(), 2, "{d:?}");
            d.add_lc(&add_univalent(&f, &g, 0, Direction::Out), -1);
            d.add_lc(&add_univalent(&f, &g, 0, Direction::In), -1);
            assert!(d.is_zero());
            assert!(f.d_key(&f.key_of(&g)).is_zero());
        }
    }

    #[test]
    fn antenna_in_removes_source() {
        let g = s(3, &[(0, 1), (0, 2), (1, 2)]);
        let f = Flavor::new(Base::DirectedFull, 3);
        let lc = add_univalent(&f, &g, 0, Direction::In);
        let (key, _) = lc.iter().next().unwrap();
        let t = f.parse_key(key);
        let cls = vertex_classes(&t);
        assert_eq!(cls.iter().filter(|c| **c == VertexClass::Source).count(), 0);
    }

    #[test]
    fn wheeled_quotient_drops_sourced_terms() {
        let f = Flavor::wheeled(3);
        let g = s(3, &[(0, 1), (0, 2), (1, 2), (1, 2), (2, 1)]);
        assert!(!f.keep(&g));
        assert!(Flavor::new(Base::DirectedDGC, 3).keep(&g));
    }
}

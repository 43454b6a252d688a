//! Bi-weighted and decorated directed graph complexes.
//!
//! Weights live in vertex colors (`out << 16 | in`), decorations use the
//! [`Decoration`] codes. Both complexes reuse the directed split labeling of
//! [`crate::gcomplex`]: the vertex at the tail of the new edge keeps label
//! `x`, the other one is appended. Weight splitting carries no sign.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::canon::{EdgeKind, Rules, Structure};
use crate::gcomplex::{incidences, split_vertex, valences, GraphComplex};
use crate::graphcore::{classify_from_valences, enumerate_graphs, Constraints, DirectedGraph, TextStyle, VertexClass};
use crate::{Error, Lc};

pub fn pack(out: u32, inn: u32) -> u32 {
    out << 16 | inn
}

pub fn unpack(c: u32) -> (u32, u32) {
    (c >> 16, c & 0xffff)
}

fn directed_rules(k: i64) -> Rules {
    let even = k % 2 == 0;
    Rules { vertex_sign: !even, kinds: vec![EdgeKind::new(true, even, false)] }
}

fn parity(k: i64) -> &'static str {
    if k % 2 == 0 {
        "even"
    } else {
        "odd"
    }
}

/// The three bi-weight conditions at one vertex.
pub fn weight_valid(w_out: u32, w_in: u32, out: usize, inn: usize) -> bool {
    let (wo, wi) = (w_out as usize, w_in as usize);
    wo + out >= 1 && wi + inn >= 1 && wo + wi + out + inn >= 3
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiWeightedGraph {
    pub graph: DirectedGraph,
    /// (out-weight, in-weight) per vertex.
    pub weights: Vec<(u32, u32)>,
}

impl BiWeightedGraph {
    pub fn new(graph: DirectedGraph, weights: Vec<(u32, u32)>) -> Result<Self, Error> {
        if weights.len() != graph.v {
            return Err(Error::Dimension(format!("{} weights for {} vertices", weights.len(), graph.v)));
        }
        Ok(BiWeightedGraph { graph, weights })
    }

    pub fn structure(&self) -> Structure {
        let mut s = self.graph.structure();
        s.colors = self.weights.iter().map(|&(a, b)| pack(a, b)).collect();
        s
    }

    pub fn from_structure(s: &Structure) -> Self {
        BiWeightedGraph {
            graph: DirectedGraph::from_structure(s),
            weights: s.colors.iter().map(|&c| unpack(c)).collect(),
        }
    }

    pub fn total_weight(&self) -> (u32, u32) {
        self.weights.iter().fold((0, 0), |(a, b), &(x, y)| (a + x, b + y))
    }
}

pub fn validate_biweight(g: &BiWeightedGraph) -> bool {
    structure_valid(&g.structure())
}

fn structure_valid(s: &Structure) -> bool {
    let (o, i) = valences(s);
    s.colors.iter().enumerate().all(|(x, &c)| {
        let (a, b) = unpack(c);
        weight_valid(a, b, o[x], i[x])
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FwPart {
    /// Every valid bi-weighted graph.
    All,
    /// Some vertex with positive out-weight and some with positive in-weight.
    Plus,
    /// Every weight zero.
    Zero,
    /// Not every weight zero.
    Star,
}

pub fn fwgc_membership(g: &BiWeightedGraph, which: FwPart) -> bool {
    part_holds(&g.structure(), which)
}

fn part_holds(s: &Structure, which: FwPart) -> bool {
    let ws: Vec<(u32, u32)> = s.colors.iter().map(|&c| unpack(c)).collect();
    match which {
        FwPart::All => true,
        FwPart::Plus => ws.iter().any(|w| w.0 > 0) && ws.iter().any(|w| w.1 > 0),
        FwPart::Zero => ws.iter().all(|&w| w == (0, 0)),
        FwPart::Star => ws.iter().any(|&w| w != (0, 0)),
    }
}

/// Truncation of the weights. The total cap gives an honest quotient complex,
/// since no term of the differential lowers the total weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WeightCap {
    pub component: u32,
    pub total: Option<u32>,
}

impl WeightCap {
    pub fn component(w: u32) -> Self {
        WeightCap { component: w, total: None }
    }

    pub fn total(t: u32) -> Self {
        WeightCap { component: t, total: Some(t) }
    }

    fn admits(&self, s: &Structure) -> bool {
        let mut sum = 0;
        for &c in &s.colors {
            let (a, b) = unpack(c);
            if a > self.component || b > self.component {
                return false;
            }
            sum += a + b;
        }
        self.total.is_none_or(|t| sum <= t)
    }
}

/// Weights of a new univalent vertex: out-antenna needs i ≥ 1, in-antenna
/// j ≥ 1, both need i + j ≥ 2.
pub fn univalent_weights(dir: crate::gcomplex::Direction, cap: u32) -> Vec<(u32, u32)> {
    use crate::gcomplex::Direction;
    let mut out = Vec::new();
    for i in 0..=cap {
        for j in 0..=cap {
            let ok = match dir {
                Direction::Out => i >= 1,
                Direction::In => j >= 1,
            };
            if ok && i + j >= 2 {
                out.push((i, j));
            }
        }
    }
    out
}

/// The bi-weighted complex fwGC_k under a weight cap.
#[derive(Clone, Debug)]
pub struct FwGC {
    pub k: i64,
    pub cap: WeightCap,
    pub part: FwPart,
    rules: Rules,
}

impl FwGC {
    pub fn new(k: i64, cap: WeightCap, part: FwPart) -> Self {
        FwGC { k, cap, part, rules: directed_rules(k) }
    }

    fn split_terms(&self, s: &Structure, x: usize, out: &mut Vec<(Structure, i64)>) {
        let inc = incidences(s, x);
        let (m, n) = unpack(s.colors[x]);
        for mask in 0..(1u64 << inc.len()) {
            for m1 in 0..=m {
                for n1 in 0..=n {
                    let mut t = split_vertex(s, x, &inc, mask, pack(m - m1, n - n1), 0);
                    t.colors[x] = pack(m1, n1);
                    out.push((t, 1));
                }
            }
        }
    }

    fn antenna_terms(&self, s: &Structure, x: usize, dir: crate::gcomplex::Direction, out: &mut Vec<(Structure, i64)>) {
        use crate::gcomplex::Direction;
        let inc = incidences(s, x);
        let (m, n) = unpack(s.colors[x]);
        let full = (1u64 << inc.len()) - 1;
        for (i, j) in univalent_weights(dir, self.cap.component) {
            match dir {
                Direction::Out if m >= 1 => {
                    let mut t = split_vertex(s, x, &inc, 0, pack(i, j), 0);
                    t.colors[x] = pack(m - 1, n);
                    out.push((t, -1));
                }
                Direction::In if n >= 1 => {
                    // univalent vertex keeps label x, the old vertex moves to v+1
                    let mut t = split_vertex(s, x, &inc, full, pack(m, n - 1), 0);
                    t.colors[x] = pack(i, j);
                    out.push((t, -1));
                }
                _ => {}
            }
        }
    }
}

impl GraphComplex for FwGC {
    fn tag(&self) -> String {
        format!("{}/weighted", parity(self.k))
    }

    fn rules(&self) -> &Rules {
        &self.rules
    }

    fn style(&self) -> TextStyle {
        TextStyle::Weights
    }

    fn keep(&self, s: &Structure) -> bool {
        !s.edges.iter().any(|e| e.0 == e.1) && structure_valid(s) && self.cap.admits(s) && part_holds(s, self.part)
    }

    fn raw_d(&self, s: &Structure) -> Vec<(Structure, i64)> {
        use crate::gcomplex::Direction;
        let mut out = Vec::new();
        for x in 0..s.n() {
            self.split_terms(s, x, &mut out);
            self.antenna_terms(s, x, Direction::Out, &mut out);
            self.antenna_terms(s, x, Direction::In, &mut out);
        }
        out
    }
}

/// δ_x with weight redistribution; invalid terms vanish.
pub fn bw_vertex_split(fw: &FwGC, g: &BiWeightedGraph, x: usize) -> Lc {
    let mut terms = Vec::new();
    fw.split_terms(&g.structure(), x, &mut terms);
    fw.lc_of(terms)
}

/// δ′_x or δ″_x (with its sign), new-vertex weights bounded by `cap`.
pub fn bw_add_univalent(fw: &FwGC, g: &BiWeightedGraph, x: usize, dir: crate::gcomplex::Direction, cap: u32) -> Lc {
    let capped = FwGC { cap: WeightCap { component: cap, total: fw.cap.total }, ..fw.clone() };
    let mut terms = Vec::new();
    capped.antenna_terms(&g.structure(), x, dir, &mut terms);
    let mut lc = capped.lc_of(terms);
    lc = lc.scaled(-1);
    lc
}

/// A weight slot: a fixed integer or ∞_r (every integer ≥ r).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightSpec {
    Fixed(u32),
    Inf(u32),
}

impl WeightSpec {
    fn values(self, cap: u32) -> Result<Vec<u32>, Error> {
        match self {
            WeightSpec::Fixed(w) => Ok(vec![w]),
            WeightSpec::Inf(r) if r > cap => Err(Error::Window(format!("cap {cap} below threshold {r}"))),
            WeightSpec::Inf(r) => Ok((r..=cap).collect()),
        }
    }
}

/// Multilinear expansion of ∞_r slots up to `fw.cap.component`.
pub fn expand_infinity(fw: &FwGC, g: &DirectedGraph, slots: &[(WeightSpec, WeightSpec)]) -> Result<Lc, Error> {
    if slots.len() != g.v {
        return Err(Error::Dimension(format!("{} slots for {} vertices", slots.len(), g.v)));
    }
    let cap = fw.cap.component;
    let mut choices: Vec<Vec<(u32, u32)>> = Vec::new();
    for &(a, b) in slots {
        let (xs, ys) = (a.values(cap)?, b.values(cap)?);
        choices.push(xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect());
    }
    let base = g.structure();
    let mut terms = Vec::new();
    let mut idx = vec![0usize; g.v];
    'outer: loop {
        let mut s = base.clone();
        s.colors = idx.iter().enumerate().map(|(x, &i)| pack(choices[x][i].0, choices[x][i].1)).collect();
        terms.push((s, 1));
        for x in 0..g.v {
            idx[x] += 1;
            if idx[x] < choices[x].len() {
                continue 'outer;
            }
            idx[x] = 0;
        }
        break;
    }
    Ok(fw.lc_of(terms))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HoliebDegree {
    pub from_graph: i64,
    pub from_corollas: i64,
}

/// Degree of the corresponding derivation, computed from the graph grading
/// and independently from the sum over corollas. Errors on a mismatch.
pub fn holieb_degree(g: &BiWeightedGraph, p: i64, q: i64) -> Result<HoliebDegree, Error> {
    if !validate_biweight(g) {
        return Err(Error::Invalid("invalid bi-weight".into()));
    }
    let (v, e) = (g.graph.v as i64, g.graph.e() as i64);
    let from_graph = (v - 1) * (p + q + 1) - e * (p + q);
    let (m, n) = g.total_weight();
    let (m, n) = (m as i64, n as i64);
    let mut sum = 0;
    for (x, &(wo, wi)) in g.weights.iter().enumerate() {
        let (o, i) = (g.graph.out_valence(x) as i64, g.graph.in_valence(x) as i64);
        sum += 1 - p * (o + wo as i64 - 1) - q * (i + wi as i64 - 1);
    }
    let from_corollas = sum - 1 - p * (1 - m) - q * (1 - n);
    if from_graph != from_corollas {
        return Err(Error::Invalid(format!("degree mismatch {from_graph} vs {from_corollas}")));
    }
    Ok(HoliebDegree { from_graph, from_corollas })
}

/// Bi-weighted graphs with `v` vertices, `e` edges and no tadpoles, all
/// weight assignments admitted by `fw`. One labeled representative per class.
pub fn fw_basis(fw: &FwGC, v: usize, e: usize) -> Result<Vec<String>, Error> {
    let mut c = Constraints::full();
    c.allow_tadpoles = false;
    let graphs = enumerate_graphs(v, e, &c)?;
    let mut keys = BTreeSet::new();
    let cap = fw.cap.component;
    for g in graphs {
        let base = g.structure();
        let mut idx = vec![(0u32, 0u32); v];
        loop {
            let mut s = base.clone();
            s.colors = idx.iter().map(|&(a, b)| pack(a, b)).collect();
            if let Some((k, _)) = fw.class_of(&s) {
                keys.insert(k);
            }
            let mut x = 0;
            while x < v {
                let w = &mut idx[x];
                if w.1 < cap {
                    w.1 += 1;
                    break;
                }
                w.1 = 0;
                if w.0 < cap {
                    w.0 += 1;
                    break;
                }
                w.0 = 0;
                x += 1;
            }
            if x == v {
                break;
            }
        }
    }
    Ok(keys.into_iter().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Decoration {
    /// ∞₁/∞₁
    InfInf = 0,
    /// ∞₁/0
    InfZero = 1,
    /// 0/∞₁
    ZeroInf = 2,
    /// 0/0
    ZeroZero = 3,
}

pub const ALL_DECORATIONS: [Decoration; 4] =
    [Decoration::InfInf, Decoration::InfZero, Decoration::ZeroInf, Decoration::ZeroZero];

impl Decoration {
    pub fn from_code(c: u32) -> Self {
        ALL_DECORATIONS[c as usize]
    }

    pub fn code(self) -> u32 {
        self as u32
    }

    pub fn text(self) -> &'static str {
        match self {
            Decoration::InfInf => "oo",
            Decoration::InfZero => "o0",
            Decoration::ZeroInf => "0o",
            Decoration::ZeroZero => "00",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "oo" => Decoration::InfInf,
            "o0" => Decoration::InfZero,
            "0o" => Decoration::ZeroInf,
            "00" => Decoration::ZeroZero,
            _ => return None,
        })
    }
}

/// Which decorations a vertex of the given class may carry.
pub fn decoration_legal(class: VertexClass, d: Decoration) -> bool {
    use Decoration::*;
    match class {
        VertexClass::UnivalentOut | VertexClass::UnivalentIn => d == InfInf,
        VertexClass::Source => matches!(d, InfInf | ZeroInf),
        VertexClass::Target => matches!(d, InfInf | InfZero),
        VertexClass::Passing => d != ZeroZero,
        VertexClass::Generic => true,
    }
}

fn decorations_legal(s: &Structure) -> bool {
    let (o, i) = valences(s);
    s.colors
        .iter()
        .enumerate()
        .all(|(x, &c)| decoration_legal(classify_from_valences(o[x], i[x]), Decoration::from_code(c)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum QPart {
    /// qGC_k: legal decorations.
    All,
    /// qGC⁺_k: some ∞₁/∞₁ vertex, or both a 0/∞₁ and an ∞₁/0 vertex.
    Plus,
    /// tGC⁺_k: qGC⁺ modulo graphs with a 0/0 vertex.
    TPlus,
    /// tGC*_k: graphs without a 0/0 vertex.
    TStar,
}

fn plus_condition(s: &Structure) -> bool {
    let has = |d: Decoration| s.colors.contains(&d.code());
    has(Decoration::InfInf) || (has(Decoration::ZeroInf) && has(Decoration::InfZero))
}

/// The four-decoration complex and its quotients.
#[derive(Clone, Debug)]
pub struct QGC {
    pub k: i64,
    pub part: QPart,
    rules: Rules,
}

/// Decoration pairs (tail vertex, head vertex) of the splitting part of d_x.
pub fn split_pairs(d: Decoration) -> &'static [(Decoration, Decoration)] {
    use Decoration::*;
    match d {
        InfInf => &[
            (InfInf, InfInf),
            (ZeroInf, InfInf),
            (InfZero, InfInf),
            (InfInf, ZeroInf),
            (InfInf, InfZero),
            (ZeroZero, InfInf),
            (InfZero, ZeroInf),
            (ZeroInf, InfZero),
            (InfInf, ZeroZero),
        ],
        ZeroInf => &[(ZeroInf, ZeroInf), (ZeroZero, ZeroInf), (ZeroInf, ZeroZero)],
        InfZero => &[(InfZero, InfZero), (ZeroZero, InfZero), (InfZero, ZeroZero)],
        ZeroZero => &[(ZeroZero, ZeroZero)],
    }
}

/// Antenna terms of d_x, all with coefficient −1: (new decoration of x,
/// true for an outgoing antenna). The antenna vertex is ∞₁/∞₁.
pub fn antenna_terms(d: Decoration) -> &'static [(Decoration, bool)] {
    use Decoration::*;
    match d {
        InfInf => &[(InfInf, true), (ZeroInf, true), (InfInf, false), (InfZero, false)],
        ZeroInf => &[(ZeroInf, false), (ZeroZero, false)],
        InfZero => &[(InfZero, true), (ZeroZero, true)],
        ZeroZero => &[],
    }
}

impl QGC {
    pub fn new(k: i64, part: QPart) -> Self {
        QGC { k, part, rules: directed_rules(k) }
    }

    pub fn degree(&self, s: &Structure) -> i64 {
        crate::graphcore::degree_of(s.n(), s.edges.len(), self.k)
    }
}

impl GraphComplex for QGC {
    fn tag(&self) -> String {
        format!("{}/decorated", parity(self.k))
    }

    fn rules(&self) -> &Rules {
        &self.rules
    }

    fn style(&self) -> TextStyle {
        TextStyle::Decorations
    }

    fn keep(&self, s: &Structure) -> bool {
        if s.edges.iter().any(|e| e.0 == e.1) || !decorations_legal(s) {
            return false;
        }
        match self.part {
            QPart::All => true,
            QPart::Plus => plus_condition(s),
            QPart::TPlus => plus_condition(s) && !s.colors.contains(&Decoration::ZeroZero.code()),
            QPart::TStar => !s.colors.contains(&Decoration::ZeroZero.code()),
        }
    }

    fn raw_d(&self, s: &Structure) -> Vec<(Structure, i64)> {
        let mut out = Vec::new();
        let inf = Decoration::InfInf.code();
        for x in 0..s.n() {
            let inc = incidences(s, x);
            let full = (1u64 << inc.len()) - 1;
            let dx = Decoration::from_code(s.colors[x]);
            for &(a, b) in split_pairs(dx) {
                for mask in 0..=full {
                    let mut t = split_vertex(s, x, &inc, mask, b.code(), 0);
                    t.colors[x] = a.code();
                    out.push((t, 1));
                }
            }
            for &(c, outgoing) in antenna_terms(dx) {
                let t = if outgoing {
                    let mut t = split_vertex(s, x, &inc, 0, inf, 0);
                    t.colors[x] = c.code();
                    t
                } else {
                    let mut t = split_vertex(s, x, &inc, full, c.code(), 0);
                    t.colors[x] = inf;
                    t
                };
                out.push((t, -1));
            }
        }
        out
    }
}

/// Number of univalent vertices.
pub fn univalent_count(s: &Structure) -> usize {
    let (o, i) = valences(s);
    o.iter().zip(&i).filter(|(a, b)| *a + *b == 1).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mono {
    /// Γ(ω): every tGC⁺ decoration of Γ.
    Omega,
    /// Γ(∞₁/0).
    OutInf,
    /// Γ(0/∞₁).
    InInf,
}

/// Labeled decoration sums of a plain directed structure, as classes of `q`.
pub fn mono_decorate(q: &QGC, s: &Structure, which: Mono) -> Result<Lc, Error> {
    let (o, i) = valences(s);
    let classes: Vec<VertexClass> = o.iter().zip(&i).map(|(&a, &b)| classify_from_valences(a, b)).collect();
    let univalent = |c: &VertexClass| matches!(c, VertexClass::UnivalentOut | VertexClass::UnivalentIn);
    match which {
        Mono::Omega => {
            if classes.iter().any(univalent) {
                return Err(Error::Invalid("Γ(ω) needs a graph without univalent vertices".into()));
            }
            let opts: Vec<Vec<Decoration>> = classes
                .iter()
                .map(|&c| {
                    [Decoration::InfInf, Decoration::InfZero, Decoration::ZeroInf]
                        .into_iter()
                        .filter(|&d| decoration_legal(c, d))
                        .collect()
                })
                .collect();
            let mut terms = Vec::new();
            let mut idx = vec![0usize; s.n()];
            'outer: loop {
                let mut t = s.clone();
                t.colors = idx.iter().enumerate().map(|(x, &j)| opts[x][j].code()).collect();
                if plus_condition(&t) {
                    terms.push((t, 1));
                }
                for x in 0..s.n() {
                    idx[x] += 1;
                    if idx[x] < opts[x].len() {
                        continue 'outer;
                    }
                    idx[x] = 0;
                }
                break;
            }
            Ok(q.lc_of(terms))
        }
        Mono::OutInf | Mono::InInf => {
            let (dec, blocked) = if which == Mono::OutInf {
                (Decoration::InfZero, crate::gcomplex::has_source_s(s))
            } else {
                (Decoration::ZeroInf, crate::gcomplex::has_target_s(s))
            };
            if blocked {
                return Ok(Lc::new());
            }
            let mut t = s.clone();
            t.colors = classes
                .iter()
                .map(|c| if univalent(c) { Decoration::InfInf.code() } else { dec.code() })
                .collect();
            Ok(q.lc_of(vec![(t, 1)]))
        }
    }
}

/// Mono-decoration of a linear combination of plain directed classes.
pub fn mono_decorate_lc<C: GraphComplex + ?Sized>(q: &QGC, src: &C, lc: &Lc, which: Mono) -> Result<Lc, Error> {
    let mut out = Lc::new();
    for (k, c) in lc.iter() {
        out.add_lc(&mono_decorate(q, &src.parse_key(k), which)?, c);
    }
    Ok(out)
}

/// d = d_s + d_u, where d_u collects the terms with one more univalent
/// vertex than their source.
pub fn d_split<C: GraphComplex + ?Sized>(cx: &C, lc: &Lc) -> (Lc, Lc) {
    let (mut ds, mut du) = (Lc::new(), Lc::new());
    for (k, c) in lc.iter() {
        let u0 = univalent_count(&cx.parse_key(k));
        for (t, a) in cx.d_key(k).iter() {
            if univalent_count(&cx.parse_key(t)) > u0 {
                du.add(t.clone(), a * c);
            } else {
                ds.add(t.clone(), a * c);
            }
        }
    }
    (ds, du)
}

/// Decorated bases of `q` on every shape with `v` vertices and `e` edges.
pub fn q_basis(q: &QGC, v: usize, e: usize) -> Result<Vec<String>, Error> {
    let mut c = Constraints::full();
    c.allow_tadpoles = false;
    let mut keys = BTreeSet::new();
    for g in enumerate_graphs(v, e, &c)? {
        let base = g.structure();
        let total = 4usize.pow(v as u32);
        for code in 0..total {
            let mut s = base.clone();
            s.colors = (0..v).map(|x| ((code >> (2 * x)) & 3) as u32).collect();
            if let Some((k, _)) = q.class_of(&s) {
                keys.insert(k);
            }
        }
    }
    Ok(keys.into_iter().collect())
}

//! Labeled connected directed multigraphs: text format, valences, gradings,
//! subcomplex predicates and enumeration up to isomorphism.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;

use crate::canon::{canonical_form, EdgeKind, Rules, Structure};
use crate::Error;

/// Vertices are `0..v` internally and `1..=v` in text.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DirectedGraph {
    pub v: usize,
    pub edges: Vec<(usize, usize)>,
    pub allow_tadpoles: bool,
    pub allow_multiedges: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexClass {
    Source,
    Target,
    Passing,
    Generic,
    UnivalentOut,
    UnivalentIn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GradingInfo {
    pub degree: i64,
    pub loop_number: i64,
    pub k: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subcomplex {
    Sourced,
    Targeted,
    St,
    SPlusT,
    Oriented,
    WheeledOnly,
}

impl DirectedGraph {
    pub fn new(v: usize, edges: Vec<(usize, usize)>) -> Result<Self, Error> {
        Self::with_flags(v, edges, true, true)
    }

    pub fn with_flags(
        v: usize,
        edges: Vec<(usize, usize)>,
        allow_tadpoles: bool,
        allow_multiedges: bool,
    ) -> Result<Self, Error> {
        let g = DirectedGraph { v, edges, allow_tadpoles, allow_multiedges };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), Error> {
        if self.v == 0 {
            return Err(Error::EmptyDomain);
        }
        if self.v > 250 {
            return Err(Error::Invalid(format!("too many vertices: {}", self.v)));
        }
        for &(t, h) in &self.edges {
            if t >= self.v || h >= self.v {
                return Err(Error::Invalid(format!("edge {}-{} out of range", t + 1, h + 1)));
            }
            if t == h && !self.allow_tadpoles {
                return Err(Error::Invalid(format!("tadpole at {}", t + 1)));
            }
        }
        if !self.allow_multiedges {
            let mut seen = HashSet::new();
            for &(t, h) in &self.edges {
                if !seen.insert((t.min(h), t.max(h))) {
                    return Err(Error::Invalid(format!("multi-edge {}-{}", t + 1, h + 1)));
                }
            }
        }
        if !is_connected(self.v, &self.edges) {
            return Err(Error::Invalid("graph is not connected".into()));
        }
        Ok(())
    }

    pub fn e(&self) -> usize {
        self.edges.len()
    }

    pub fn out_valence(&self, x: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == x).count()
    }

    pub fn in_valence(&self, x: usize) -> usize {
        self.edges.iter().filter(|e| e.1 == x).count()
    }

    pub fn valence(&self, x: usize) -> usize {
        self.out_valence(x) + self.in_valence(x)
    }

    pub fn has_tadpole(&self) -> bool {
        self.edges.iter().any(|e| e.0 == e.1)
    }

    pub fn structure(&self) -> Structure {
        Structure::plain(self.v, self.edges.iter().map(|&(t, h)| (t as u8, h as u8, 0)).collect())
    }

    pub fn from_structure(s: &Structure) -> Self {
        DirectedGraph {
            v: s.n(),
            edges: s.edges.iter().map(|&(t, h, _)| (t as usize, h as usize)).collect(),
            allow_tadpoles: true,
            allow_multiedges: true,
        }
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        let s = parse_structure(text)?;
        DirectedGraph::new(s.n(), s.edges.iter().map(|&(t, h, _)| (t as usize, h as usize)).collect())
    }

    pub fn grading(&self, k: i64) -> GradingInfo {
        GradingInfo { degree: degree(self, k), loop_number: loop_number(self), k }
    }
}

impl fmt::Display for DirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v={};e=", self.v)?;
        for (i, &(t, h)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}-{}", t + 1, h + 1)?;
        }
        Ok(())
    }
}

pub fn is_connected(v: usize, edges: &[(usize, usize)]) -> bool {
    if v == 0 {
        return false;
    }
    let mut parent: Vec<usize> = (0..v).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    let mut comps = v;
    for &(t, h) in edges {
        let (a, b) = (find(&mut parent, t), find(&mut parent, h));
        if a != b {
            parent[a] = b;
            comps -= 1;
        }
    }
    comps == 1
}

pub fn loop_number(g: &DirectedGraph) -> i64 {
    g.e() as i64 - g.v as i64 + 1
}

pub fn degree(g: &DirectedGraph, k: i64) -> i64 {
    degree_of(g.v, g.e(), k)
}

pub fn degree_of(v: usize, e: usize, k: i64) -> i64 {
    (v as i64 - 1) * k + (1 - k) * e as i64
}

pub fn classify_from_valences(out: usize, inn: usize) -> VertexClass {
    match (out, inn) {
        (1, 0) => VertexClass::UnivalentOut,
        (0, 1) => VertexClass::UnivalentIn,
        (1, 1) => VertexClass::Passing,
        (o, 0) if o >= 1 => VertexClass::Source,
        (0, i) if i >= 1 => VertexClass::Target,
        _ => VertexClass::Generic,
    }
}

pub fn classify_vertex(g: &DirectedGraph, x: usize) -> Result<VertexClass, Error> {
    if x >= g.v {
        return Err(Error::Invalid(format!("vertex {} out of range", x + 1)));
    }
    Ok(classify_from_valences(g.out_valence(x), g.in_valence(x)))
}

pub fn has_source(g: &DirectedGraph) -> bool {
    (0..g.v).any(|x| g.in_valence(x) == 0 && g.out_valence(x) >= 1)
}

pub fn has_target(g: &DirectedGraph) -> bool {
    (0..g.v).any(|x| g.out_valence(x) == 0 && g.in_valence(x) >= 1)
}

pub fn is_oriented(g: &DirectedGraph) -> bool {
    // Kahn's algorithm; tadpoles are cycles
    let mut indeg = vec![0usize; g.v];
    for &(_, h) in &g.edges {
        indeg[h] += 1;
    }
    let mut stack: Vec<usize> = (0..g.v).filter(|&x| indeg[x] == 0).collect();
    let mut seen = 0;
    while let Some(x) = stack.pop() {
        seen += 1;
        for &(t, h) in &g.edges {
            if t == x {
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    stack.push(h);
                }
            }
        }
    }
    seen == g.v
}

pub fn subcomplex_membership(g: &DirectedGraph, which: Subcomplex) -> bool {
    let (s, t) = (has_source(g), has_target(g));
    match which {
        Subcomplex::Sourced => s,
        Subcomplex::Targeted => t,
        Subcomplex::St => s && t,
        Subcomplex::SPlusT => s || t,
        Subcomplex::Oriented => is_oriented(g),
        Subcomplex::WheeledOnly => !s && !t,
    }
}

/// Constraints accepted by [`enumerate_graphs`].
#[derive(Clone, Debug, Default)]
pub struct Constraints {
    pub allow_tadpoles: bool,
    pub allow_multiedges: bool,
    pub min_total_valence: usize,
    pub forbid_passing: bool,
    pub require_has_source: bool,
    pub require_has_target: bool,
    pub require_no_source: bool,
    pub require_no_target: bool,
    pub require_oriented: bool,
}

impl Constraints {
    pub fn full() -> Self {
        Constraints { allow_tadpoles: true, allow_multiedges: true, ..Default::default() }
    }

    pub fn accepts(&self, g: &DirectedGraph) -> bool {
        if !self.allow_tadpoles && g.has_tadpole() {
            return false;
        }
        let mut out = vec![0usize; g.v];
        let mut inn = vec![0usize; g.v];
        for &(t, h) in &g.edges {
            out[t] += 1;
            inn[h] += 1;
        }
        for x in 0..g.v {
            if out[x] + inn[x] < self.min_total_valence {
                return false;
            }
            if self.forbid_passing && out[x] == 1 && inn[x] == 1 {
                return false;
            }
        }
        let src = (0..g.v).any(|x| inn[x] == 0 && out[x] >= 1);
        let tgt = (0..g.v).any(|x| out[x] == 0 && inn[x] >= 1);
        if (self.require_has_source && !src)
            || (self.require_has_target && !tgt)
            || (self.require_no_source && src)
            || (self.require_no_target && tgt)
        {
            return false;
        }
        !(self.require_oriented && !is_oriented(g))
    }
}

pub(crate) fn plain_rules(directed: bool) -> Rules {
    Rules { vertex_sign: false, kinds: vec![EdgeKind::new(directed, false, false)] }
}

/// Undirected multigraph shapes (edges stored with tail <= head), one per
/// isomorphism class, sorted by canonical encoding.
pub fn enumerate_shapes(v: usize, e: usize, c: &Constraints) -> Result<Vec<DirectedGraph>, Error> {
    if v == 0 {
        return Err(Error::EmptyDomain);
    }
    if v > 16 {
        return Err(Error::Invalid("window too large".into()));
    }
    let mut pairs = Vec::new();
    for a in 0..v {
        for b in a..v {
            if a == b && !c.allow_tadpoles {
                continue;
            }
            pairs.push((a, b));
        }
    }
    let rules = plain_rules(false);
    let mut found: Vec<(Structure, DirectedGraph)> = Vec::new();
    let mut seen: HashSet<Structure> = HashSet::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(e);
    let mut deg = vec![0usize; v];
    shape_rec(e, c, &pairs, 0, &mut chosen, &mut deg, &mut |edges| {
        let g = DirectedGraph {
            v,
            edges: edges.to_vec(),
            allow_tadpoles: c.allow_tadpoles,
            allow_multiedges: c.allow_multiedges,
        };
        if !is_connected(v, &g.edges) {
            return;
        }
        let form = canonical_form(&g.structure(), &rules).form;
        if seen.insert(form.clone()) {
            found.push((form.clone(), DirectedGraph::from_structure(&form).with(c)));
        }
    });
    found.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(found.into_iter().map(|x| x.1).collect())
}

impl DirectedGraph {
    fn with(mut self, c: &Constraints) -> Self {
        self.allow_tadpoles = c.allow_tadpoles;
        self.allow_multiedges = c.allow_multiedges;
        self
    }
}

type Emit<'a> = dyn FnMut(&[(usize, usize)]) + 'a;

fn shape_rec(
    e: usize,
    c: &Constraints,
    pairs: &[(usize, usize)],
    start: usize,
    chosen: &mut Vec<usize>,
    deg: &mut Vec<usize>,
    emit: &mut Emit,
) {
    let left = e - chosen.len();
    let deficit: usize = deg.iter().map(|&d| c.min_total_valence.saturating_sub(d).max(usize::from(d == 0))).sum();
    if deficit > 2 * left {
        return;
    }
    if left == 0 {
        let edges: Vec<(usize, usize)> = chosen.iter().map(|&i| pairs[i]).collect();
        emit(&edges);
        return;
    }
    for i in start..pairs.len() {
        if !c.allow_multiedges && chosen.last() == Some(&i) {
            continue;
        }
        let (a, b) = pairs[i];
        chosen.push(i);
        deg[a] += 1;
        deg[b] += 1;
        shape_rec(e, c, pairs, i, chosen, deg, emit);
        deg[a] -= 1;
        deg[b] -= 1;
        chosen.pop();
    }
}

/// One labeled representative per isomorphism class of connected directed
/// multigraphs satisfying `c`, sorted by canonical encoding.
pub fn enumerate_graphs(v: usize, e: usize, c: &Constraints) -> Result<Vec<DirectedGraph>, Error> {
    let shapes = enumerate_shapes(v, e, &Constraints { min_total_valence: c.min_total_valence, ..c.clone() })?;
    let rules = plain_rules(true);
    let mut all: Vec<Structure> = shapes
        .par_iter()
        .flat_map_iter(|shape| {
            let free: Vec<usize> = (0..shape.e()).filter(|&i| shape.edges[i].0 != shape.edges[i].1).collect();
            let mut local: HashSet<Structure> = HashSet::new();
            for mask in 0u64..(1u64 << free.len()) {
                let mut edges = shape.edges.clone();
                for (bit, &i) in free.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        edges[i] = (edges[i].1, edges[i].0);
                    }
                }
                let g = DirectedGraph { v, edges, allow_tadpoles: c.allow_tadpoles, allow_multiedges: c.allow_multiedges };
                if !c.accepts(&g) {
                    continue;
                }
                local.insert(canonical_form(&g.structure(), &rules).form);
            }
            local.into_iter()
        })
        .collect();
    all.sort();
    all.dedup();
    Ok(all.into_iter().map(|s| DirectedGraph::from_structure(&s).with(c)).collect())
}

/// Parse `v=..;e=..` with optional `;w=`, `;dec=`, `;kind=` sections into a
/// structure. Colors: weights pack as `out << 16 | in`; decorations use
/// [`crate::biweight::Decoration`] codes; kinds use `- s t w`.
pub fn parse_structure(text: &str) -> Result<Structure, Error> {
    let bad = |m: &str| Error::Parse(format!("{m}: {text}"));
    let mut v: Option<usize> = None;
    let mut edges: Vec<(u8, u8, u8)> = Vec::new();
    let mut colors: Option<Vec<u32>> = None;
    let mut kinds: Option<Vec<u8>> = None;
    for part in text.trim().split(';') {
        let (key, val) = part.split_once('=').ok_or_else(|| bad("missing '='"))?;
        match key {
            "v" => v = Some(val.parse().map_err(|_| bad("bad vertex count"))?),
            "e" => {
                for tok in val.split(',').filter(|t| !t.is_empty()) {
                    let (a, b) = tok.split_once('-').ok_or_else(|| bad("bad edge"))?;
                    let a: usize = a.parse().map_err(|_| bad("bad edge"))?;
                    let b: usize = b.parse().map_err(|_| bad("bad edge"))?;
                    if a == 0 || b == 0 || a > 250 || b > 250 {
                        return Err(bad("edge index out of range"));
                    }
                    edges.push(((a - 1) as u8, (b - 1) as u8, 0));
                }
            }
            "w" => {
                let mut cs = Vec::new();
                for tok in val.split(',') {
                    let (a, b) = tok.split_once('/').ok_or_else(|| bad("bad weight"))?;
                    let a: u32 = a.parse().map_err(|_| bad("bad weight"))?;
                    let b: u32 = b.parse().map_err(|_| bad("bad weight"))?;
                    cs.push(a << 16 | b);
                }
                colors = Some(cs);
            }
            "dec" => {
                let mut cs = Vec::new();
                for tok in val.split(',') {
                    cs.push(crate::biweight::Decoration::parse(tok).ok_or_else(|| bad("bad decoration"))? as u32);
                }
                colors = Some(cs);
            }
            "kind" => {
                let mut ks = Vec::new();
                for tok in val.split(',') {
                    ks.push(match tok {
                        "-" => 0,
                        "s" => 1,
                        "t" => 2,
                        "w" => 3,
                        _ => return Err(bad("bad edge kind")),
                    });
                }
                kinds = Some(ks);
            }
            _ => return Err(bad("unknown section")),
        }
    }
    let v = v.ok_or_else(|| bad("missing v"))?;
    if edges.iter().any(|&(a, b, _)| a as usize >= v || b as usize >= v) {
        return Err(bad("edge index out of range"));
    }
    if let Some(ks) = kinds {
        if ks.len() != edges.len() {
            return Err(bad("kind count mismatch"));
        }
        for (e, k) in edges.iter_mut().zip(ks) {
            e.2 = k;
        }
    }
    let colors = colors.unwrap_or_else(|| vec![0; v]);
    if colors.len() != v {
        return Err(bad("vertex data count mismatch"));
    }
    Ok(Structure { colors, edges })
}

/// How vertex colors and edge kinds are rendered in text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TextStyle {
    Plain,
    Weights,
    Decorations,
    Kinds,
}

pub fn format_structure(s: &Structure, style: TextStyle) -> String {
    let mut out = format!("v={};e=", s.n());
    for (i, &(t, h, _)) in s.edges.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("{}-{}", t + 1, h + 1));
    }
    match style {
        TextStyle::Plain => {}
        TextStyle::Weights => {
            let ws: Vec<String> = s.colors.iter().map(|c| format!("{}/{}", c >> 16, c & 0xffff)).collect();
            out.push_str(";w=");
            out.push_str(&ws.join(","));
        }
        TextStyle::Decorations => {
            let ds: Vec<&str> = s
                .colors
                .iter()
                .map(|&c| crate::biweight::Decoration::from_code(c).text())
                .collect();
            out.push_str(";dec=");
            out.push_str(&ds.join(","));
        }
        TextStyle::Kinds => {
            let ks: Vec<&str> = s.edges.iter().map(|e| ["-", "s", "t", "w"][e.2 as usize]).collect();
            out.push_str(";kind=");
            out.push_str(&ks.join(","));
        }
    }
    out
}

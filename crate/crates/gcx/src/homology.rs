//! Graded bases, differential matrices and cohomology dimensions.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::canon::Structure;
use crate::exactla::{export_sms, q, rank_in, Field, SparseMatrix};
use crate::gcomplex::{Base, Flavor, GraphComplex};
use crate::graphcore::{enumerate_graphs, enumerate_shapes, Constraints};
use crate::Error;

#[derive(Clone, Debug, Serialize)]
pub struct GradedBasis {
    pub flavor: String,
    pub k: i64,
    pub loop_number: i64,
    pub degree: i64,
    pub classes: Vec<String>,
}

/// Upper bound on vertex count accepted by the builder.
#[derive(Clone, Copy, Debug)]
pub struct Window {
    pub v_max: usize,
}

impl Default for Window {
    fn default() -> Self {
        Window { v_max: 9 }
    }
}

fn constraints(base: Base) -> Constraints {
    let mut c = Constraints::full();
    match base {
        Base::UndirectedFull | Base::DirectedFull => {}
        Base::UndirectedGC => {
            c.allow_tadpoles = false;
            c.min_total_valence = 3;
        }
        Base::LoopGraphs => c.min_total_valence = 2,
        Base::DirectedDGC => {
            c.allow_tadpoles = false;
            c.min_total_valence = 2;
            c.forbid_passing = true;
        }
    }
    c
}

/// Nonzero classes of `f` with exactly `v` vertices and `e` edges.
pub fn basis_at(f: &Flavor, v: usize, e: usize) -> Result<Vec<String>, Error> {
    if v == 0 {
        return Ok(Vec::new());
    }
    if f.base == Base::LoopGraphs {
        // the only connected graph with every vertex bivalent is the cycle
        let cycle = if v == e { f.class_of(&loop_graph(v)) } else { None };
        return Ok(cycle.map(|c| c.0).into_iter().collect());
    }
    let c = constraints(f.base);
    let graphs = if f.is_directed() { enumerate_graphs(v, e, &c)? } else { enumerate_shapes(v, e, &c)? };
    let keys: BTreeSet<String> = graphs
        .par_iter()
        .filter_map(|g| f.class_of(&g.structure()).map(|x| x.0))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    Ok(keys.into_iter().collect())
}

/// Vertex and edge counts of bidegree (b, d): d = (1-k)b + v - 1.
pub fn counts_for(k: i64, b: i64, d: i64) -> Option<(usize, usize)> {
    let v = d - (1 - k) * b + 1;
    let e = b + v - 1;
    (v >= 1 && e >= 0).then_some((v as usize, e as usize))
}

pub fn build_basis(f: &Flavor, b: i64, d: i64, w: Window) -> Result<GradedBasis, Error> {
    let classes = match counts_for(f.k, b, d) {
        None => Vec::new(),
        Some((v, _)) if v > w.v_max => return Err(Error::Window(format!("{v} vertices exceed the window"))),
        Some((v, e)) => basis_at(f, v, e)?,
    };
    Ok(GradedBasis { flavor: f.name(), k: f.k, loop_number: b, degree: d, classes })
}

/// Matrix of `cx.d` from `cols` to `rows`. Fails if an image term is missing
/// from `rows`.
pub fn assemble<C: GraphComplex + ?Sized>(cx: &C, cols: &[String], rows: &[String]) -> Result<SparseMatrix, Error> {
    let index: HashMap<&str, usize> = rows.iter().enumerate().map(|(i, k)| (k.as_str(), i)).collect();
    let images: Vec<_> = cols.par_iter().map(|k| cx.d_key(k)).collect();
    let mut m = SparseMatrix::with_bases(rows.to_vec(), cols.to_vec());
    for (j, img) in images.iter().enumerate() {
        for (key, c) in img.iter() {
            let i = *index
                .get(key.as_str())
                .ok_or_else(|| Error::Window(format!("image term {key} outside the target basis")))?;
            m.set(i, j, q(c));
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeRow {
    pub degree: i64,
    pub dim: usize,
    pub rank_out: usize,
    pub rank_in: usize,
    pub h: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologyReport {
    pub flavor: String,
    pub k: i64,
    pub loop_number: i64,
    pub field: String,
    pub rows: Vec<DegreeRow>,
    #[serde(skip)]
    pub matrices: Vec<(String, String)>,
}

impl CohomologyReport {
    pub fn h(&self, degree: i64) -> Option<usize> {
        self.rows.iter().find(|r| r.degree == degree).map(|r| r.h)
    }
}

/// Cohomology in degrees `lo..=hi` at loop order `b`.
pub fn cohomology_dims(
    f: &Flavor,
    b: i64,
    lo: i64,
    hi: i64,
    w: Window,
    field: Field,
    dump_sms: bool,
) -> Result<CohomologyReport, Error> {
    let mut bases: HashMap<i64, Vec<String>> = HashMap::new();
    for d in (lo - 1)..=(hi + 1) {
        bases.insert(d, build_basis(f, b, d, w)?.classes);
    }
    let mut ranks: HashMap<i64, usize> = HashMap::new();
    let mut matrices = Vec::new();
    let mut mats: HashMap<i64, SparseMatrix> = HashMap::new();
    for d in (lo - 1)..=hi {
        let m = assemble(f, &bases[&d], &bases[&(d + 1)])?;
        ranks.insert(d, rank_in(&m, field)?.rank);
        if dump_sms {
            matrices.push((format!("{}_k{}_b{}_d{}.sms", sms_name(f), f.k, b, d), export_sms(&m)));
        }
        mats.insert(d, m);
    }
    for d in lo..=hi {
        let (a, bm) = (&mats[&(d - 1)], &mats[&d]);
        if !product_is_zero(bm, a) {
            return Err(Error::Invalid(format!("d∘d is nonzero at degree {d}")));
        }
    }
    let rows = (lo..=hi)
        .map(|d| {
            let dim = bases[&d].len();
            let (ro, ri) = (ranks[&d], ranks[&(d - 1)]);
            DegreeRow { degree: d, dim, rank_out: ro, rank_in: ri, h: dim - ro - ri }
        })
        .collect();
    let field = match field {
        Field::Rational => "rational".to_string(),
        Field::Prime(p) => format!("gf{p}"),
    };
    Ok(CohomologyReport { flavor: f.name(), k: f.k, loop_number: b, field, rows, matrices })
}

fn sms_name(f: &Flavor) -> String {
    f.name().replace('/', "_").replace('+', "p")
}

/// b·a == 0 for sparse matrices with matching inner dimension.
pub fn product_is_zero(b: &SparseMatrix, a: &SparseMatrix) -> bool {
    let mut by_row: HashMap<usize, Vec<(usize, crate::exactla::Q)>> = HashMap::new();
    for (&(r, c), v) in b.entries() {
        by_row.entry(c).or_default().push((r, v.clone()));
    }
    let mut acc: HashMap<(usize, usize), crate::exactla::Q> = HashMap::new();
    for (&(r, c), v) in a.entries() {
        if let Some(list) = by_row.get(&r) {
            for (i, w) in list {
                *acc.entry((*i, c)).or_default() += w * v;
            }
        }
    }
    acc.values().all(|x| *x == q(0))
}

/// Loop graph with `i` bivalent vertices: 1->2->...->i->1.
pub fn loop_graph(i: usize) -> Structure {
    Structure::plain(i, (0..i).map(|a| (a as u8, ((a + 1) % i) as u8, 0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_grading() {
        assert_eq!(counts_for(2, 3, 0), Some((4, 6)));
        assert_eq!(counts_for(2, 3, -1), Some((3, 5)));
        assert_eq!(counts_for(3, 2, -3), Some((2, 3)));
    }

    #[test]
    fn loop_graph_classes() {
        for k in [2, 3] {
            let f = Flavor::new(Base::LoopGraphs, k);
            for i in 1..=9usize {
                let nonzero = f.class_of(&loop_graph(i)).is_some();
                assert_eq!(nonzero, (i as i64 - (2 * k + 1)).rem_euclid(4) == 0, "k={k} i={i}");
            }
        }
    }
}

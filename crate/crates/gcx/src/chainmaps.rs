//! Maps between the directed, undirected and decorated complexes, the cone
//! of the projection P, and a generic chain-map checker.
//!
//! `a` pairs Γ₁ (no source) with Γ₁(∞₁/0) and Γ₂ (no target) with Γ₂(0/∞₁),
//! which is the pairing under which it is a chain map.

use rayon::prelude::*;
use serde::Serialize;

use crate::biweight::{d_split, mono_decorate_lc, univalent_count, Mono, QPart, QGC};
use crate::gcomplex::{Base, Flavor, GraphComplex};
use crate::graphcore::Subcomplex;
use crate::homology::basis_at;
use crate::{Error, Lc};

/// Sum over all orientations of an undirected class. For odd k each edge
/// reversed against the stored representative contributes a sign.
pub fn orient_sum(src: &Flavor, tgt: &Flavor, key: &str) -> Lc {
    let s = src.parse_key(key);
    let e = s.edges.len();
    let mut terms = Vec::with_capacity(1 << e);
    for flips in 0u64..(1 << e) {
        let mut t = s.clone();
        for (i, edge) in t.edges.iter_mut().enumerate() {
            if flips >> i & 1 == 1 {
                *edge = (edge.1, edge.0, edge.2);
            }
        }
        let sign = if src.k % 2 != 0 && flips.count_ones() % 2 == 1 { -1 } else { 1 };
        terms.push((t, sign));
    }
    tgt.lc_of(terms)
}

pub fn orient_sum_lc(src: &Flavor, tgt: &Flavor, lc: &Lc) -> Lc {
    let mut out = Lc::new();
    for (k, c) in lc.iter() {
        out.add_lc(&orient_sum(src, tgt, k), c);
    }
    out
}

/// Keeps only the terms without univalent vertices.
pub fn without_univalent<C: GraphComplex + ?Sized>(cx: &C, lc: &Lc) -> Lc {
    lc.filter(|k| univalent_count(&cx.parse_key(k)) == 0)
}

/// The complexes the maps run between, for one k.
pub struct Maps {
    pub k: i64,
    pub gc: Flavor,
    pub dgc: Flavor,
    pub dgc_s: Flavor,
    pub dgc_t: Flavor,
    /// tGC⁺, hosting b, a and a⊕b.
    pub plus: QGC,
    /// tGC*, hosting the constant decorations.
    pub star: QGC,
}

/// (Γ, (Γ₁, Γ₂)) in dGC ⊕ (dGC/dGC^s[1] ⊕ dGC/dGC^t[1]).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConeElement {
    pub gamma: Lc,
    pub g1: Lc,
    pub g2: Lc,
}

impl ConeElement {
    pub fn is_zero(&self) -> bool {
        self.gamma.is_zero() && self.g1.is_zero() && self.g2.is_zero()
    }
}

impl Maps {
    pub fn new(k: i64) -> Self {
        Maps {
            k,
            gc: Flavor::new(Base::UndirectedGC, k),
            dgc: Flavor::new(Base::DirectedDGC, k),
            dgc_s: Flavor::quotient(Base::DirectedDGC, k, Subcomplex::Sourced),
            dgc_t: Flavor::quotient(Base::DirectedDGC, k, Subcomplex::Targeted),
            plus: QGC::new(k, QPart::TPlus),
            star: QGC::new(k, QPart::TStar),
        }
    }

    /// b(Γ) = Γ(ω).
    pub fn map_b(&self, lc: &Lc) -> Result<Lc, Error> {
        mono_decorate_lc(&self.plus, &self.dgc, lc, Mono::Omega)
    }

    /// f^s(Γ) = Γ(∞₁/0) on dGC/dGC^s.
    pub fn map_fs(&self, lc: &Lc) -> Result<Lc, Error> {
        mono_decorate_lc(&self.star, &self.dgc_s, &self.project(lc, &self.dgc_s), Mono::OutInf)
    }

    /// f^t(Γ) = Γ(0/∞₁) on dGC/dGC^t.
    pub fn map_ft(&self, lc: &Lc) -> Result<Lc, Error> {
        mono_decorate_lc(&self.star, &self.dgc_t, &self.project(lc, &self.dgc_t), Mono::InInf)
    }

    /// a(Γ₁, Γ₂) = d_u(Γ₁(∞₁/0) + Γ₂(0/∞₁)).
    pub fn map_a(&self, g1: &Lc, g2: &Lc) -> Result<Lc, Error> {
        let mut dec = self.map_fs(g1)?;
        dec.add_lc(&self.map_ft(g2)?, 1);
        Ok(d_split(&self.star, &dec).1)
    }

    /// The map a paired the other way round, Γ₁ ↦ Γ₁(0/∞₁), Γ₂ ↦ Γ₂(∞₁/0).
    pub fn map_a_swapped(&self, g1: &Lc, g2: &Lc) -> Result<Lc, Error> {
        let mut dec = mono_decorate_lc(&self.star, &self.dgc_s, &self.project(g1, &self.dgc_s), Mono::InInf)?;
        dec.add_lc(&mono_decorate_lc(&self.star, &self.dgc_t, &self.project(g2, &self.dgc_t), Mono::OutInf)?, 1);
        Ok(d_split(&self.star, &dec).1)
    }

    /// g = a ⊕ b.
    pub fn map_g(&self, x: &ConeElement) -> Result<Lc, Error> {
        let mut out = self.map_b(&x.gamma)?;
        out.add_lc(&self.map_a(&x.g1, &x.g2)?, 1);
        Ok(out)
    }

    fn project(&self, lc: &Lc, f: &Flavor) -> Lc {
        lc.filter(|k| f.keep(&f.parse_key(k)))
    }

    /// P: dGC → dGC/dGC^s ⊕ dGC/dGC^t.
    pub fn projection(&self, lc: &Lc) -> (Lc, Lc) {
        (self.project(lc, &self.dgc_s), self.project(lc, &self.dgc_t))
    }

    /// d_c(Γ,(Γ₁,Γ₂)) = (dΓ, (−PΓ − dΓ₁, −PΓ − dΓ₂)).
    pub fn cone_differential(&self, x: &ConeElement) -> ConeElement {
        let (p1, p2) = self.projection(&x.gamma);
        let mut g1 = p1.scaled(-1);
        g1.add_lc(&self.dgc_s.d(&x.g1), -1);
        let mut g2 = p2.scaled(-1);
        g2.add_lc(&self.dgc_t.d(&x.g2), -1);
        ConeElement { gamma: self.dgc.d(&x.gamma), g1, g2 }
    }

    /// Full differential of tGC⁺ (or tGC* for constant decorations; the
    /// two agree on tGC⁺ keys).
    pub fn d_plus(&self, lc: &Lc) -> Lc {
        self.plus.d(lc)
    }
}

/// Named maps known to the checker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MapName {
    OrientSum,
    B,
    Fs,
    Ft,
    A,
    APlusB,
    /// Negative control: b with one decoration dropped.
    CorruptedB,
    /// Negative control: a with the pairing of decorations swapped.
    SwappedA,
}

impl MapName {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "f" | "orient" => MapName::OrientSum,
            "b" => MapName::B,
            "fs" => MapName::Fs,
            "ft" => MapName::Ft,
            "a" => MapName::A,
            "aplusb" | "g" => MapName::APlusB,
            "b-corrupted" => MapName::CorruptedB,
            "a-swapped" => MapName::SwappedA,
            _ => return None,
        })
    }

    pub fn all() -> [MapName; 8] {
        use MapName::*;
        [OrientSum, B, Fs, Ft, A, APlusB, CorruptedB, SwappedA]
    }

    pub fn is_control(self) -> bool {
        matches!(self, MapName::CorruptedB | MapName::SwappedA)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ChainWindow {
    pub v_max: usize,
    pub e_max: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainMapReport {
    pub map: String,
    pub k: i64,
    pub window: ChainWindow,
    /// Basis elements of the source checked.
    pub checked: usize,
    /// Elements whose image under the map is nonzero.
    pub nonzero_images: usize,
    pub pass: bool,
    pub witnesses: Vec<String>,
}

type MapFn<'a, D> = Box<dyn Fn(&D) -> Result<Lc, Error> + Sync + 'a>;

/// A chain map given by closures: checks φ(d x) = d(φ x) on every element.
pub struct ChainMapSpec<'a, D> {
    pub name: String,
    pub domain: Vec<(String, D)>,
    pub map: MapFn<'a, D>,
    pub d_source: Box<dyn Fn(&D) -> D + Sync + 'a>,
    pub d_target: Box<dyn Fn(&Lc) -> Lc + Sync + 'a>,
}

pub fn verify_chain_map<D: Sync>(spec: &ChainMapSpec<D>, k: i64, window: ChainWindow) -> Result<ChainMapReport, Error> {
    let results: Vec<Result<(bool, bool), Error>> = spec
        .domain
        .par_iter()
        .map(|(_, x)| {
            let img = (spec.map)(x)?;
            let lhs = (spec.map)(&(spec.d_source)(x))?;
            let rhs = (spec.d_target)(&img);
            Ok((lhs == rhs, !img.is_zero()))
        })
        .collect();
    let mut witnesses = Vec::new();
    let mut nonzero = 0;
    for ((label, _), r) in spec.domain.iter().zip(results) {
        let (ok, nz) = r?;
        nonzero += nz as usize;
        if !ok {
            witnesses.push(label.clone());
        }
    }
    Ok(ChainMapReport {
        map: spec.name.clone(),
        k,
        window,
        checked: spec.domain.len(),
        nonzero_images: nonzero,
        pass: witnesses.is_empty(),
        witnesses,
    })
}

/// Basis keys of `f` in the window.
pub fn window_basis(f: &Flavor, w: ChainWindow) -> Result<Vec<String>, Error> {
    let mut keys = Vec::new();
    for v in 1..=w.v_max {
        for e in 0..=w.e_max {
            keys.extend(basis_at(f, v, e)?);
        }
    }
    Ok(keys)
}

fn singles(keys: Vec<String>) -> Vec<(String, Lc)> {
    keys.into_iter().map(|k| (k.clone(), Lc::single(k, 1))).collect()
}

/// Cone generators in the window: (Γ,0,0), (0,Γ₁,0), (0,0,Γ₂).
pub fn cone_basis(m: &Maps, w: ChainWindow) -> Result<Vec<(String, ConeElement)>, Error> {
    let mut out = Vec::new();
    for k in window_basis(&m.dgc, w)? {
        out.push((format!("({k},0,0)"), ConeElement { gamma: Lc::single(k, 1), ..Default::default() }));
    }
    for k in window_basis(&m.dgc_s, w)? {
        out.push((format!("(0,{k},0)"), ConeElement { g1: Lc::single(k, 1), ..Default::default() }));
    }
    for k in window_basis(&m.dgc_t, w)? {
        out.push((format!("(0,0,{k})"), ConeElement { g2: Lc::single(k, 1), ..Default::default() }));
    }
    Ok(out)
}

fn neg(lc: &Lc) -> Lc {
    lc.scaled(-1)
}

/// Runs one named map over the window.
pub fn verify_named(name: MapName, k: i64, w: ChainWindow) -> Result<ChainMapReport, Error> {
    let m = Maps::new(k);
    let m = &m;
    let label = format!("{name:?}");
    match name {
        MapName::OrientSum => {
            let spec = ChainMapSpec {
                name: label,
                domain: singles(window_basis(&m.gc, w)?),
                map: Box::new(|x: &Lc| Ok(orient_sum_lc(&m.gc, &m.dgc, x))),
                d_source: Box::new(|x: &Lc| m.gc.d(x)),
                d_target: Box::new(|x: &Lc| m.dgc.d(x)),
            };
            verify_chain_map(&spec, k, w)
        }
        MapName::B | MapName::CorruptedB => {
            let corrupt = name == MapName::CorruptedB;
            let spec = ChainMapSpec {
                name: label,
                domain: singles(window_basis(&m.dgc, w)?),
                map: Box::new(move |x: &Lc| {
                    let img = m.map_b(x)?;
                    Ok(if corrupt { drop_first_term(&img) } else { img })
                }),
                d_source: Box::new(|x: &Lc| m.dgc.d(x)),
                d_target: Box::new(|x: &Lc| without_univalent(&m.plus, &m.plus.d(x))),
            };
            verify_chain_map(&spec, k, w)
        }
        MapName::Fs | MapName::Ft => {
            let (src, fs) = if name == MapName::Fs { (&m.dgc_s, true) } else { (&m.dgc_t, false) };
            let spec = ChainMapSpec {
                name: label,
                domain: singles(window_basis(src, w)?),
                map: Box::new(move |x: &Lc| if fs { m.map_fs(x) } else { m.map_ft(x) }),
                d_source: Box::new(move |x: &Lc| src.d(x)),
                d_target: Box::new(|x: &Lc| without_univalent(&m.star, &m.star.d(x))),
            };
            verify_chain_map(&spec, k, w)
        }
        MapName::A | MapName::SwappedA => {
            let swapped = name == MapName::SwappedA;
            let domain: Vec<(String, ConeElement)> =
                cone_basis(m, w)?.into_iter().filter(|(_, x)| x.gamma.is_zero()).collect();
            let spec = ChainMapSpec {
                name: label,
                domain,
                map: Box::new(move |x: &ConeElement| {
                    if swapped {
                        m.map_a_swapped(&x.g1, &x.g2)
                    } else {
                        m.map_a(&x.g1, &x.g2)
                    }
                }),
                // the shifted differential is −d
                d_source: Box::new(|x: &ConeElement| ConeElement {
                    gamma: Lc::new(),
                    g1: neg(&m.dgc_s.d(&x.g1)),
                    g2: neg(&m.dgc_t.d(&x.g2)),
                }),
                d_target: Box::new(|x: &Lc| m.d_plus(x)),
            };
            verify_chain_map(&spec, k, w)
        }
        MapName::APlusB => {
            let spec = ChainMapSpec {
                name: label,
                domain: cone_basis(m, w)?,
                map: Box::new(|x: &ConeElement| m.map_g(x)),
                d_source: Box::new(|x: &ConeElement| m.cone_differential(x)),
                d_target: Box::new(|x: &Lc| m.d_plus(x)),
            };
            verify_chain_map(&spec, k, w)
        }
    }
}

fn drop_first_term(lc: &Lc) -> Lc {
    match lc.keys().next() {
        None => lc.clone(),
        Some(first) => {
            let first = first.clone();
            lc.filter(|k| *k != first)
        }
    }
}

/// Cone generators whose d_c² does not vanish.
pub fn cone_square_failures(k: i64, w: ChainWindow) -> Result<Vec<String>, Error> {
    let m = Maps::new(k);
    let basis = cone_basis(&m, w)?;
    Ok(basis
        .par_iter()
        .filter(|(_, x)| !m.cone_differential(&m.cone_differential(x)).is_zero())
        .map(|(l, _)| l.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::Structure;

    #[test]
    fn projection_kills_sourced_terms() {
        let m = Maps::new(3);
        // 0 -> 1, 0 -> 2, 1 -> 2, 1 <-> 2: vertex 0 is a source, vertex 2 is not a target
        let s = Structure::plain(3, vec![(0, 1, 0), (0, 2, 0), (1, 2, 0), (1, 2, 0), (2, 1, 0)]);
        let (key, _) = m.dgc.class_of(&s).unwrap();
        let (p1, p2) = m.projection(&Lc::single(key.clone(), 1));
        assert!(p1.is_zero());
        assert_eq!(p2.get(&key), 1);
    }

    #[test]
    fn cone_on_st_element_has_no_quotient_part() {
        let m = Maps::new(3);
        let s = Structure::plain(4, vec![(0, 1, 0), (0, 2, 0), (0, 3, 0), (1, 2, 0), (1, 3, 0), (2, 3, 0)]);
        let (key, _) = m.dgc.class_of(&s).unwrap();
        let x = ConeElement { gamma: Lc::single(key, 1), ..Default::default() };
        let y = m.cone_differential(&x);
        assert!(y.g1.is_zero() && y.g2.is_zero());
        assert_eq!(y.gamma, m.dgc.d(&x.gamma));
    }

    #[test]
    fn orientation_sum_of_theta() {
        let gc = Flavor::new(Base::UndirectedFull, 3);
        let dgc = Flavor::new(Base::DirectedFull, 3);
        let s = Structure::plain(2, vec![(0, 1, 0), (0, 1, 0), (0, 1, 0)]);
        let (key, _) = gc.class_of(&s).unwrap();
        let lc = orient_sum(&gc, &dgc, &key);
        assert!(!lc.is_zero());
    }
}

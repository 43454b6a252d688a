//! Exact sparse linear algebra over the rationals and over GF(p).

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Error;

pub type Q = BigRational;

pub const DEFAULT_PRIME: u64 = 32003;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Rational,
    Prime(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    entries: BTreeMap<(usize, usize), Q>,
    pub row_basis: Vec<String>,
    pub col_basis: Vec<String>,
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

impl SparseMatrix {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix { n_rows, n_cols, entries: BTreeMap::new(), row_basis: Vec::new(), col_basis: Vec::new() }
    }

    pub fn with_bases(row_basis: Vec<String>, col_basis: Vec<String>) -> Self {
        let mut m = SparseMatrix::new(row_basis.len(), col_basis.len());
        m.row_basis = row_basis;
        m.col_basis = col_basis;
        m
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nc = rows.first().map_or(0, |r| r.len());
        let mut m = SparseMatrix::new(rows.len(), nc);
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, q(x));
            }
        }
        m
    }

    /// Sets an entry; zero removes it.
    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        assert!(r < self.n_rows && c < self.n_cols, "entry out of range");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: Q) {
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Q)> {
        self.entries.iter()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = SparseMatrix::new(self.n_cols, self.n_rows);
        for (&(r, c), v) in &self.entries {
            t.entries.insert((c, r), v.clone());
        }
        t.row_basis = self.col_basis.clone();
        t.col_basis = self.row_basis.clone();
        t
    }

    pub fn column(&self, c: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.n_rows];
        for (&(r, cc), x) in &self.entries {
            if cc == c {
                v[r] = x.clone();
            }
        }
        v
    }

    pub fn mul_vec(&self, x: &[Q]) -> Vec<Q> {
        let mut y = vec![Q::zero(); self.n_rows];
        for (&(r, c), v) in &self.entries {
            y[r] += v * &x[c];
        }
        y
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        let mut d = vec![vec![Q::zero(); self.n_cols]; self.n_rows];
        for (&(r, c), v) in &self.entries {
            d[r][c] = v.clone();
        }
        d
    }

    /// Rows as integer vectors (denominators cleared row by row).
    fn integer_rows(&self) -> Vec<Vec<(usize, BigInt)>> {
        let mut rows: Vec<Vec<(usize, Q)>> = vec![Vec::new(); self.n_rows];
        for (&(r, c), v) in &self.entries {
            rows[r].push((c, v.clone()));
        }
        rows.into_iter()
            .map(|row| {
                let l = row.iter().fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
                row.into_iter().map(|(c, v)| (c, (v * Q::from_integer(l.clone())).to_integer())).collect()
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct RankReport {
    pub rank: usize,
    /// False over GF(p): the value is then a lower bound for the rational rank.
    pub exact: bool,
}

pub fn rank(m: &SparseMatrix) -> usize {
    rank_in(m, Field::Rational).expect("rational rank cannot fail").rank
}

pub fn rank_in(m: &SparseMatrix, field: Field) -> Result<RankReport, Error> {
    match field {
        Field::Rational => Ok(RankReport { rank: rank_integer(m.integer_rows(), m.n_cols), exact: true }),
        Field::Prime(p) => Ok(RankReport { rank: rank_mod_p(m, p)?, exact: false }),
    }
}

fn primitive(row: &mut [(usize, BigInt)]) {
    let g = row.iter().fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v /= &g;
        }
    }
}

/// Fraction-free elimination on integer rows with Markowitz pivoting; rows
/// are kept primitive to bound growth.
fn rank_integer(mut rows: Vec<Vec<(usize, BigInt)>>, n_cols: usize) -> usize {
    rows.retain(|r| !r.is_empty());
    let mut rank = 0;
    loop {
        if rows.is_empty() {
            return rank;
        }
        let mut col_count = vec![0usize; n_cols];
        for r in &rows {
            for (c, _) in r {
                col_count[*c] += 1;
            }
        }
        // Markowitz: minimize (row nnz - 1) * (col nnz - 1), prefer small pivots
        let mut best: Option<(usize, usize, usize, usize)> = None; // cost, row, idx, bits
        for (ri, r) in rows.iter().enumerate() {
            for (idx, (c, v)) in r.iter().enumerate() {
                let cost = (r.len() - 1) * (col_count[*c] - 1);
                let bits = v.bits() as usize;
                let cand = (cost, ri, idx, bits);
                best = match best {
                    None => Some(cand),
                    Some(b) if (cost, bits) < (b.0, b.3) => Some(cand),
                    Some(b) => Some(b),
                };
            }
            if best.is_some_and(|b| b.0 == 0 && b.3 <= 1) {
                break;
            }
        }
        let (_, pr, pidx, _) = best.unwrap();
        let pivot_row = rows.swap_remove(pr);
        let (pc, pv) = pivot_row[pidx].clone();
        rank += 1;
        for r in rows.iter_mut() {
            let Some(pos) = r.iter().position(|(c, _)| *c == pc) else { continue };
            let a = r[pos].1.clone();
            let g = a.gcd(&pv);
            let (mul_r, mul_p) = (&pv / &g, &a / &g);
            let mut merged: HashMap<usize, BigInt> = HashMap::with_capacity(r.len() + pivot_row.len());
            for (c, v) in r.iter() {
                merged.insert(*c, v * &mul_r);
            }
            for (c, v) in &pivot_row {
                let e = merged.entry(*c).or_insert_with(BigInt::zero);
                *e -= v * &mul_p;
            }
            let mut nr: Vec<(usize, BigInt)> = merged.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            nr.sort_by_key(|x| x.0);
            primitive(&mut nr);
            *r = nr;
        }
        rows.retain(|r| !r.is_empty());
    }
}

fn mod_p(x: &Q, p: u64) -> Result<u64, Error> {
    let pb = BigInt::from(p);
    let n = x.numer().mod_floor(&pb).to_u64().unwrap();
    let d = x.denom().mod_floor(&pb).to_u64().unwrap();
    if d == 0 {
        return Err(Error::Invalid(format!("denominator divisible by {p}")));
    }
    Ok(n * inv_mod(d, p) % p)
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn rank_mod_p(m: &SparseMatrix, p: u64) -> Result<usize, Error> {
    let mut rows: Vec<BTreeMap<usize, u64>> = vec![BTreeMap::new(); m.n_rows];
    for (&(r, c), v) in &m.entries {
        let x = mod_p(v, p)?;
        if x != 0 {
            rows[r].insert(c, x);
        }
    }
    rows.retain(|r| !r.is_empty());
    let mut rank = 0;
    while !rows.is_empty() {
        let pr = (0..rows.len()).min_by_key(|&i| rows[i].len()).unwrap();
        let prow = rows.swap_remove(pr);
        let (&pc, &pv) = prow.iter().next().unwrap();
        let pinv = inv_mod(pv, p);
        rank += 1;
        for r in rows.iter_mut() {
            let Some(&a) = r.get(&pc) else { continue };
            let f = (a as u128 * pinv as u128 % p as u128) as u64;
            for (&c, &v) in &prow {
                let sub = (f as u128 * v as u128 % p as u128) as u64;
                let e = r.entry(c).or_insert(0);
                *e = (*e + p - sub) % p;
                if *e == 0 {
                    r.remove(&c);
                }
            }
        }
        rows.retain(|r| !r.is_empty());
    }
    Ok(rank)
}

#[derive(Clone, Debug)]
pub struct Membership {
    pub member: bool,
    /// Coefficients `c` with `M c = v` when `member`.
    pub certificate: Option<Vec<Q>>,
}

/// Is `v` in the column span of `m`? Gauss-Jordan over the rationals; the
/// certificate is checked exactly, and a negative answer is confirmed by the
/// rank jump of the augmented matrix.
pub fn in_column_span(m: &SparseMatrix, v: &[Q]) -> Result<Membership, Error> {
    if v.len() != m.n_rows {
        return Err(Error::Dimension(format!("vector has {} entries, matrix has {} rows", v.len(), m.n_rows)));
    }
    let rhs = m.n_cols;
    let mut rows: Vec<BTreeMap<usize, Q>> = vec![BTreeMap::new(); m.n_rows];
    for (&(r, c), x) in &m.entries {
        rows[r].insert(c, x.clone());
    }
    for (r, x) in v.iter().enumerate() {
        if !x.is_zero() {
            rows[r].insert(rhs, x.clone());
        }
    }
    let mut pivots: Vec<(usize, BTreeMap<usize, Q>)> = Vec::new();
    let mut pending: Vec<BTreeMap<usize, Q>> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    let mut inconsistent = false;
    while let Some(pi) = (0..pending.len())
        .filter(|&i| pending[i].keys().next().is_some_and(|&c| c < rhs))
        .min_by_key(|&i| pending[i].len())
    {
        let mut prow = pending.swap_remove(pi);
        let pc = *prow.keys().next().unwrap();
        let inv = prow[&pc].recip();
        for x in prow.values_mut() {
            *x *= &inv;
        }
        let eliminate = |r: &mut BTreeMap<usize, Q>| {
            if let Some(a) = r.get(&pc).cloned() {
                for (c, x) in &prow {
                    let e = r.entry(*c).or_insert_with(Q::zero);
                    *e -= &a * x;
                    if e.is_zero() {
                        r.remove(c);
                    }
                }
            }
        };
        pending.iter_mut().for_each(eliminate);
        for (_, r) in pivots.iter_mut() {
            eliminate(r);
        }
        pending.retain(|r| !r.is_empty());
        pivots.push((pc, prow));
    }
    for r in &pending {
        if r.keys().all(|&c| c == rhs) && !r.is_empty() {
            inconsistent = true;
        }
    }
    if inconsistent {
        let mut aug = m.clone();
        aug.n_cols += 1;
        for (r, x) in v.iter().enumerate() {
            aug.set(r, rhs, x.clone());
        }
        assert_eq!(rank(&aug), rank(m) + 1, "non-membership must raise the rank");
        return Ok(Membership { member: false, certificate: None });
    }
    let mut c = vec![Q::zero(); m.n_cols];
    for (pc, row) in &pivots {
        c[*pc] = row.get(&rhs).cloned().unwrap_or_else(Q::zero);
    }
    assert!(m.mul_vec(&c).iter().zip(v).all(|(a, b)| a == b), "certificate must solve the system");
    Ok(Membership { member: true, certificate: Some(c) })
}

fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn parse_q(s: &str) -> Option<Q> {
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
        Some((a, b)) => {
            let (a, b) = (a.parse::<BigInt>().ok()?, b.parse::<BigInt>().ok()?);
            (!b.is_zero()).then(|| Q::new(a, b))
        }
    }
}

/// SMS text: `<rows> <cols> M`, one `r c value` line per entry (1-based,
/// row-major), terminated by `0 0 0`.
pub fn export_sms(m: &SparseMatrix) -> String {
    let mut out = format!("{} {} M\n", m.n_rows, m.n_cols);
    for (&(r, c), v) in &m.entries {
        writeln!(out, "{} {} {}", r + 1, c + 1, fmt_q(v)).unwrap();
    }
    out.push_str("0 0 0\n");
    out
}

pub fn import_sms(text: &str) -> Result<SparseMatrix, Error> {
    let bad = |m: &str| Error::Parse(format!("sms: {m}"));
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty input"))?.split_whitespace().collect();
    if header.len() != 3 || header[2] != "M" {
        return Err(bad("bad header"));
    }
    let n_rows: usize = header[0].parse().map_err(|_| bad("bad row count"))?;
    let n_cols: usize = header[1].parse().map_err(|_| bad("bad column count"))?;
    let mut m = SparseMatrix::new(n_rows, n_cols);
    let mut terminated = false;
    for line in lines {
        if terminated {
            return Err(bad("data after terminator"));
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 3 {
            return Err(bad("bad triplet"));
        }
        if t == ["0", "0", "0"] {
            terminated = true;
            continue;
        }
        let r: usize = t[0].parse().map_err(|_| bad("bad row"))?;
        let c: usize = t[1].parse().map_err(|_| bad("bad column"))?;
        let v = parse_q(t[2]).ok_or_else(|| bad("bad value"))?;
        if r == 0 || c == 0 || r > n_rows || c > n_cols {
            return Err(bad("index out of range"));
        }
        if m.entries.contains_key(&(r - 1, c - 1)) {
            return Err(bad("duplicate entry"));
        }
        m.set(r - 1, c - 1, v);
    }
    if !terminated {
        return Err(bad("missing terminator"));
    }
    Ok(m)
}

/// Largest absolute numerator, for reporting entry growth.
pub fn max_abs_entry(m: &SparseMatrix) -> Q {
    m.entries.values().map(|v| v.abs()).max().unwrap_or_else(Q::zero)
}

//! Finite linear combinations of graph classes with integer coefficients.
//!
//! Every differential and chain map in this crate has integer structure
//! constants, so coefficients are `i64` with overflow checks; rational
//! arithmetic happens in [`crate::exactla`].

use std::collections::BTreeMap;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lc {
    terms: BTreeMap<String, i64>,
}

impl Lc {
    pub fn new() -> Self {
        Lc::default()
    }

    pub fn single(key: impl Into<String>, c: i64) -> Self {
        let mut lc = Lc::new();
        lc.add(key, c);
        lc
    }

    pub fn add(&mut self, key: impl Into<String>, c: i64) {
        if c == 0 {
            return;
        }
        let key = key.into();
        let entry = self.terms.entry(key.clone()).or_insert(0);
        *entry = entry.checked_add(c).expect("coefficient overflow");
        if *entry == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn add_lc(&mut self, other: &Lc, scale: i64) {
        for (k, &c) in &other.terms {
            self.add(k.clone(), c.checked_mul(scale).expect("coefficient overflow"));
        }
    }

    pub fn scaled(&self, s: i64) -> Lc {
        let mut out = Lc::new();
        out.add_lc(self, s);
        out
    }

    pub fn get(&self, key: &str) -> i64 {
        self.terms.get(key).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, i64)> {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    pub fn keys(&self) -> impl Iterator<Item = &String> {
        self.terms.keys()
    }

    pub fn filter(&self, mut keep: impl FnMut(&str) -> bool) -> Lc {
        Lc { terms: self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, &c)| (k.clone(), c)).collect() }
    }

    /// JSON object `{key: "num/1"}`.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> =
            self.terms.iter().map(|(k, c)| (k.clone(), serde_json::Value::String(format!("{c}/1")))).collect();
        serde_json::Value::Object(map)
    }
}

impl serde::Serialize for Lc {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = ser.serialize_map(Some(self.terms.len()))?;
        for (k, c) in &self.terms {
            m.serialize_entry(k, &format!("{c}/1"))?;
        }
        m.end()
    }
}

impl FromIterator<(String, i64)> for Lc {
    fn from_iter<I: IntoIterator<Item = (String, i64)>>(iter: I) -> Self {
        let mut lc = Lc::new();
        for (k, c) in iter {
            lc.add(k, c);
        }
        lc
    }
}

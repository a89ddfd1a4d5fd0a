use serde::{Deserialize, Serialize};

use super::EdgeId;
use crate::error::{Error, Result};

/// One of the two passage-time values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Value {
    A,
    B,
}

impl Value {
    pub fn flipped(self) -> Self {
        match self {
            Value::A => Value::B,
            Value::B => Value::A,
        }
    }

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Value::B
        } else {
            Value::A
        }
    }
}

/// An assignment of `a` or `b` to every edge, as a bitset (set bit = `b`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Environment {
    words: Vec<u64>,
    len: usize,
}

impl Environment {
    pub fn uniform(len: usize, value: Value) -> Self {
        let fill = if value == Value::B { u64::MAX } else { 0 };
        let mut env = Self { words: vec![fill; len.div_ceil(64)], len };
        env.trim();
        env
    }

    /// Low `len` bits of `mask` become edges `0..len`.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64, "from_mask supports at most 64 edges");
        let mut env = Self { words: vec![mask; len.div_ceil(64)], len };
        env.trim();
        env
    }

    /// Inverse of [`Environment::from_mask`].
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    fn trim(&mut self) {
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn is_b(&self, e: EdgeId) -> bool {
        let i = e.index();
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn value(&self, e: EdgeId) -> Value {
        Value::from_bit(self.is_b(e))
    }

    #[inline]
    pub fn set(&mut self, e: EdgeId, v: Value) {
        let i = e.index();
        assert!(i < self.len, "edge {i} out of range");
        let bit = 1u64 << (i % 64);
        match v {
            Value::A => self.words[i / 64] &= !bit,
            Value::B => self.words[i / 64] |= bit,
        }
    }

    pub fn flip(&mut self, e: EdgeId) {
        let v = self.value(e).flipped();
        self.set(e, v);
    }

    pub fn count_b(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Edges carrying `b`, in increasing order.
    pub fn b_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.len as u32).map(EdgeId).filter(|&e| self.is_b(e))
    }

    /// Copy with `e` pinned to `v`.
    pub fn with(&self, e: EdgeId, v: Value) -> Self {
        let mut out = self.clone();
        out.set(e, v);
        out
    }
}

/// A sorted, duplicate-free set of edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct EdgeSubset(Vec<EdgeId>);

impl EdgeSubset {
    /// Sorts the input; rejects repeated edges.
    pub fn new(mut edges: Vec<EdgeId>) -> Result<Self> {
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].index()));
        }
        Ok(Self(edges))
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.0
    }

    /// Order `k = |S|`.
    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    pub fn without(&self, e: EdgeId) -> Self {
        Self(self.0.iter().copied().filter(|&x| x != e).collect())
    }

    pub fn max(&self) -> Option<EdgeId> {
        self.0.last().copied()
    }

    pub fn min(&self) -> Option<EdgeId> {
        self.0.first().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.0.iter().copied()
    }
}

impl<'de> Deserialize<'de> for EdgeSubset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<EdgeId>::deserialize(d)?;
        EdgeSubset::new(v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitset_basics() {
        let mut env = Environment::uniform(70, Value::A);
        assert_eq!(env.count_b(), 0);
        env.set(EdgeId(65), Value::B);
        env.set(EdgeId(3), Value::B);
        assert!(env.is_b(EdgeId(65)));
        assert_eq!(env.b_edges().collect::<Vec<_>>(), vec![EdgeId(3), EdgeId(65)]);
        env.flip(EdgeId(3));
        assert_eq!(env.count_b(), 1);
        assert_eq!(Environment::uniform(70, Value::B).count_b(), 70);
    }

    #[test]
    fn masks() {
        let env = Environment::from_mask(5, 0b1111_0110);
        assert_eq!(env.to_mask(), Some(0b10110));
        assert_eq!(env, Environment::from_mask(5, 0b10110));
    }

    #[test]
    fn subsets_are_sorted_and_unique() {
        let s = EdgeSubset::new(vec![EdgeId(4), EdgeId(1), EdgeId(2)]).unwrap();
        assert_eq!(s.edges(), &[EdgeId(1), EdgeId(2), EdgeId(4)]);
        assert!(matches!(EdgeSubset::new(vec![EdgeId(1), EdgeId(1)]), Err(Error::DuplicateEdge(1))));
        assert_eq!(s.without(EdgeId(2)).edges(), &[EdgeId(1), EdgeId(4)]);
    }
}

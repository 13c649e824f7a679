//! Binary relations on `{0, .., n-1}`, stored as bit-packed rows.
//!
//! Bit `j` of row `i` is set iff `(i, j)` belongs to the relation; this is the
//! 0/1 indicator matrix whose boolean products realize composition. Padding
//! bits past column `n - 1` are always zero.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernel::AffinityMatrix;

const WORD: usize = u64::BITS as usize;

/// Rows at or above this size are composed in parallel.
const PARALLEL_MIN_N: usize = 256;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryRelation {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

/// Which inequality selects a level set of a kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inequality {
    /// `K > t`
    Strict,
    /// `K >= t`
    NonStrict,
}

impl Inequality {
    #[inline]
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Inequality::Strict => value > threshold,
            Inequality::NonStrict => value >= threshold,
        }
    }
}

impl BinaryRelation {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(WORD);
        Self {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            r.fill_row(i);
        }
        r
    }

    /// The diagonal `{(i, i)}`.
    pub fn diagonal(n: usize) -> Self {
        Self::from_fn(n, |i, j| i == j)
    }

    /// `{(i, j) : |i - j| <= half_width}`.
    pub fn band(n: usize, half_width: usize) -> Self {
        Self::from_fn(n, |i, j| i.abs_diff(j) <= half_width)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                if f(i, j) {
                    r.set(i, j);
                }
            }
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut r = Self::empty(n);
        for (i, j) in pairs {
            if i >= n || j >= n {
                return Err(Error::Domain(format!("pair ({i}, {j}) out of range for n = {n}")));
            }
            r.set(i, j);
        }
        Ok(r)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n && j < self.n, "({i}, {j}) out of range for n = {}", self.n);
        self.bits[i * self.words + j / WORD] >> (j % WORD) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / WORD] |= 1 << (j % WORD);
    }

    fn fill_row(&mut self, i: usize) {
        let row = &mut self.bits[i * self.words..(i + 1) * self.words];
        row.fill(u64::MAX);
        let tail = self.n % WORD;
        if tail != 0 {
            row[self.words - 1] = (1u64 << tail) - 1;
        }
    }

    #[inline]
    fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Column indices present in row `i`, ascending.
    pub fn row_members(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(i)
            .iter()
            .enumerate()
            .flat_map(|(w, &word)| BitIter(word).map(move |b| w * WORD + b))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.row_members(i).map(move |j| (i, j)))
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// True iff every pair is present.
    pub fn is_full(&self) -> bool {
        self.count() == self.n * self.n
    }

    pub fn contains_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.contains(i, i))
    }

    /// `U^{-1} = {(j, i) : (i, j) in U}`.
    pub fn inverse(&self) -> Self {
        let mut r = Self::empty(self.n);
        for (i, j) in self.pairs() {
            r.set(j, i);
        }
        r
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.inverse()
    }

    pub fn is_subset_of(&self, other: &BinaryRelation) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// `{(i, j) : exists k, (i, k) in self and (k, j) in other}`, the support
    /// of the boolean matrix product `A_self * A_other`.
    pub fn compose(&self, other: &BinaryRelation) -> Result<BinaryRelation> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut out = Self::empty(self.n);
        let words = self.words;
        if words == 0 {
            return Ok(out);
        }
        let compose_row = |i: usize, dst: &mut [u64]| {
            for k in self.row_members(i) {
                for (d, s) in dst.iter_mut().zip(other.row_words(k)) {
                    *d |= s;
                }
            }
        };
        if self.n >= PARALLEL_MIN_N {
            out.bits
                .par_chunks_mut(words)
                .enumerate()
                .for_each(|(i, dst)| compose_row(i, dst));
        } else {
            out.bits
                .chunks_mut(words)
                .enumerate()
                .for_each(|(i, dst)| compose_row(i, dst));
        }
        Ok(out)
    }

    /// `U o U o U`.
    pub fn power3(&self) -> BinaryRelation {
        let sq = self.compose(self).expect("same dimension");
        sq.compose(self).expect("same dimension")
    }

    /// `U^(m)`, the `m`-fold composition. `m` must be at least 1.
    pub fn power(&self, m: usize) -> Result<BinaryRelation> {
        if m == 0 {
            return Err(Error::InvalidParameter("relation power must be at least 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..m {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    /// Smallest `m <= max_m` with `U^(m)` full, or `None`.
    pub fn covering_index(&self, max_m: usize) -> Option<usize> {
        let mut current = self.clone();
        for m in 1..=max_m {
            if current.is_full() {
                return Some(m);
            }
            let next = current.compose(self).expect("same dimension");
            if next == current {
                // Stationary and not full: no larger power can cover.
                return None;
            }
            current = next;
        }
        None
    }

    /// Rows as `'0'`/`'1'` strings, column 0 first.
    pub fn to_bit_strings(&self) -> Vec<String> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| if self.contains(i, j) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    pub fn from_bit_strings(rows: &[impl AsRef<str>]) -> Result<Self> {
        let n = rows.len();
        let mut r = Self::empty(n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::Shape(format!(
                    "relation row {i} has {} bits, expected {n}",
                    row.len()
                )));
            }
            for (j, c) in row.chars().enumerate() {
                match c {
                    '1' => r.set(i, j),
                    '0' => {}
                    other => {
                        return Err(Error::Parse(format!("invalid bit `{other}` in row {i}")))
                    }
                }
            }
        }
        Ok(r)
    }
}

/// `{(i, j) : K[i][j] > t}` or `{(i, j) : K[i][j] >= t}`.
pub fn level_set(kernel: &AffinityMatrix, threshold: f64, inequality: Inequality) -> BinaryRelation {
    BinaryRelation::from_fn(kernel.n(), |i, j| inequality.holds(kernel.get(i, j), threshold))
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

impl fmt::Debug for BinaryRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryRelation(n = {})", self.n)?;
        for row in self.to_bit_strings() {
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RelationJson {
    n: usize,
    rows: Vec<String>,
}

impl Serialize for BinaryRelation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RelationJson {
            n: self.n,
            rows: self.to_bit_strings(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BinaryRelation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RelationJson::deserialize(deserializer)?;
        let r = BinaryRelation::from_bit_strings(&raw.rows).map_err(serde::de::Error::custom)?;
        if r.n != raw.n {
            return Err(serde::de::Error::custom(format!(
                "declared n = {} but {} rows given",
                raw.n, r.n
            )));
        }
        Ok(r)
    }
}

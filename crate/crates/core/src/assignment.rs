//! Qubit index sets, bit assignments and the MSB-first basis indexing.
//!
//! Qubits are numbered `1..=n`. Qubit 1 is the most significant bit of a
//! basis index, so for `n = 3` the assignment `(1, 0, 1)` is index 5.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::{MenError, Result};

/// Bit position (as a mask) of qubit `i` within an `n`-qubit basis index.
#[inline]
pub fn qubit_bit(i: usize, n: usize) -> usize {
    debug_assert!(i >= 1 && i <= n);
    1usize << (n - i)
}

/// Sorted set of distinct qubit indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QubitSet(Vec<usize>);

impl QubitSet {
    pub fn new<I: IntoIterator<Item = usize>>(qubits: I) -> Self {
        let mut v: Vec<usize> = qubits.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        QubitSet(v)
    }

    pub fn empty() -> Self {
        QubitSet(Vec::new())
    }

    pub fn full(n: usize) -> Self {
        QubitSet((1..=n).collect())
    }

    /// Set of qubits whose bits are set in `mask` (MSB-first convention).
    pub fn from_mask(mask: usize, n: usize) -> Self {
        QubitSet((1..=n).filter(|&i| mask & qubit_bit(i, n) != 0).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.0.binary_search(&q).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn complement(&self, n: usize) -> Self {
        QubitSet((1..=n).filter(|q| !self.contains(*q)).collect())
    }

    pub fn union(&self, other: &QubitSet) -> Self {
        QubitSet::new(self.iter().chain(other.iter()))
    }

    pub fn is_disjoint(&self, other: &QubitSet) -> bool {
        !self.iter().any(|q| other.contains(q))
    }

    pub fn mask(&self, n: usize) -> usize {
        self.iter().fold(0, |m, q| m | qubit_bit(q, n))
    }

    pub fn check_range(&self, n: usize) -> Result<()> {
        match self.iter().find(|&q| q == 0 || q > n) {
            Some(q) => Err(MenError::InvalidPartition(format!(
                "qubit {q} is outside 1..={n}"
            ))),
            None => Ok(()),
        }
    }

    /// Full-index offsets for every local configuration of this set.
    ///
    /// Entry `k` is the basis-index contribution of the assignment whose bits,
    /// read MSB-first over the ascending qubits of the set, spell `k`.
    pub fn offsets(&self, n: usize) -> Vec<usize> {
        let bits: Vec<usize> = self.iter().map(|q| qubit_bit(q, n)).collect();
        let k = bits.len();
        (0..1usize << k)
            .map(|local| {
                bits.iter()
                    .enumerate()
                    .filter(|(pos, _)| local & (1 << (k - 1 - pos)) != 0)
                    .fold(0, |acc, (_, b)| acc | b)
            })
            .collect()
    }
}

impl fmt::Display for QubitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, q) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, "}}")
    }
}

impl From<&[usize]> for QubitSet {
    fn from(v: &[usize]) -> Self {
        QubitSet::new(v.iter().copied())
    }
}

impl<const K: usize> From<[usize; K]> for QubitSet {
    fn from(v: [usize; K]) -> Self {
        QubitSet::new(v)
    }
}

/// Partial or full map from qubit index to bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Assignment {
    bindings: BTreeMap<usize, u8>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Full assignment from bits listed for qubits `1..=bits.len()`.
    pub fn from_bits(bits: &[u8]) -> Self {
        Assignment {
            bindings: bits
                .iter()
                .enumerate()
                .map(|(k, &b)| (k + 1, b & 1))
                .collect(),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_bits(&vec![0; n])
    }

    /// Build from `(qubit, bit)` pairs, rejecting duplicates and non-bits.
    pub fn from_pairs<I: IntoIterator<Item = (usize, u8)>>(pairs: I) -> Result<Self> {
        let mut bindings = BTreeMap::new();
        for (q, b) in pairs {
            if b > 1 {
                return Err(MenError::InvalidQuery(format!(
                    "qubit {q} bound to {b}, expected 0 or 1"
                )));
            }
            if q == 0 {
                return Err(MenError::InvalidQuery("qubit indices start at 1".into()));
            }
            if bindings.insert(q, b).is_some() {
                return Err(MenError::InvalidQuery(format!("qubit {q} bound twice")));
            }
        }
        Ok(Assignment { bindings })
    }

    pub fn get(&self, q: usize) -> Option<u8> {
        self.bindings.get(&q).copied()
    }

    pub fn set(&mut self, q: usize, bit: u8) {
        self.bindings.insert(q, bit & 1);
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u8)> + '_ {
        self.bindings.iter().map(|(&q, &b)| (q, b))
    }

    pub fn domain(&self) -> QubitSet {
        QubitSet(self.bindings.keys().copied().collect())
    }

    pub fn check_range(&self, n: usize) -> Result<()> {
        match self.bindings.keys().find(|&&q| q == 0 || q > n) {
            Some(q) => Err(MenError::InvalidQuery(format!(
                "qubit {q} is outside 1..={n}"
            ))),
            None => Ok(()),
        }
    }

    /// Bits for qubits `1..=n`; fails on the first unbound qubit.
    pub fn full_bits(&self, n: usize) -> Result<Vec<u8>> {
        self.check_range(n)?;
        (1..=n)
            .map(|q| self.get(q).ok_or(MenError::MissingBinding { qubit: q }))
            .collect()
    }

    /// Union of two assignments with disjoint domains.
    pub fn merged(&self, other: &Assignment) -> Result<Assignment> {
        let mut out = self.clone();
        for (q, b) in other.iter() {
            if out.bindings.insert(q, b).is_some() {
                return Err(MenError::InvalidQuery(format!(
                    "qubit {q} appears in both assignments"
                )));
            }
        }
        Ok(out)
    }

    /// Restriction of the assignment to `set`.
    pub fn restricted(&self, set: &QubitSet) -> Assignment {
        Assignment {
            bindings: self
                .bindings
                .iter()
                .filter(|(q, _)| set.contains(**q))
                .map(|(&q, &b)| (q, b))
                .collect(),
        }
    }

    /// `(mask, value)` pair selecting the basis indices consistent with this
    /// assignment: `index & mask == value`.
    pub fn index_pattern(&self, n: usize) -> (usize, usize) {
        self.iter().fold((0, 0), |(m, v), (q, b)| {
            let bit = qubit_bit(q, n);
            (m | bit, if b == 1 { v | bit } else { v })
        })
    }

    /// Bit string over qubits `1..=n`, with `-` for unbound qubits.
    pub fn to_bit_string(&self, n: usize) -> String {
        (1..=n)
            .map(|q| match self.get(q) {
                Some(0) => '0',
                Some(_) => '1',
                None => '-',
            })
            .collect()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (q, b)) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{q}={b}")?;
        }
        Ok(())
    }
}

/// Parses the `index=bit` comma-separated grammar, e.g. `"1=0,3=1"`.
/// Whitespace around tokens is ignored; duplicates are rejected.
impl FromStr for Assignment {
    type Err = MenError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Assignment::new());
        }
        let pairs = s
            .split(',')
            .map(|tok| {
                let (q, b) = tok.split_once('=').ok_or_else(|| {
                    MenError::InvalidQuery(format!("expected index=bit, got {tok:?}"))
                })?;
                let q: usize = q.trim().parse().map_err(|_| {
                    MenError::InvalidQuery(format!("bad qubit index in {tok:?}"))
                })?;
                let b: u8 = match b.trim() {
                    "0" => 0,
                    "1" => 1,
                    _ => {
                        return Err(MenError::InvalidQuery(format!(
                            "bad bit value in {tok:?}"
                        )))
                    }
                };
                Ok((q, b))
            })
            .collect::<Result<Vec<_>>>()?;
        Assignment::from_pairs(pairs)
    }
}

/// Basis index of a full assignment: `sum_i x_i * 2^(n - i)`.
pub fn index_of(x: &Assignment, n: usize) -> Result<usize> {
    let bits = x.full_bits(n)?;
    Ok(index_of_bits(&bits))
}

pub fn index_of_bits(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | (b as usize & 1))
}

/// Inverse of [`index_of`].
pub fn assignment_of(index: usize, n: usize) -> Assignment {
    Assignment::from_bits(&bits_of(index, n))
}

pub fn bits_of(index: usize, n: usize) -> Vec<u8> {
    (1..=n)
        .map(|q| ((index >> (n - q)) & 1) as u8)
        .collect()
}

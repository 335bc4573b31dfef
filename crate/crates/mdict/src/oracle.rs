//! Brute-force reference implementation of the mergeable dictionary ADT.
//!
//! Sets are plain sorted key vectors and every operation is a linear scan,
//! so the behaviour is obviously correct. The differential tests replay the
//! same operation stream here and on the real structures and compare.
//!
//! Also exposes exact evaluators for gaps, node weights, segment
//! decompositions and both potential functions.

use alloc::vec::Vec;
use core::fmt;

use crate::Key;

/// Stable identifier of one set in the collection. Ids are slab slots and
/// survive unrelated mutations; consumed sets leave dangling ids behind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleError {
    KeyOutOfRange(Key),
    InvalidSetId(SetId),
    NotAMember { set: SetId, key: Key },
    GapIndexOutOfRange { set: SetId, index: usize },
    SameSet(SetId),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::KeyOutOfRange(k) => write!(f, "key {k} outside universe"),
            OracleError::InvalidSetId(id) => write!(f, "set id {} is not live", id.0),
            OracleError::NotAMember { set, key } => {
                write!(f, "key {key} is not a member of set {}", set.0)
            }
            OracleError::GapIndexOutOfRange { set, index } => {
                write!(f, "gap index {index} out of range for set {}", set.0)
            }
            OracleError::SameSet(id) => {
                write!(f, "operation needs two distinct sets, got {} twice", id.0)
            }
        }
    }
}

impl core::error::Error for OracleError {}

/// Which input set a segment was carved from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegTag {
    A,
    B,
}

/// One maximal run of `A ∪ B` drawn from a single source set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSegment {
    pub tag: SegTag,
    pub min: Key,
    pub max: Key,
    pub keys: Vec<Key>,
}

/// A partition of `1..=n` into disjoint sorted sets.
#[derive(Debug, Clone)]
pub struct OracleCollection {
    n: Key,
    sets: Vec<Option<Vec<Key>>>,
    /// Slab slot holding each key, kept in step by `insert_set`.
    owner: Vec<usize>,
    free: Vec<usize>,
}

impl OracleCollection {
    /// Collection of `n` singletons, one per universe key.
    pub fn new(n: Key) -> Self {
        assert!(n >= 1, "universe must be nonempty");
        OracleCollection {
            n,
            sets: (1..=n).map(|k| Some(alloc::vec![k])).collect(),
            owner: (0..n as usize).collect(),
            free: Vec::new(),
        }
    }

    pub fn universe_size(&self) -> Key {
        self.n
    }

    fn set(&self, id: SetId) -> Result<&Vec<Key>, OracleError> {
        self.sets
            .get(id.0)
            .and_then(|s| s.as_ref())
            .ok_or(OracleError::InvalidSetId(id))
    }

    fn check_key(&self, x: Key) -> Result<(), OracleError> {
        if x >= 1 && x <= self.n {
            Ok(())
        } else {
            Err(OracleError::KeyOutOfRange(x))
        }
    }

    /// Live set ids in ascending slab order.
    pub fn live_sets(&self) -> Vec<SetId> {
        self.sets
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_ref().map(|_| SetId(i)))
            .collect()
    }

    pub fn keys_of(&self, id: SetId) -> Result<&[Key], OracleError> {
        self.set(id).map(|v| v.as_slice())
    }

    /// Sorted list of sorted sets; canonical snapshot for comparisons.
    pub fn snapshot(&self) -> Vec<Vec<Key>> {
        let mut out: Vec<Vec<Key>> = self
            .sets
            .iter()
            .filter_map(|s| s.as_ref().cloned())
            .collect();
        out.sort_by_key(|s| s[0]);
        out
    }

    /// Set containing `x`.
    pub fn find(&self, x: Key) -> Result<SetId, OracleError> {
        self.check_key(x)?;
        let id = SetId(self.owner[(x - 1) as usize]);
        debug_assert!(self.set(id).is_ok_and(|s| s.binary_search(&x).is_ok()));
        Ok(id)
    }

    /// Largest member of `s` that is at most `x`.
    pub fn search(&self, s: SetId, x: Key) -> Result<Option<Key>, OracleError> {
        let keys = self.set(s)?;
        Ok(keys.iter().copied().take_while(|&k| k <= x).last())
    }

    /// Splits `s` at `x`; empty sides are reported as `None`.
    pub fn split(
        &mut self,
        s: SetId,
        x: Key,
    ) -> Result<(Option<SetId>, Option<SetId>), OracleError> {
        let keys = self.set(s)?.clone();
        let cut = keys.partition_point(|&k| k <= x);
        let (lo, hi) = keys.split_at(cut);
        if lo.is_empty() {
            return Ok((None, Some(s)));
        }
        if hi.is_empty() {
            return Ok((Some(s), None));
        }
        self.sets[s.0] = None;
        self.free.push(s.0);
        let a = self.insert_set(lo.to_vec());
        let b = self.insert_set(hi.to_vec());
        Ok((Some(a), Some(b)))
    }

    /// Merges two distinct sets into one.
    pub fn union(&mut self, a: SetId, b: SetId) -> Result<SetId, OracleError> {
        if a == b {
            return Err(OracleError::SameSet(a));
        }
        let left = self.set(a)?.clone();
        let right = self.set(b)?.clone();
        self.sets[a.0] = None;
        self.sets[b.0] = None;
        self.free.push(a.0);
        self.free.push(b.0);
        let mut merged = Vec::with_capacity(left.len() + right.len());
        let (mut i, mut j) = (0, 0);
        while i < left.len() && j < right.len() {
            if left[i] < right[j] {
                merged.push(left[i]);
                i += 1;
            } else {
                merged.push(right[j]);
                j += 1;
            }
        }
        merged.extend_from_slice(&left[i..]);
        merged.extend_from_slice(&right[j..]);
        Ok(self.insert_set(merged))
    }

    fn insert_set(&mut self, keys: Vec<Key>) -> SetId {
        debug_assert!(!keys.is_empty());
        let slot = match self.free.pop() {
            Some(i) => i,
            None => {
                self.sets.push(None);
                self.sets.len() - 1
            }
        };
        for &k in &keys {
            self.owner[(k - 1) as usize] = slot;
        }
        self.sets[slot] = Some(keys);
        SetId(slot)
    }

    /// Size of the `k`-th gap of `s`. Boundary gaps (`k = 0` and `k = |s|`)
    /// have size 1 by convention.
    pub fn gap(&self, s: SetId, k: usize) -> Result<Key, OracleError> {
        let keys = self.set(s)?;
        if k > keys.len() {
            return Err(OracleError::GapIndexOutOfRange { set: s, index: k });
        }
        if k == 0 || k == keys.len() {
            return Ok(1);
        }
        // positions in the universe are the keys themselves
        Ok(keys[k] - keys[k - 1])
    }

    /// Sum of the two gaps adjacent to `x` in its set.
    pub fn weight(&self, s: SetId, x: Key) -> Result<Key, OracleError> {
        let keys = self.set(s)?;
        let pos = keys
            .binary_search(&x)
            .map_err(|_| OracleError::NotAMember { set: s, key: x })?;
        Ok(self.gap(s, pos)? + self.gap(s, pos + 1)?)
    }

    /// Alternating maximal runs of `A ∪ B`, tagged by source set.
    pub fn segments(&self, a: SetId, b: SetId) -> Result<Vec<OracleSegment>, OracleError> {
        if a == b {
            return Err(OracleError::SameSet(a));
        }
        let left = self.set(a)?;
        let right = self.set(b)?;
        let mut out: Vec<OracleSegment> = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < left.len() || j < right.len() {
            let take_a = match (left.get(i), right.get(j)) {
                (Some(&x), Some(&y)) => x < y,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => unreachable!(),
            };
            let (tag, key) = if take_a {
                i += 1;
                (SegTag::A, left[i - 1])
            } else {
                j += 1;
                (SegTag::B, right[j - 1])
            };
            match out.last_mut() {
                Some(seg) if seg.tag == tag => {
                    seg.max = key;
                    seg.keys.push(key);
                }
                _ => out.push(OracleSegment {
                    tag,
                    min: key,
                    max: key,
                    keys: alloc::vec![key],
                }),
            }
        }
        Ok(out)
    }

    /// Gap potential without the `log n` factor: for every node, the sum of
    /// the base-2 logs of its two adjacent gaps (constant fixed to 1).
    pub fn potential_new(&self) -> f64 {
        let mut phi = 0.0;
        for s in self.sets.iter().flatten() {
            for w in s.windows(2) {
                // each interior gap is adjacent to exactly two nodes
                phi += 2.0 * libm::log2((w[1] - w[0]) as f64);
            }
        }
        phi
    }

    /// Classical potential: sum of interior log-gaps, scaled by `log n`
    /// (constant fixed to 1).
    pub fn potential_old(&self) -> f64 {
        let mut inner = 0.0;
        for s in self.sets.iter().flatten() {
            for w in s.windows(2) {
                inner += libm::log2((w[1] - w[0]) as f64);
            }
        }
        inner * libm::log2(self.n as f64)
    }

    /// Panics if the live sets do not partition `1..=n` or are unsorted.
    pub fn check_partition(&self) {
        let mut seen = alloc::vec![false; self.n as usize + 1];
        for s in self.sets.iter().flatten() {
            assert!(!s.is_empty(), "empty set stored");
            for w in s.windows(2) {
                assert!(w[0] < w[1], "set not strictly increasing");
            }
            for &k in s {
                assert!(k >= 1 && k <= self.n, "key out of universe");
                assert!(!seen[k as usize], "key {k} appears twice");
                seen[k as usize] = true;
            }
        }
        assert!(
            seen[1..].iter().all(|&b| b),
            "some universe key is missing from the partition"
        );
    }
}

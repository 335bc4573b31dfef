//! The classical segment-merging design: the same ADT, but sets live in an
//! unweighted balanced list (the biased skip list with every weight pinned
//! to 2, which degenerates to a deterministic balanced skip list) and
//! union discovers each segment with a full top-down search instead of a
//! finger walk. Every segment therefore costs Θ(log n), giving the
//! T·log n union shape this module exists to exhibit next to the real
//! dictionary.

use alloc::vec::Vec;
use core::fmt;

use crate::bsl::{Arena, BslError, ListId, NodeId};
use crate::dict::UnionStats;
use crate::metrics::Metrics;
use crate::Key;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineError {
    EmptyUniverse,
    KeyOutOfRange(Key),
    SameSet,
    Bsl(BslError),
}

impl fmt::Display for BaselineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaselineError::EmptyUniverse => write!(f, "universe size must be at least 1"),
            BaselineError::KeyOutOfRange(k) => write!(f, "key {k} outside the universe"),
            BaselineError::SameSet => write!(f, "union needs two distinct sets"),
            BaselineError::Bsl(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for BaselineError {}

impl From<BslError> for BaselineError {
    fn from(e: BslError) -> Self {
        BaselineError::Bsl(e)
    }
}

/// Handle to one set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BaselineHandle(ListId);

/// Partition of `1..=n` with O(log n) search/split/join per segment and no
/// weighting scheme.
#[derive(Debug)]
pub struct BaselineCollection {
    n: Key,
    arena: Arena,
    last_union: Option<UnionStats>,
}

impl BaselineCollection {
    pub fn new(n: Key) -> Result<Self, BaselineError> {
        if n == 0 {
            return Err(BaselineError::EmptyUniverse);
        }
        let mut arena = Arena::new();
        for k in 1..=n {
            arena.singleton(k, 2).map_err(BaselineError::from)?;
        }
        Ok(BaselineCollection {
            n,
            arena,
            last_union: None,
        })
    }

    pub fn universe_size(&self) -> Key {
        self.n
    }

    fn node_of(&self, x: Key) -> Result<NodeId, BaselineError> {
        if x >= 1 && x <= self.n {
            // nodes are allocated in key order at construction
            Ok(NodeId((x - 1) as u32))
        } else {
            Err(BaselineError::KeyOutOfRange(x))
        }
    }

    /// Set containing `x` and its maximum key.
    pub fn find(&mut self, x: Key) -> Result<(BaselineHandle, Key), BaselineError> {
        let node = self.node_of(x)?;
        let max = self
            .arena
            .fsearch(node, Key::MAX)
            .map_err(BaselineError::from)?
            .expect("finger precedes +infinity");
        let list = self
            .arena
            .list_of_tail(max)
            .expect("list maximum is registered as a tail");
        Ok((BaselineHandle(list), self.arena.key(max)))
    }

    /// Largest member of the set at most `x`.
    pub fn search(&mut self, s: BaselineHandle, x: Key) -> Result<Option<Key>, BaselineError> {
        let found = self.arena.search(s.0, x).map_err(BaselineError::from)?;
        Ok(found.map(|n| self.arena.key(n)))
    }

    /// Splits at `x`; empty sides are absent. No reweighting happens here.
    pub fn split(
        &mut self,
        s: BaselineHandle,
        x: Key,
    ) -> Result<(Option<BaselineHandle>, Option<BaselineHandle>), BaselineError> {
        let (a, b) = self.arena.split(s.0, x).map_err(BaselineError::from)?;
        Ok((a.map(BaselineHandle), b.map(BaselineHandle)))
    }

    /// Union by the segment-merging heuristic: locate each segment with a
    /// fresh search from the top, split it out by key, then concatenate the
    /// pieces in order.
    pub fn union(
        &mut self,
        a: BaselineHandle,
        b: BaselineHandle,
    ) -> Result<BaselineHandle, BaselineError> {
        self.arena.check_list(a.0).map_err(BaselineError::from)?;
        self.arena.check_list(b.0).map_err(BaselineError::from)?;
        if a.0 == b.0 {
            return Err(BaselineError::SameSet);
        }
        let (a, b) = {
            let ka = self
                .arena
                .key(self.arena.head(a.0).map_err(BaselineError::from)?);
            let kb = self
                .arena
                .key(self.arena.head(b.0).map_err(BaselineError::from)?);
            if ka < kb {
                (a, b)
            } else {
                (b, a)
            }
        };

        // segment discovery, one full predecessor search per boundary
        let mut bounds: Vec<(Key, Key)> = Vec::new(); // (min, max) per segment, alternating
        let mut a_count = 0u32;
        let mut b_count = 0u32;
        let mut a_min = self.arena.head(a.0).map_err(BaselineError::from)?;
        let mut b_min = self.arena.head(b.0).map_err(BaselineError::from)?;
        loop {
            let a_max = self
                .arena
                .search(a.0, self.arena.key(b_min))
                .map_err(BaselineError::from)?
                .expect("segment minimum precedes the probe");
            bounds.push((self.arena.key(a_min), self.arena.key(a_max)));
            a_count += 1;
            let next_a = match self.arena.successor(a_max) {
                None => {
                    let b_tail = self.arena.tail(b.0).map_err(BaselineError::from)?;
                    bounds.push((self.arena.key(b_min), self.arena.key(b_tail)));
                    b_count += 1;
                    break;
                }
                Some(n) => n,
            };
            let b_max = self
                .arena
                .search(b.0, self.arena.key(next_a))
                .map_err(BaselineError::from)?
                .expect("segment minimum precedes the probe");
            bounds.push((self.arena.key(b_min), self.arena.key(b_max)));
            b_count += 1;
            match self.arena.successor(b_max) {
                None => {
                    let a_tail = self.arena.tail(a.0).map_err(BaselineError::from)?;
                    bounds.push((self.arena.key(next_a), self.arena.key(a_tail)));
                    a_count += 1;
                    break;
                }
                Some(n) => {
                    a_min = next_a;
                    b_min = n;
                }
            }
        }
        self.last_union = Some(UnionStats {
            segments: a_count + b_count,
            a_segments: a_count,
            b_segments: b_count,
        });

        // extraction: split each set at its segment maxima, by key
        let mut pieces: Vec<(Key, ListId)> = Vec::new();
        let mut split_out =
            |arena: &mut Arena, list: ListId, maxima: &[Key]| -> Result<(), BaselineError> {
                let mut rest = list;
                for &m in &maxima[..maxima.len() - 1] {
                    let (piece, rem) = arena.split(rest, m).map_err(BaselineError::from)?;
                    pieces.push((m, piece.expect("segment nonempty")));
                    rest = rem.expect("further segments follow");
                }
                let tail_key = arena.key(arena.tail(rest)?);
                pieces.push((tail_key, rest));
                Ok(())
            };
        let a_maxima: Vec<Key> = bounds.iter().step_by(2).map(|&(_, m)| m).collect();
        let b_maxima: Vec<Key> = bounds.iter().skip(1).step_by(2).map(|&(_, m)| m).collect();
        split_out(&mut self.arena, a.0, &a_maxima)?;
        split_out(&mut self.arena, b.0, &b_maxima)?;

        // concatenation in key order
        pieces.sort_by_key(|&(m, _)| m);
        let mut acc = pieces[0].1;
        for &(_, piece) in &pieces[1..] {
            let l = self.arena.tail(acc).map_err(BaselineError::from)?;
            let r = self.arena.head(piece).map_err(BaselineError::from)?;
            acc = self.arena.fjoin(l, r).map_err(BaselineError::from)?;
        }
        Ok(BaselineHandle(acc))
    }

    pub fn last_union_stats(&self) -> Option<UnionStats> {
        self.last_union
    }

    pub fn metrics(&self) -> Metrics {
        self.arena.metrics()
    }

    pub fn set_keys(&self, s: BaselineHandle) -> Result<Vec<Key>, BaselineError> {
        Ok(self
            .arena
            .contents(s.0)
            .map_err(BaselineError::from)?
            .into_iter()
            .map(|(k, _)| k)
            .collect())
    }

    /// Canonical snapshot of the partition.
    pub fn snapshot(&self) -> Vec<Vec<Key>> {
        let mut lists = self.arena.live_lists();
        lists.sort_by_key(|&l| self.arena.key(self.arena.head(l).expect("live")));
        lists
            .into_iter()
            .map(|l| {
                self.arena
                    .contents(l)
                    .expect("live")
                    .into_iter()
                    .map(|(k, _)| k)
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(n: Key, sets: &[&[Key]]) -> (BaselineCollection, Vec<BaselineHandle>) {
        let mut c = BaselineCollection::new(n).unwrap();
        let mut out = Vec::new();
        for &set in sets {
            let (mut h, _) = c.find(set[0]).unwrap();
            for &k in &set[1..] {
                let (other, _) = c.find(k).unwrap();
                h = c.union(h, other).unwrap();
            }
            out.push(h);
        }
        (c, out)
    }

    #[test]
    fn basic_ops_match_contracts() {
        let (mut c, ids) = build(9, &[&[2, 5, 9]]);
        assert_eq!(c.search(ids[0], 7).unwrap(), Some(5));
        let (a, b) = c.split(ids[0], 5).unwrap();
        assert_eq!(c.set_keys(a.unwrap()).unwrap(), [2, 5]);
        assert_eq!(c.set_keys(b.unwrap()).unwrap(), [9]);
    }

    #[test]
    fn interleaved_union_matches_merge() {
        let (mut c, ids) = build(8, &[&[1, 4, 5, 8], &[2, 3, 6, 7]]);
        let u = c.union(ids[0], ids[1]).unwrap();
        assert_eq!(c.set_keys(u).unwrap(), (1..=8).collect::<Vec<_>>());
        let stats = c.last_union_stats().unwrap();
        assert_eq!(
            (stats.segments, stats.a_segments, stats.b_segments),
            (5, 3, 2)
        );
    }

    #[test]
    fn perfect_interleave_counts_segments() {
        let odds: Vec<Key> = (1..=8).step_by(2).collect();
        let evens: Vec<Key> = (2..=8).step_by(2).collect();
        let (mut c, ids) = build(8, &[&odds, &evens]);
        let u = c.union(ids[0], ids[1]).unwrap();
        assert_eq!(c.set_keys(u).unwrap(), (1..=8).collect::<Vec<_>>());
        assert_eq!(c.last_union_stats().unwrap().segments, 8);
    }
}

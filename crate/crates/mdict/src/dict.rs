//! The mergeable dictionary: a partition of `1..=n` into disjoint ordered
//! sets with predecessor search, split, and union of arbitrarily
//! interleaved sets.
//!
//! Each set is a biased skip list whose node weights are the sums of the
//! two adjacent universe gaps (boundary gaps count 1). Union runs in four
//! phases: finger-search the segment boundaries, finger-split the segments
//! out, reweight the segment endpoints to their post-merge gaps, and
//! finger-join everything back in key order. The gap weighting is what
//! lets a union with many segments pay O(1) per segment.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::bsl::{Arena, BslError, ListId, NodeId};
use crate::metrics::Metrics;
use crate::oracle::SegTag;
use crate::Key;

/// Handle to one set of the partition. Splits and unions consume their
/// input handles; stale handles are detected, never followed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SetHandle(pub(crate) ListId);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictError {
    EmptyUniverse,
    KeyOutOfRange(Key),
    SameSet,
    Bsl(BslError),
}

impl fmt::Display for DictError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DictError::EmptyUniverse => write!(f, "universe size must be at least 1"),
            DictError::KeyOutOfRange(k) => write!(f, "key {k} outside the universe"),
            DictError::SameSet => write!(f, "union needs two distinct sets"),
            DictError::Bsl(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for DictError {}

impl From<BslError> for DictError {
    fn from(e: BslError) -> Self {
        DictError::Bsl(e)
    }
}

/// Segment of a prospective union, in public key terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub tag: SegTag,
    pub min: Key,
    pub max: Key,
}

/// Phase I outcome of the most recent union.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnionStats {
    /// Total segments T.
    pub segments: u32,
    /// Segments taken from the set with the smaller minimum (z = ⌈T/2⌉).
    pub a_segments: u32,
    /// Segments from the other set (v = ⌊T/2⌋).
    pub b_segments: u32,
}

/// One segment endpoint pair discovered during Phase I.
#[derive(Clone, Copy)]
struct Seg {
    min: NodeId,
    max: NodeId,
}

/// The mergeable dictionary over universe `1..=n`.
#[derive(Debug)]
pub struct Collection {
    n: Key,
    arena: Arena,
    /// Multiset of interior gaps of size ≥ 2 across all live sets; the gap
    /// potential is evaluated from this census so it is exactly zero
    /// whenever no such gap exists.
    gap_census: BTreeMap<u64, u64>,
    last_union: Option<UnionStats>,
    paranoid: bool,
}

impl Collection {
    /// The collection of `n` singleton sets; every node starts with weight
    /// 2 (two boundary gaps), rank 1 and height 1.
    pub fn new(n: Key) -> Result<Self, DictError> {
        if n == 0 {
            return Err(DictError::EmptyUniverse);
        }
        let mut arena = Arena::new();
        for k in 1..=n {
            arena.singleton(k, 2).map_err(DictError::from)?;
        }
        Ok(Collection {
            n,
            arena,
            gap_census: BTreeMap::new(),
            last_union: None,
            paranoid: false,
        })
    }

    pub fn universe_size(&self) -> Key {
        self.n
    }

    /// Enables exhaustive self-checking (full audit, weight and partition
    /// verification) after every mutating operation. Test use only; turns
    /// every operation O(n).
    pub fn set_paranoid(&mut self, on: bool) {
        self.paranoid = on;
    }

    fn node_of(&self, x: Key) -> Result<NodeId, DictError> {
        if x >= 1 && x <= self.n {
            // nodes are allocated in key order at construction
            Ok(NodeId((x - 1) as u32))
        } else {
            Err(DictError::KeyOutOfRange(x))
        }
    }

    /// The set containing `x` and its maximum key. Resolved by finger
    /// searching toward +infinity from `x`'s own node, then reading the
    /// tail registry; no structural change.
    pub fn find(&mut self, x: Key) -> Result<(SetHandle, Key), DictError> {
        let node = self.node_of(x)?;
        let max = self
            .arena
            .fsearch(node, Key::MAX)
            .map_err(DictError::from)?
            .expect("finger precedes +infinity");
        let list = self
            .arena
            .list_of_tail(max)
            .expect("list maximum is registered as a tail");
        Ok((SetHandle(list), self.arena.key(max)))
    }

    /// Largest member of the set that is at most `x`.
    pub fn search(&mut self, s: SetHandle, x: Key) -> Result<Option<Key>, DictError> {
        let found = self.arena.search(s.0, x).map_err(DictError::from)?;
        Ok(found.map(|n| self.arena.key(n)))
    }

    /// Instrumented finger search: predecessor of `x` in the set containing
    /// `from`, walking from `from`'s node.
    pub fn finger_search(&mut self, from: Key, x: Key) -> Result<Option<Key>, DictError> {
        let node = self.node_of(from)?;
        let found = self.arena.fsearch(node, x).map_err(DictError::from)?;
        Ok(found.map(|n| self.arena.key(n)))
    }

    /// Splits the set into `{y ≤ x}` and `{y > x}`. An empty side is
    /// reported as `None` and leaves the set untouched under its original
    /// handle; otherwise both handles are fresh and the endpoints flanking
    /// the cut are reweighted for their new boundary gaps.
    pub fn split(
        &mut self,
        s: SetHandle,
        x: Key,
    ) -> Result<(Option<SetHandle>, Option<SetHandle>), DictError> {
        let pred = self.arena.search(s.0, x).map_err(DictError::from)?;
        let result = match pred {
            None => (None, Some(s)),
            Some(p) => match self.arena.successor(p) {
                None => (Some(s), None),
                Some(next) => {
                    let severed = self.arena.key(next) - self.arena.key(p);
                    let (a, b) = self.arena.fsplit(s.0, p).map_err(DictError::from)?;
                    let b = b.expect("successor exists, right side nonempty");
                    self.census_remove(severed);
                    // the cut turns both outward gaps into boundary gaps
                    let wa = self.gap_before(p) + 1;
                    self.arena.frew(p, wa).map_err(DictError::from)?;
                    let wb = 1 + self.gap_after(next);
                    self.arena.frew(next, wb).map_err(DictError::from)?;
                    (Some(SetHandle(a)), Some(SetHandle(b)))
                }
            },
        };
        if self.paranoid {
            self.validate().expect("post-split validation");
        }
        Ok(result)
    }

    /// Merges two distinct sets, however interleaved, destroying both
    /// inputs.
    pub fn union(&mut self, a: SetHandle, b: SetHandle) -> Result<SetHandle, DictError> {
        self.arena.check_list(a.0).map_err(DictError::from)?;
        self.arena.check_list(b.0).map_err(DictError::from)?;
        if a.0 == b.0 {
            return Err(DictError::SameSet);
        }
        // orient so the first segment comes from `a`
        let (a, b) = {
            let ka = self
                .arena
                .key(self.arena.head(a.0).map_err(DictError::from)?);
            let kb = self
                .arena
                .key(self.arena.head(b.0).map_err(DictError::from)?);
            if ka < kb {
                (a, b)
            } else {
                (b, a)
            }
        };

        // Phase I: locate every segment by alternating finger searches
        let (a_segs, b_segs) = self.find_segments(a.0, b.0)?;
        let z = a_segs.len();
        let v = b_segs.len();
        let t = z + v;
        let odd = t % 2 == 1;
        self.last_union = Some(UnionStats {
            segments: t as u32,
            a_segments: z as u32,
            b_segments: v as u32,
        });

        // the inter-segment gaps of both inputs close; the seam gaps open
        for i in 0..z - 1 {
            self.census_remove(self.arena.key(a_segs[i + 1].min) - self.arena.key(a_segs[i].max));
        }
        for j in 0..v.saturating_sub(1) {
            self.census_remove(self.arena.key(b_segs[j + 1].min) - self.arena.key(b_segs[j].max));
        }
        for i in 0..v {
            self.census_add(self.arena.key(b_segs[i].min) - self.arena.key(a_segs[i].max));
        }
        for i in 0..z - 1 {
            self.census_add(self.arena.key(a_segs[i + 1].min) - self.arena.key(b_segs[i].max));
        }

        // Phase II: finger-split the segments out, walking each remainder
        let mut rest = a.0;
        for seg in a_segs.iter().take(z - 1) {
            let (_, rem) = self.arena.fsplit(rest, seg.max).map_err(DictError::from)?;
            rest = rem.expect("interior segment split leaves a remainder");
        }
        let mut rest = b.0;
        for seg in b_segs.iter().take(v.saturating_sub(1)) {
            let (_, rem) = self.arena.fsplit(rest, seg.max).map_err(DictError::from)?;
            rest = rem.expect("interior segment split leaves a remainder");
        }

        // Phase III: reweight the segment endpoints whose adjacent gaps
        // change, in the fixed order minima-of-A, maxima-of-A, minima-of-B,
        // maxima-of-B. Formulas read the live weight, so a singleton
        // segment picks up both of its updates.
        let pos = |arena: &Arena, n: NodeId| arena.key(n) as i128;
        for i in 1..z {
            let m = a_segs[i].min;
            let w = self.arena.weight(m) as i128 + pos(&self.arena, a_segs[i - 1].max)
                - pos(&self.arena, b_segs[i - 1].max);
            self.reweight(m, w)?;
        }
        for i in 0..v {
            let m = a_segs[i].max;
            let w = if i == z - 1 {
                // T even: the merged set ends with this A segment's side
                self.arena.weight(m) as i128 - 1 + pos(&self.arena, b_segs[i].min)
                    - pos(&self.arena, m)
            } else {
                self.arena.weight(m) as i128 + pos(&self.arena, b_segs[i].min)
                    - pos(&self.arena, a_segs[i + 1].min)
            };
            self.reweight(m, w)?;
        }
        for j in 0..v {
            let m = b_segs[j].min;
            let w = if j == 0 {
                self.arena.weight(m) as i128 - 1 + pos(&self.arena, m)
                    - pos(&self.arena, a_segs[0].max)
            } else {
                self.arena.weight(m) as i128 + pos(&self.arena, b_segs[j - 1].max)
                    - pos(&self.arena, a_segs[j].max)
            };
            self.reweight(m, w)?;
        }
        for j in 0..z - 1 {
            let m = b_segs[j].max;
            let w = if odd && j == v - 1 {
                self.arena.weight(m) as i128 - 1 + pos(&self.arena, a_segs[z - 1].min)
                    - pos(&self.arena, m)
            } else {
                self.arena.weight(m) as i128 + pos(&self.arena, a_segs[j + 1].min)
                    - pos(&self.arena, b_segs[j + 1].min)
            };
            self.reweight(m, w)?;
        }

        // Phase IV: glue the segments back in key order
        let mut merged = None;
        for i in 0..v {
            merged = Some(
                self.arena
                    .fjoin(a_segs[i].max, b_segs[i].min)
                    .map_err(DictError::from)?,
            );
        }
        for i in 0..z - 1 {
            merged = Some(
                self.arena
                    .fjoin(b_segs[i].max, a_segs[i + 1].min)
                    .map_err(DictError::from)?,
            );
        }
        let merged = merged.expect("a union always performs at least one join");
        if self.paranoid {
            self.validate().expect("post-union validation");
        }
        Ok(SetHandle(merged))
    }

    /// Phase I alone, read-only: the segment decomposition two sets would
    /// merge under. Tags are relative to the arguments as given.
    pub fn segments(&mut self, a: SetHandle, b: SetHandle) -> Result<Vec<Segment>, DictError> {
        self.arena.check_list(a.0).map_err(DictError::from)?;
        self.arena.check_list(b.0).map_err(DictError::from)?;
        if a.0 == b.0 {
            return Err(DictError::SameSet);
        }
        let ka = self
            .arena
            .key(self.arena.head(a.0).map_err(DictError::from)?);
        let kb = self
            .arena
            .key(self.arena.head(b.0).map_err(DictError::from)?);
        let (first, second, first_tag, second_tag) = if ka < kb {
            (a, b, SegTag::A, SegTag::B)
        } else {
            (b, a, SegTag::B, SegTag::A)
        };
        let (a_segs, b_segs) = self.find_segments(first.0, second.0)?;
        let mut out = Vec::with_capacity(a_segs.len() + b_segs.len());
        for i in 0..a_segs.len() {
            out.push(Segment {
                tag: first_tag,
                min: self.arena.key(a_segs[i].min),
                max: self.arena.key(a_segs[i].max),
            });
            if i < b_segs.len() {
                out.push(Segment {
                    tag: second_tag,
                    min: self.arena.key(b_segs[i].min),
                    max: self.arena.key(b_segs[i].max),
                });
            }
        }
        Ok(out)
    }

    /// Gap potential of the whole collection: for every node the base-2
    /// logs of its two adjacent gaps, summed (leading constant 1). Exactly
    /// zero on the all-singleton and single-full-set states.
    pub fn potential(&self) -> f64 {
        let mut phi = 0.0;
        for (&gap, &count) in &self.gap_census {
            phi += 2.0 * count as f64 * libm::log2(gap as f64);
        }
        phi
    }

    /// Statistics of the most recent union's Phase I.
    pub fn last_union_stats(&self) -> Option<UnionStats> {
        self.last_union
    }

    pub fn metrics(&self) -> Metrics {
        self.arena.metrics()
    }

    /// Live set handles, ascending by minimum key.
    pub fn live_sets(&self) -> Vec<SetHandle> {
        let mut lists = self.arena.live_lists();
        lists.sort_by_key(|&l| self.arena.key(self.arena.head(l).expect("live")));
        lists.into_iter().map(SetHandle).collect()
    }

    /// Sorted keys of one set.
    pub fn set_keys(&self, s: SetHandle) -> Result<Vec<Key>, DictError> {
        Ok(self
            .arena
            .contents(s.0)
            .map_err(DictError::from)?
            .into_iter()
            .map(|(k, _)| k)
            .collect())
    }

    /// Sorted `(key, weight)` pairs of one set.
    pub fn set_key_weights(&self, s: SetHandle) -> Result<Vec<(Key, u64)>, DictError> {
        self.arena.contents(s.0).map_err(DictError::from)
    }

    /// Canonical snapshot of the whole partition for comparisons.
    pub fn snapshot(&self) -> Vec<Vec<Key>> {
        self.live_sets()
            .into_iter()
            .map(|s| self.set_keys(s).expect("live"))
            .collect()
    }

    /// Runs the full structural audit, the weight consistency check, the
    /// height bound and the partition check over every live set. `Ok` means
    /// no violation anywhere.
    pub fn validate(&self) -> Result<(), String> {
        use core::fmt::Write;
        let mut seen = alloc::vec![false; self.n as usize + 1];
        let mut census: BTreeMap<u64, u64> = BTreeMap::new();
        for s in self.live_sets() {
            let report = self.arena.audit(s.0);
            if !report.is_pass() {
                let mut msg = String::new();
                let _ = write!(msg, "{report}");
                return Err(msg);
            }
            let contents = self.set_key_weights(s).expect("live");
            let mut total = 0u64;
            for (i, &(k, w)) in contents.iter().enumerate() {
                if seen[k as usize] {
                    return Err(alloc::format!("key {k} appears in two sets"));
                }
                seen[k as usize] = true;
                let left = if i == 0 { 1 } else { k - contents[i - 1].0 };
                let right = if i + 1 == contents.len() {
                    1
                } else {
                    contents[i + 1].0 - k
                };
                if w != left + right {
                    return Err(alloc::format!(
                        "weight of {k} is {w}, expected {left}+{right}"
                    ));
                }
                total += w;
                if left >= 2 {
                    *census.entry(left).or_insert(0) += 1;
                }
            }
            if total > 2 * self.n {
                return Err(alloc::format!("set weight {total} exceeds 2n"));
            }
            let height = self.arena.list_height(s.0).expect("live");
            if (1u128 << height) > total as u128 {
                return Err(alloc::format!(
                    "height {height} exceeds log2 of set weight {total}"
                ));
            }
        }
        if let Some(k) = (1..=self.n).find(|&k| !seen[k as usize]) {
            return Err(alloc::format!("key {k} is missing from the partition"));
        }
        if census != self.gap_census {
            return Err(String::from("gap census out of sync with the structure"));
        }
        Ok(())
    }

    // ----- internals --------------------------------------------------------

    /// Phase I: walk both lists segment by segment. `a` must hold the
    /// smaller minimum. Read-only.
    fn find_segments(&mut self, a: ListId, b: ListId) -> Result<(Vec<Seg>, Vec<Seg>), DictError> {
        let mut a_segs: Vec<Seg> = Vec::new();
        let mut b_segs: Vec<Seg> = Vec::new();
        let mut a_min = self.arena.head(a).map_err(DictError::from)?;
        let mut b_min = self.arena.head(b).map_err(DictError::from)?;
        debug_assert!(self.arena.key(a_min) < self.arena.key(b_min));
        loop {
            let a_max = self
                .arena
                .fsearch(a_min, self.arena.key(b_min))
                .map_err(DictError::from)?
                .expect("segment minimum precedes the probe");
            a_segs.push(Seg {
                min: a_min,
                max: a_max,
            });
            let next_a = match self.arena.successor(a_max) {
                // the other set owns everything beyond: one final segment
                None => {
                    let b_tail = self.arena.tail(b).map_err(DictError::from)?;
                    b_segs.push(Seg {
                        min: b_min,
                        max: b_tail,
                    });
                    break;
                }
                Some(n) => n,
            };
            let b_max = self
                .arena
                .fsearch(b_min, self.arena.key(next_a))
                .map_err(DictError::from)?
                .expect("segment minimum precedes the probe");
            b_segs.push(Seg {
                min: b_min,
                max: b_max,
            });
            match self.arena.successor(b_max) {
                None => {
                    let a_tail = self.arena.tail(a).map_err(DictError::from)?;
                    a_segs.push(Seg {
                        min: next_a,
                        max: a_tail,
                    });
                    break;
                }
                Some(n) => {
                    a_min = next_a;
                    b_min = n;
                }
            }
        }
        Ok((a_segs, b_segs))
    }

    fn reweight(&mut self, node: NodeId, w: i128) -> Result<(), DictError> {
        debug_assert!(w >= 2, "gap arithmetic must never go below the floor");
        self.arena.frew(node, w as u64).map_err(DictError::from)
    }

    fn gap_before(&self, n: NodeId) -> u64 {
        match self.arena.predecessor(n) {
            Some(p) => self.arena.key(n) - self.arena.key(p),
            None => 1,
        }
    }

    fn gap_after(&self, n: NodeId) -> u64 {
        match self.arena.successor(n) {
            Some(s) => self.arena.key(s) - self.arena.key(n),
            None => 1,
        }
    }

    fn census_add(&mut self, gap: u64) {
        if gap >= 2 {
            *self.gap_census.entry(gap).or_insert(0) += 1;
        }
    }

    fn census_remove(&mut self, gap: u64) {
        if gap >= 2 {
            match self.gap_census.get_mut(&gap) {
                Some(c) if *c > 1 => *c -= 1,
                Some(_) => {
                    self.gap_census.remove(&gap);
                }
                None => debug_assert!(false, "removing a gap that was never added"),
            }
        }
    }

    /// Overwrites a stored weight without touching the structure, to
    /// exercise the weight-consistency detectors.
    #[doc(hidden)]
    pub fn debug_force_weight(&mut self, x: Key, w: u64) {
        let node = self.node_of(x).expect("key in range");
        self.arena.debug_force_weight(node, w);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keys(c: &Collection, s: SetHandle) -> Vec<Key> {
        c.set_keys(s).unwrap()
    }

    /// Builds the partition {sets} from singletons through public unions.
    fn build(n: Key, sets: &[&[Key]]) -> (Collection, Vec<SetHandle>) {
        let mut c = Collection::new(n).unwrap();
        c.set_paranoid(true);
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
    fn fresh_collection_is_all_singletons() {
        let mut c = Collection::new(8).unwrap();
        c.set_paranoid(true);
        assert_eq!(c.potential(), 0.0);
        for k in 1..=8 {
            let (_, max) = c.find(k).unwrap();
            assert_eq!(max, k);
        }
        assert_eq!(c.snapshot().len(), 8);
        c.validate().unwrap();
        assert!(Collection::new(0).is_err());

        let mut one = Collection::new(1).unwrap();
        let (h, max) = one.find(1).unwrap();
        assert_eq!(max, 1);
        assert_eq!(one.set_key_weights(h).unwrap(), [(1, 2)]);
    }

    #[test]
    fn find_returns_handle_and_max() {
        let (mut c, _) = build(8, &[&[1, 4, 5, 8]]);
        let (h, max) = c.find(4).unwrap();
        assert_eq!(max, 8);
        assert_eq!(keys(&c, h), [1, 4, 5, 8]);
        assert!(c.find(0).is_err());
        assert!(c.find(9).is_err());
    }

    #[test]
    fn search_is_predecessor_within_set() {
        let (mut c, ids) = build(8, &[&[1, 4, 5, 8]]);
        assert_eq!(c.search(ids[0], 6).unwrap(), Some(5));
        assert_eq!(c.search(ids[0], 0).unwrap(), None);
        assert_eq!(c.search(ids[0], 8).unwrap(), Some(8));
    }

    #[test]
    fn split_reweights_the_cut() {
        let (mut c, ids) = build(8, &[&[1, 4, 5, 8]]);
        let (a, b) = c.split(ids[0], 5).unwrap();
        let a = a.unwrap();
        let b = b.unwrap();
        assert_eq!(c.set_key_weights(a).unwrap(), [(1, 4), (4, 4), (5, 2)]);
        assert_eq!(c.set_key_weights(b).unwrap(), [(8, 2)]);
    }

    #[test]
    fn split_of_full_universe_keeps_unit_gaps() {
        let (mut c, ids) = build(8, &[&(1..=8).collect::<Vec<_>>()]);
        let phi_before = c.potential();
        let (a, b) = c.split(ids[0], 4).unwrap();
        assert_eq!(c.set_key_weights(a.unwrap()).unwrap()[3], (4, 2));
        assert_eq!(c.set_key_weights(b.unwrap()).unwrap()[0], (5, 2));
        assert!(c.potential() <= phi_before);
    }

    #[test]
    fn split_with_empty_side_leaves_set_alone() {
        let (mut c, ids) = build(8, &[&[2, 3, 6, 7]]);
        assert_eq!(c.split(ids[0], 1).unwrap(), (None, Some(ids[0])));
        assert_eq!(c.split(ids[0], 7).unwrap(), (Some(ids[0]), None));
        assert_eq!(c.split(ids[0], 8).unwrap(), (Some(ids[0]), None));
    }

    #[test]
    fn worked_union_example() {
        // A = {1,4,5,8}, B = {2,3,6,7}: five segments, parity odd, and the
        // merged set is the full universe with every weight 2
        let (mut c, ids) = build(8, &[&[1, 4, 5, 8], &[2, 3, 6, 7]]);
        let log3 = libm::log2(3.0);
        assert!((c.potential() - 6.0 * log3).abs() < 1e-9);

        let segs = c.segments(ids[0], ids[1]).unwrap();
        let shape: Vec<(SegTag, Key, Key)> = segs.iter().map(|s| (s.tag, s.min, s.max)).collect();
        assert_eq!(
            shape,
            [
                (SegTag::A, 1, 1),
                (SegTag::B, 2, 3),
                (SegTag::A, 4, 5),
                (SegTag::B, 6, 7),
                (SegTag::A, 8, 8),
            ]
        );

        let phi_before = c.potential();
        let u = c.union(ids[0], ids[1]).unwrap();
        let stats = c.last_union_stats().unwrap();
        assert_eq!(
            (stats.segments, stats.a_segments, stats.b_segments),
            (5, 3, 2)
        );
        let expect: Vec<(Key, u64)> = (1..=8).map(|k| (k, 2)).collect();
        assert_eq!(c.set_key_weights(u).unwrap(), expect);
        let delta = c.potential() - phi_before;
        assert!((delta + 6.0 * log3).abs() < 1e-9, "delta {delta}");
    }

    #[test]
    fn degenerate_union_of_adjacent_intervals() {
        let (mut c, ids) = build(4, &[&[1, 2], &[3, 4]]);
        let segs = c.segments(ids[0], ids[1]).unwrap();
        assert_eq!(segs.len(), 2);
        let u = c.union(ids[0], ids[1]).unwrap();
        let expect: Vec<(Key, u64)> = (1..=4).map(|k| (k, 2)).collect();
        assert_eq!(c.set_key_weights(u).unwrap(), expect);
        let stats = c.last_union_stats().unwrap();
        assert_eq!(stats.segments, 2);
    }

    #[test]
    fn union_argument_order_does_not_matter() {
        let (mut c, ids) = build(8, &[&[2, 3, 6, 7], &[1, 4, 5, 8]]);
        // pass the set with the larger minimum first
        let u = c.union(ids[0], ids[1]).unwrap();
        assert_eq!(keys(&c, u), (1..=8).collect::<Vec<_>>());
        assert!(c.union(u, u).is_err());
    }

    #[test]
    fn singleton_segments_get_both_updates() {
        // A = {1,4,8}, B = {2,3,6,7}: the middle A segment is the lone node
        // 4, whose left and right gaps both change; 5 stays a singleton so
        // the gaps around it stay open
        let (mut c, ids) = build(8, &[&[1, 4, 8], &[2, 3, 6, 7]]);
        let u = c.union(ids[0], ids[1]).unwrap();
        assert_eq!(
            c.set_key_weights(u).unwrap(),
            [(1, 2), (2, 2), (3, 2), (4, 3), (6, 3), (7, 2), (8, 2)]
        );
    }

    #[test]
    fn split_then_union_restores_weights() {
        let (mut c, ids) = build(9, &[&[1, 3, 6, 7, 9]]);
        let before = c.set_key_weights(ids[0]).unwrap();
        let (a, b) = c.split(ids[0], 6).unwrap();
        let u = c.union(a.unwrap(), b.unwrap()).unwrap();
        assert_eq!(c.set_key_weights(u).unwrap(), before);
    }

    #[test]
    fn potential_tracks_the_gap_census() {
        let (c, _) = build(8, &[&[1, 4, 5, 8], &[2, 3, 6, 7]]);
        // interior gaps {3,1,3} and {1,3,1}: census holds three 3s
        assert_eq!(c.gap_census.get(&3), Some(&3));
        assert_eq!(c.gap_census.get(&1), None);
    }

    #[test]
    fn weight_corruption_is_detected() {
        let (mut c, _) = build(8, &[&[1, 4, 5, 8]]);
        c.set_paranoid(false);
        c.debug_force_weight(4, 9);
        assert!(c.validate().is_err());
    }

    #[test]
    fn collection_is_transferable_between_threads() {
        fn assert_send<T: Send>() {}
        assert_send::<Collection>();
        assert_send::<crate::oracle::OracleCollection>();
        assert_send::<crate::baseline::BaselineCollection>();
    }

    #[test]
    fn stale_handles_fail_loudly() {
        let (mut c, ids) = build(8, &[&[1, 2, 3, 4]]);
        let (a, b) = c.split(ids[0], 2).unwrap();
        assert!(matches!(
            c.search(ids[0], 3),
            Err(DictError::Bsl(BslError::StaleHandle))
        ));
        let _ = (a, b);
    }
}

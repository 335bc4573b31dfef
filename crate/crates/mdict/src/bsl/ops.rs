//! The base and extended biased skip list operations.
//!
//! `search`/`fsearch` walk the canonical link structure; `fsplit`, `fjoin`
//! and `frew` mutate it and restore the invariants along the disturbed
//! covers and profiles. `split` and `rew` are search-then-finger
//! composites.

use alloc::vec::Vec;

use super::{Arena, BslError, ListId, NodeId, Side, MIN_WEIGHT};
use crate::metrics::Metrics;
use crate::Key;

impl Arena {
    // ----- searches ----------------------------------------------------------

    /// Predecessor of `x` in the list: the node of largest key ≤ `x`.
    /// Descends from the tail's tower.
    pub fn search(&mut self, list: ListId, x: Key) -> Result<Option<NodeId>, BslError> {
        self.check_list(list)?;
        let tail = self.tail(list)?.0;
        self.metrics.comparisons += 1;
        if self.node(tail).key <= x {
            return Ok(Some(NodeId(tail)));
        }
        Ok(self.search_leftward(tail, x).map(NodeId))
    }

    /// Predecessor of `x` within the finger's list, starting the walk at the
    /// finger. Cost scales with the weight mass between finger and target,
    /// not with list size. Passing `Key::MAX` lands on the list maximum.
    pub fn fsearch(&mut self, finger: NodeId, x: Key) -> Result<Option<NodeId>, BslError> {
        self.check_node(finger)?;
        let f = finger.0;
        self.metrics.comparisons += 1;
        Ok(if self.node(f).key <= x {
            Some(NodeId(self.pred_from(f, self.h(f), x)))
        } else {
            self.search_leftward(f, x).map(NodeId)
        })
    }

    /// Rightward predecessor walk from `u` (requires `key(u) ≤ x`). Link
    /// slots of the entry node above `entry_lev` are known to overshoot and
    /// are skipped; after each move the walk resumes from the new node's
    /// top, so it climbs and descends as needed.
    fn pred_from(&mut self, mut u: u32, entry_lev: usize, x: Key) -> u32 {
        debug_assert!(self.node(u).key <= x);
        let mut lev = entry_lev;
        loop {
            if let Some(t) = self.next_of(u, lev) {
                self.metrics.comparisons += 1;
                if self.node(t).key <= x {
                    u = t;
                    lev = self.h(u);
                    self.metrics.levels_touched += 1;
                    continue;
                }
            }
            if lev <= 1 {
                break;
            }
            lev -= 1;
            self.metrics.levels_touched += 1;
        }
        u
    }

    /// Leftward hunt for a node ≤ `x` (requires `key(from) > x`), then a
    /// rightward finish. `None` when the whole list lies beyond `x`.
    fn search_leftward(&mut self, from: u32, x: Key) -> Option<u32> {
        let mut u = from;
        let mut lev = self.h(u);
        loop {
            if let Some(p) = self.prev_of(u, lev) {
                self.metrics.comparisons += 1;
                if self.node(p).key > x {
                    u = p;
                    lev = self.h(u);
                    self.metrics.levels_touched += 1;
                    continue;
                }
                // pred(x) ∈ [p, u); links of p above `lev` overshoot u
                return Some(self.pred_from(p, lev, x));
            }
            if lev <= 1 {
                return None;
            }
            lev -= 1;
            self.metrics.levels_touched += 1;
        }
    }

    // ----- finger split -------------------------------------------------------

    /// Splits the list at the fingered node: left part keeps keys ≤ `f`,
    /// right part the rest. Both halves satisfy the invariants on return.
    /// When `f` is already the maximum, the list is returned untouched.
    ///
    /// The caller names the list because an interior node alone cannot
    /// reach its handle in O(1); `f` must be a member.
    pub fn fsplit(
        &mut self,
        list: ListId,
        f: NodeId,
    ) -> Result<(ListId, Option<ListId>), BslError> {
        self.check_list(list)?;
        self.check_node(f)?;
        let f = f.0;
        let slot = list.slot as usize;
        let (head, tail) = (self.lists[slot].head, self.lists[slot].tail);
        if self.node(head).key > self.node(f).key || self.node(f).key > self.node(tail).key {
            return Err(BslError::NotInList);
        }
        if f == tail {
            return Ok((list, None));
        }
        let fp = self.node(f).next0;
        debug_assert_ne!(fp, super::NIL);

        // Step 1: sever every link crossing the boundary, climbing the
        // boundary pair until one side runs out of taller nodes. The level
        // reached is min(H(A), H(B)).
        let mut u = f;
        let mut v = fp;
        let min_hh = loop {
            let hu = self.h(u);
            let hv = self.h(v);
            let lev = hu.min(hv);
            self.unlink(u, v, lev);
            let nu = if hu == lev {
                self.climb_above(u, Side::Left)
            } else {
                Some(u)
            };
            let nv = if hv == lev {
                self.climb_above(v, Side::Right)
            } else {
                Some(v)
            };
            match (nu, nv) {
                (Some(a), Some(b)) => {
                    u = a;
                    v = b;
                }
                _ => break lev,
            }
        };
        self.node_mut(f).next0 = super::NIL;
        self.node_mut(fp).prev0 = super::NIL;
        self.free_list(list);
        let a = self.alloc_list(head, f);
        let b = self.alloc_list(fp, tail);

        // Step 2: each side's new endpoint cover may now violate I2 against
        // the fresh wall; demote along the covers.
        self.restore_i2(Some(f), Side::Right, 0, min_hh);
        self.restore_i2(Some(fp), Side::Left, 0, min_hh);
        Ok((a, Some(b)))
    }

    // ----- finger join ----------------------------------------------------------

    /// Joins two lists given the maximum of the left one and the minimum of
    /// the right one. The inputs are destroyed.
    pub fn fjoin(&mut self, l: NodeId, r: NodeId) -> Result<ListId, BslError> {
        self.check_node(l)?;
        self.check_node(r)?;
        let (l, r) = (l.0, r.0);
        let la = self.node(l).tail_of;
        let lb = self.node(r).head_of;
        if la == super::NIL || lb == super::NIL {
            return Err(BslError::NotEndpoint);
        }
        if la == lb {
            return Err(BslError::SameList);
        }
        if self.node(l).key >= self.node(r).key {
            return Err(BslError::KeyOrder);
        }
        let a_rec = self.lists[la as usize];
        let b_rec = self.lists[lb as usize];
        debug_assert!(a_rec.alive && b_rec.alive);
        debug_assert!(a_rec.tail == l && b_rec.head == r);

        // Step 1: connect the seam, recording each crossing pair and its
        // link level (ascending).
        let mut pairs: Vec<(u32, u32, usize)> = Vec::new();
        let mut u = l;
        let mut v = r;
        let min_hh = loop {
            let hu = self.h(u);
            let hv = self.h(v);
            let lev = hu.min(hv);
            self.link(u, v, lev);
            pairs.push((u, v, lev));
            let nu = if hu == lev {
                self.climb_above(u, Side::Left)
            } else {
                Some(u)
            };
            let nv = if hv == lev {
                self.climb_above(v, Side::Right)
            } else {
                Some(v)
            };
            match (nu, nv) {
                (Some(a), Some(b)) => {
                    u = a;
                    v = b;
                }
                _ => break lev,
            }
        };
        self.node_mut(l).next0 = r;
        self.node_mut(r).prev0 = l;
        let a_id = ListId {
            slot: la,
            gen: a_rec.gen,
        };
        let b_id = ListId {
            slot: lb,
            gen: b_rec.gen,
        };
        self.free_list(a_id);
        self.free_list(b_id);
        let c = self.alloc_list(a_rec.head, b_rec.tail);

        // Step 2: runs from both sides merge at the seam on every level up
        // to min(H(A), H(B)); check each, then let median promotions
        // percolate until a clean level.
        let start = self.h(l).max(self.h(r));
        let mut median: Option<u32> = None;
        let mut pi = 0usize;
        let mut lev = start;
        while lev <= min_hh {
            while pairs[pi].2 < lev {
                pi += 1;
            }
            let focus = median.take().or_else(|| {
                let (pu, pv, _) = pairs[pi];
                if self.h(pu) == lev {
                    Some(pu)
                } else if self.h(pv) == lev {
                    Some(pv)
                } else {
                    None
                }
            });
            if let Some(fc) = focus {
                median = self.fix_plateau_once(fc, lev);
            }
            lev += 1;
        }
        while let Some(m) = median {
            let ml = self.h(m);
            median = self.fix_plateau_once(m, ml);
        }
        Ok(c)
    }

    // ----- finger reweight ----------------------------------------------------

    /// Changes the fingered node's weight, adjusting its tower and the
    /// surrounding structure only when the rank actually moves.
    pub fn frew(&mut self, f: NodeId, w: u64) -> Result<(), BslError> {
        self.check_node(f)?;
        if w < MIN_WEIGHT {
            return Err(BslError::WeightTooSmall(w));
        }
        let f = f.0;
        let old_rank = self.rk(f);
        self.node_mut(f).weight = w;
        let new_rank = super::rank_of_weight(w);
        if new_rank == old_rank {
            return Ok(());
        }
        let h_old = self.h(f);
        if new_rank > old_rank {
            if h_old >= new_rank {
                return Ok(());
            }
            // I0 broke: raise f to its new rank. Profile nodes taller than
            // the old height now see f as a nearer blocker and may lose I2;
            // the plateau at the new top may overflow.
            let left_start = self.climb_above(f, Side::Left);
            let right_start = self.climb_above(f, Side::Right);
            for _ in h_old..new_rank {
                self.promote_one(f);
            }
            self.restore_i2(left_start, Side::Right, h_old, new_rank);
            self.restore_i2(right_start, Side::Left, h_old, new_rank);
            self.fix_plateau_chain(f);
        } else {
            // Rank fell: drop f to the new rank. Profile nodes taller than
            // the old height may lose f as a witness.
            let left_start = self.climb_above(f, Side::Left);
            let right_start = self.climb_above(f, Side::Right);
            self.demote_to(f, new_rank);
            self.restore_i2(left_start, Side::Right, h_old, 0);
            self.restore_i2(right_start, Side::Left, h_old, 0);
        }
        Ok(())
    }

    // ----- composites -----------------------------------------------------------

    /// Split at a key: locate the predecessor from the top, then finger
    /// split there. Keys below the minimum leave the list whole on the
    /// right.
    pub fn split(
        &mut self,
        list: ListId,
        x: Key,
    ) -> Result<(Option<ListId>, Option<ListId>), BslError> {
        match self.search(list, x)? {
            None => Ok((None, Some(list))),
            Some(p) => {
                let (a, b) = self.fsplit(list, p)?;
                Ok((Some(a), b))
            }
        }
    }

    /// Reweight by key; the key must be present.
    pub fn rew(&mut self, list: ListId, x: Key, w: u64) -> Result<(), BslError> {
        match self.search(list, x)? {
            Some(p) if self.key(p) == x => self.frew(p, w),
            _ => Err(BslError::KeyNotFound(x)),
        }
    }

    /// Builds a list from ascending `(key, weight)` pairs by joining
    /// singletons left to right. Test and harness convenience.
    pub fn build_list(&mut self, items: &[(Key, u64)]) -> Result<ListId, BslError> {
        assert!(!items.is_empty(), "cannot build an empty list");
        assert!(
            items.windows(2).all(|w| w[0].0 < w[1].0),
            "keys must be strictly increasing"
        );
        let (mut list, _) = self.singleton(items[0].0, items[0].1)?;
        for &(k, w) in &items[1..] {
            let (_, node) = self.singleton(k, w)?;
            let tail = self.tail(list)?;
            list = self.fjoin(tail, node)?;
        }
        Ok(list)
    }

    /// Snapshot of the metrics counters.
    pub fn metrics(&self) -> Metrics {
        self.metrics
    }
}

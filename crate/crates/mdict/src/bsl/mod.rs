//! (2,6)-biased skip list with finger split, finger join and finger
//! reweight.
//!
//! Every node carries a user weight `w ≥ 2`, a rank `⌊log₂ w⌋` and a tower
//! of per-level link slots. Three invariants govern the shape:
//!
//! * **I0** — each node's height is at least its rank.
//! * **I1** — no more than 6 consecutive nodes of equal height (a plateau).
//! * **I2** — for each node `x` and each level `i` in `(rank(x), h(x)]`
//!   there are at least 2 nodes of height `i−1` between `x` and the nearest
//!   consecutive node of height ≥ `i` on either side; list ends count as
//!   infinitely tall walls.
//!
//! Two nodes are *consecutive* when everything strictly between them is
//! shorter than both. Each consecutive pair is linked at exactly one level,
//! `min(h(x), h(y))`; lower duplicate pointers between adjacent towers are
//! never materialized, which is what keeps finger splits near heavy nodes
//! cheap. Separate bottom-level neighbor pointers give O(1)
//! successor/predecessor.
//!
//! All nodes live in one [`Arena`]; lists are identified by generational
//! handles so operations on destroyed lists fail loudly instead of
//! corrupting neighbours.

pub mod audit;
mod ops;

use alloc::vec::Vec;
use core::fmt;

use crate::metrics::Metrics;
use crate::Key;

/// Minimum spacing parameter `a` of the (a,b)-biased skip list.
pub const BIAS_A: usize = 2;
/// Plateau cap `b`.
pub const PLATEAU_CAP: usize = 6;
/// Smallest legal node weight (two boundary gaps of size 1).
pub const MIN_WEIGHT: u64 = 2;

const NIL: u32 = u32::MAX;

/// Handle to one node. Nodes are never deallocated; a `NodeId` stays valid
/// for the lifetime of its arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Generational handle to one list. Splits and joins destroy their input
/// lists; using a stale handle is an error, not undefined behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ListId {
    slot: u32,
    gen: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BslError {
    InvalidNode,
    StaleHandle,
    WeightTooSmall(u64),
    NotEndpoint,
    SameList,
    KeyOrder,
    KeyNotFound(Key),
    NotInList,
}

impl fmt::Display for BslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BslError::InvalidNode => write!(f, "node id does not belong to this arena"),
            BslError::StaleHandle => write!(f, "list handle is stale or destroyed"),
            BslError::WeightTooSmall(w) => {
                write!(f, "weight {w} below the minimum of {MIN_WEIGHT}")
            }
            BslError::NotEndpoint => write!(f, "node is not the required list endpoint"),
            BslError::SameList => write!(f, "operation requires two distinct lists"),
            BslError::KeyOrder => write!(f, "left list must precede right list in keyspace"),
            BslError::KeyNotFound(k) => write!(f, "key {k} is not stored in the list"),
            BslError::NotInList => write!(f, "node lies outside the list's key range"),
        }
    }
}

impl core::error::Error for BslError {}

/// One tower level: predecessor and successor links, `NIL` when absent.
#[derive(Debug, Clone, Copy)]
struct Level {
    prev: u32,
    next: u32,
}

impl Level {
    fn empty() -> Self {
        Level {
            prev: NIL,
            next: NIL,
        }
    }
}

#[derive(Debug)]
struct NodeRec {
    key: Key,
    weight: u64,
    /// List-order neighbours (the "lowest" links), independent of towers.
    prev0: u32,
    next0: u32,
    /// Slot index of the list this node heads/tails, if any.
    head_of: u32,
    tail_of: u32,
    /// Link slots indexed by level; `tower.len() - 1` is the node height.
    /// Level 0 exists but is never linked since heights are at least 1.
    tower: Vec<Level>,
}

#[derive(Debug, Clone, Copy)]
struct ListRec {
    head: u32,
    tail: u32,
    gen: u32,
    alive: bool,
}

/// Owns every node and every list handle of one collection of biased skip
/// lists. Confined to one thread at a time; freely transferable.
#[derive(Debug)]
pub struct Arena {
    nodes: Vec<NodeRec>,
    lists: Vec<ListRec>,
    free_slots: Vec<u32>,
    pub metrics: Metrics,
}

/// Which side of a node a walk or witness count looks toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    Left,
    Right,
}

pub(crate) fn rank_of_weight(w: u64) -> usize {
    debug_assert!(w >= MIN_WEIGHT);
    w.ilog2() as usize
}

impl Default for Arena {
    fn default() -> Self {
        Self::new()
    }
}

impl Arena {
    pub fn new() -> Self {
        Arena {
            nodes: Vec::new(),
            lists: Vec::new(),
            free_slots: Vec::new(),
            metrics: Metrics::new(),
        }
    }

    /// Creates a fresh single-node list. The node's height is exactly its
    /// rank, the only legal height for a singleton.
    pub fn singleton(&mut self, key: Key, weight: u64) -> Result<(ListId, NodeId), BslError> {
        if weight < MIN_WEIGHT {
            return Err(BslError::WeightTooSmall(weight));
        }
        let idx = self.nodes.len() as u32;
        let height = rank_of_weight(weight);
        self.nodes.push(NodeRec {
            key,
            weight,
            prev0: NIL,
            next0: NIL,
            head_of: NIL,
            tail_of: NIL,
            tower: alloc::vec![Level::empty(); height + 1],
        });
        let list = self.alloc_list(idx, idx);
        Ok((list, NodeId(idx)))
    }

    // ----- basic accessors -------------------------------------------------

    fn node(&self, i: u32) -> &NodeRec {
        &self.nodes[i as usize]
    }

    fn node_mut(&mut self, i: u32) -> &mut NodeRec {
        &mut self.nodes[i as usize]
    }

    pub fn check_node(&self, n: NodeId) -> Result<(), BslError> {
        if (n.0 as usize) < self.nodes.len() {
            Ok(())
        } else {
            Err(BslError::InvalidNode)
        }
    }

    pub fn key(&self, n: NodeId) -> Key {
        self.node(n.0).key
    }

    pub fn weight(&self, n: NodeId) -> u64 {
        self.node(n.0).weight
    }

    pub fn height(&self, n: NodeId) -> usize {
        self.h(n.0)
    }

    pub fn rank(&self, n: NodeId) -> usize {
        rank_of_weight(self.node(n.0).weight)
    }

    /// List-order successor in O(1).
    pub fn successor(&self, n: NodeId) -> Option<NodeId> {
        let t = self.node(n.0).next0;
        (t != NIL).then_some(NodeId(t))
    }

    /// List-order predecessor in O(1).
    pub fn predecessor(&self, n: NodeId) -> Option<NodeId> {
        let t = self.node(n.0).prev0;
        (t != NIL).then_some(NodeId(t))
    }

    fn h(&self, x: u32) -> usize {
        self.node(x).tower.len() - 1
    }

    fn rk(&self, x: u32) -> usize {
        rank_of_weight(self.node(x).weight)
    }

    fn next_of(&self, x: u32, lev: usize) -> Option<u32> {
        let t = self.node(x).tower[lev].next;
        (t != NIL).then_some(t)
    }

    fn prev_of(&self, x: u32, lev: usize) -> Option<u32> {
        let t = self.node(x).tower[lev].prev;
        (t != NIL).then_some(t)
    }

    fn toward_of(&self, x: u32, lev: usize, side: Side) -> Option<u32> {
        match side {
            Side::Right => self.next_of(x, lev),
            Side::Left => self.prev_of(x, lev),
        }
    }

    // ----- list handles ----------------------------------------------------

    fn alloc_list(&mut self, head: u32, tail: u32) -> ListId {
        let slot = match self.free_slots.pop() {
            Some(s) => {
                let rec = &mut self.lists[s as usize];
                rec.head = head;
                rec.tail = tail;
                rec.gen += 1;
                rec.alive = true;
                s
            }
            None => {
                self.lists.push(ListRec {
                    head,
                    tail,
                    gen: 0,
                    alive: true,
                });
                (self.lists.len() - 1) as u32
            }
        };
        self.node_mut(head).head_of = slot;
        self.node_mut(tail).tail_of = slot;
        ListId {
            slot,
            gen: self.lists[slot as usize].gen,
        }
    }

    fn free_list(&mut self, id: ListId) {
        let rec = self.lists[id.slot as usize];
        if self.node(rec.head).head_of == id.slot {
            self.node_mut(rec.head).head_of = NIL;
        }
        if self.node(rec.tail).tail_of == id.slot {
            self.node_mut(rec.tail).tail_of = NIL;
        }
        self.lists[id.slot as usize].alive = false;
        self.free_slots.push(id.slot);
    }

    pub fn check_list(&self, id: ListId) -> Result<(), BslError> {
        match self.lists.get(id.slot as usize) {
            Some(rec) if rec.alive && rec.gen == id.gen => Ok(()),
            _ => Err(BslError::StaleHandle),
        }
    }

    pub fn head(&self, id: ListId) -> Result<NodeId, BslError> {
        self.check_list(id)?;
        Ok(NodeId(self.lists[id.slot as usize].head))
    }

    pub fn tail(&self, id: ListId) -> Result<NodeId, BslError> {
        self.check_list(id)?;
        Ok(NodeId(self.lists[id.slot as usize].tail))
    }

    /// The list a node is the maximum of, if any.
    pub fn list_of_tail(&self, n: NodeId) -> Option<ListId> {
        let slot = self.node(n.0).tail_of;
        (slot != NIL).then(|| ListId {
            slot,
            gen: self.lists[slot as usize].gen,
        })
    }

    /// The list a node is the minimum of, if any.
    pub fn list_of_head(&self, n: NodeId) -> Option<ListId> {
        let slot = self.node(n.0).head_of;
        (slot != NIL).then(|| ListId {
            slot,
            gen: self.lists[slot as usize].gen,
        })
    }

    /// All live list handles.
    pub fn live_lists(&self) -> Vec<ListId> {
        self.lists
            .iter()
            .enumerate()
            .filter(|(_, r)| r.alive)
            .map(|(s, r)| ListId {
                slot: s as u32,
                gen: r.gen,
            })
            .collect()
    }

    /// `(key, weight)` pairs in list order.
    pub fn contents(&self, id: ListId) -> Result<Vec<(Key, u64)>, BslError> {
        self.check_list(id)?;
        let mut out = Vec::new();
        let mut cur = self.lists[id.slot as usize].head;
        loop {
            let n = self.node(cur);
            out.push((n.key, n.weight));
            if n.next0 == NIL {
                break;
            }
            cur = n.next0;
        }
        Ok(out)
    }

    /// Maximum tower height in the list, computed by climbing the right
    /// cover from the tail (no height field is stored).
    pub fn list_height(&self, id: ListId) -> Result<usize, BslError> {
        self.check_list(id)?;
        let mut cur = self.lists[id.slot as usize].tail;
        let mut best = self.h(cur);
        loop {
            let lev = self.h(cur);
            match self.prev_of(cur, lev) {
                Some(p) => {
                    cur = p;
                    best = best.max(self.h(p));
                }
                None => return Ok(best),
            }
        }
    }

    /// Total node weight of the list.
    pub fn list_weight(&self, id: ListId) -> Result<u64, BslError> {
        Ok(self.contents(id)?.iter().map(|&(_, w)| w).sum())
    }

    // ----- link primitives -------------------------------------------------

    fn link(&mut self, l: u32, r: u32, lev: usize) {
        debug_assert_eq!(self.node(l).tower[lev].next, NIL);
        debug_assert_eq!(self.node(r).tower[lev].prev, NIL);
        self.node_mut(l).tower[lev].next = r;
        self.node_mut(r).tower[lev].prev = l;
        self.metrics.pointer_writes += 2;
    }

    fn unlink(&mut self, l: u32, r: u32, lev: usize) {
        debug_assert_eq!(self.node(l).tower[lev].next, r);
        debug_assert_eq!(self.node(r).tower[lev].prev, l);
        self.node_mut(l).tower[lev].next = NIL;
        self.node_mut(r).tower[lev].prev = NIL;
        self.metrics.pointer_writes += 2;
    }

    // ----- climbs ----------------------------------------------------------

    /// First node left of `x` whose height exceeds `h(x)`, reached by
    /// walking `x`'s top-level plateau. `None` when no taller node exists on
    /// that side. O(plateau) by I1.
    fn climb_above(&mut self, x: u32, side: Side) -> Option<u32> {
        let lev = self.h(x);
        let mut cur = x;
        loop {
            self.metrics.levels_touched += 1;
            match self.toward_of(cur, lev, side) {
                None => return None,
                Some(p) if self.h(p) > lev => return Some(p),
                // same height: a plateau mate whose top is also `lev`
                Some(p) => cur = p,
            }
        }
    }

    // ----- promotion / demotion --------------------------------------------

    /// Raises `x` by one level, rewiring the canonical links. Does not check
    /// I1; callers restore it.
    fn promote_one(&mut self, x: u32) {
        let old = self.h(x);
        let new = old + 1;
        let p = self.climb_above(x, Side::Left);
        let q = self.climb_above(x, Side::Right);
        // pairs stored at x's old top because x was the shorter endpoint
        // move up along with x
        if let Some(po) = self.prev_of(x, old) {
            if self.h(po) > old {
                self.unlink(po, x, old);
            }
        }
        if let Some(qo) = self.next_of(x, old) {
            if self.h(qo) > old {
                self.unlink(x, qo, old);
            }
        }
        self.node_mut(x).tower.push(Level::empty());
        if let (Some(p), Some(q)) = (p, q) {
            // if the flanking pair was linked exactly at the new level, x
            // now separates them
            if self.next_of(p, new) == Some(q) {
                self.unlink(p, q, new);
            }
        }
        if let Some(p) = p {
            self.link(p, x, new);
        }
        if let Some(q) = q {
            self.link(x, q, new);
        }
        self.metrics.promotions += 1;
    }

    /// Removes `x`'s top level, relinking the exposed flanking pair when
    /// their link belongs at that level and migrating x's own pairs down to
    /// its new top. Returns the flanking nodes.
    fn demote_one(&mut self, x: u32) -> (Option<u32>, Option<u32>) {
        let lev = self.h(x);
        debug_assert!(lev >= 2);
        let p = self.prev_of(x, lev);
        let q = self.next_of(x, lev);
        if let Some(p) = p {
            self.unlink(p, x, lev);
        }
        if let Some(q) = q {
            self.unlink(x, q, lev);
        }
        self.node_mut(x).tower.pop();
        if let (Some(p), Some(q)) = (p, q) {
            if self.h(p).min(self.h(q)) == lev {
                self.link(p, q, lev);
            }
        }
        // x stays consecutive with its old partners; unless a node of
        // height exactly lev-1 sits in between, the pair now links at x's
        // new top
        if let Some(p) = p {
            if self.prev_of(x, lev - 1).is_none() {
                self.link(p, x, lev - 1);
            }
        }
        if let Some(q) = q {
            if self.next_of(x, lev - 1).is_none() {
                self.link(x, q, lev - 1);
            }
        }
        self.metrics.demotions += 1;
        (p, q)
    }

    /// Lowers `x` to `new_h`, repairing I1 at every level where runs merge
    /// across the vacated position and at the landing level.
    fn demote_to(&mut self, x: u32, new_h: usize) {
        debug_assert!(new_h >= self.rk(x));
        while self.h(x) > new_h {
            let lev = self.h(x);
            let (p, q) = self.demote_one(x);
            // two runs of height `lev` may have merged across x
            let focus = match (p, q) {
                (Some(p), _) if self.h(p) == lev => Some(p),
                (_, Some(q)) if self.h(q) == lev => Some(q),
                _ => None,
            };
            if let Some(fc) = focus {
                self.fix_plateau_chain(fc);
            }
        }
        // x itself joined the plateau at its landing height
        self.fix_plateau_chain(x);
    }

    // ----- plateau repair (I1) ----------------------------------------------

    /// If the plateau at `lev` containing `focus` (whose height must be
    /// exactly `lev`) exceeds the cap, promotes its median and returns it.
    fn fix_plateau_once(&mut self, focus: u32, lev: usize) -> Option<u32> {
        debug_assert_eq!(self.h(focus), lev);
        let mut leftmost = focus;
        let mut len = 1usize;
        loop {
            self.metrics.levels_touched += 1;
            match self.prev_of(leftmost, lev) {
                Some(p) if self.h(p) == lev => {
                    leftmost = p;
                    len += 1;
                }
                _ => break,
            }
        }
        let mut cur = focus;
        loop {
            self.metrics.levels_touched += 1;
            match self.next_of(cur, lev) {
                Some(q) if self.h(q) == lev => {
                    cur = q;
                    len += 1;
                }
                _ => break,
            }
        }
        if len <= PLATEAU_CAP {
            return None;
        }
        // promote the ceil(len/2)-th node from the left
        let steps = len.div_ceil(2) - 1;
        let mut median = leftmost;
        for _ in 0..steps {
            median = self.next_of(median, lev).expect("plateau walk");
            self.metrics.levels_touched += 1;
        }
        self.promote_one(median);
        // a median promotion keeps at least a plateau mates on each side,
        // so it can never break the spacing invariant at its new level
        #[cfg(debug_assertions)]
        for side in [Side::Left, Side::Right] {
            let mut count = 0usize;
            let mut cur = self.toward_of(median, lev, side);
            while let Some(y) = cur {
                if self.h(y) != lev || count >= BIAS_A {
                    break;
                }
                count += 1;
                cur = self.toward_of(y, lev, side);
            }
            debug_assert!(count >= BIAS_A, "median promotion starved its own spacing");
        }
        Some(median)
    }

    /// Repairs I1 starting at `focus`'s own plateau and percolating upward
    /// while median promotions keep overflowing the level above.
    fn fix_plateau_chain(&mut self, focus: u32) {
        let mut focus = focus;
        let mut lev = self.h(focus);
        while let Some(median) = self.fix_plateau_once(focus, lev) {
            focus = median;
            lev += 1;
        }
    }

    // ----- I2 restoration ---------------------------------------------------

    /// Does `x` violate I2 toward `side`, granted that levels `≤ h_known`
    /// were valid before the disturbance? Only levels in
    /// `(max(rank, h_known), h(x)]` can be broken; witnesses at level `i`
    /// are nodes of height exactly `i−1` strictly between `x` and the first
    /// node of height ≥ `i` (or the list end, which blocks like a wall).
    fn i2_violated(&mut self, x: u32, side: Side, h_known: usize) -> bool {
        let lo = self.rk(x).max(h_known);
        let h = self.h(x);
        if h <= lo {
            return false;
        }
        // the node's non-nil slots toward `side`, ascending from `lo`
        let mut slots: Vec<(usize, u32)> = Vec::new();
        for lev in lo..=h {
            self.metrics.levels_touched += 1;
            if let Some(t) = self.toward_of(x, lev, side) {
                slots.push((lev, t));
            }
        }
        let mut si = 0usize;
        for i in (lo + 1)..=h {
            while si < slots.len() && slots[si].0 < i - 1 {
                si += 1;
            }
            // first node of height >= i-1 toward `side`
            let mut cur = slots.get(si).map(|&(_, t)| t);
            let mut count = 0usize;
            loop {
                match cur {
                    None => break,                      // wall
                    Some(y) if self.h(y) >= i => break, // blocker
                    Some(y) => {
                        count += 1;
                        if count >= BIAS_A {
                            break;
                        }
                        self.metrics.levels_touched += 1;
                        cur = self.toward_of(y, i - 1, side);
                    }
                }
            }
            if count < BIAS_A {
                return true;
            }
        }
        false
    }

    /// Walks a cover or profile away from a disturbed boundary, demoting
    /// nodes that violate I2 and repairing any I1 fallout.
    ///
    /// `side` is where the witnesses are counted (toward the disturbance);
    /// the walk climbs the opposite way through ever-taller nodes. A node
    /// found clean stops the walk once its height exceeds `stop_above`.
    /// `h_init` is the highest level known good at the first node.
    fn restore_i2(&mut self, start: Option<u32>, side: Side, h_init: usize, stop_above: usize) {
        let away = match side {
            Side::Right => Side::Left,
            Side::Left => Side::Right,
        };
        let mut h_known = h_init;
        let mut cur = start;
        while let Some(x) = cur {
            // successor in the climb, resolved before any demotion of x
            let next = self.climb_above(x, away);
            if self.i2_violated(x, side, h_known) {
                let pre = self.h(x);
                let target = self.rk(x).max(h_known);
                self.demote_to(x, target);
                h_known = pre;
            } else {
                if self.h(x) > stop_above {
                    break;
                }
                h_known = self.h(x);
            }
            cur = next;
        }
    }

    // ----- test hooks -------------------------------------------------------

    /// Corrupts a node's tower height without rewiring links. Only for
    /// exercising the auditor's failure paths.
    #[doc(hidden)]
    pub fn debug_force_height(&mut self, n: NodeId, height: usize) {
        let t = &mut self.node_mut(n.0).tower;
        t.resize(height + 1, Level::empty());
    }

    /// Overwrites a stored weight without restructuring. Only for
    /// exercising weight-consistency detectors.
    #[doc(hidden)]
    pub fn debug_force_weight(&mut self, n: NodeId, w: u64) {
        self.node_mut(n.0).weight = w;
    }
}

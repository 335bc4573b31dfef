//! Structural verification of a biased skip list.
//!
//! The auditor recomputes, from keys and heights alone, exactly which links
//! the canonical representation must contain, and checks the stored towers
//! against that along with I0, I1, I2 (walls included) and the bottom
//! chain. An empty report means the list is sound.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use super::{rank_of_weight, Arena, ListId, MIN_WEIGHT, NIL, PLATEAU_CAP};
use crate::Key;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    StaleHandle,
    ChainOrder {
        at: Key,
    },
    ChainLink {
        at: Key,
    },
    EndpointMismatch,
    WeightTooSmall {
        key: Key,
        weight: u64,
    },
    HeightBelowRank {
        key: Key,
        height: usize,
        rank: usize,
    },
    BottomSlotUsed {
        key: Key,
    },
    LinkMismatch {
        key: Key,
        level: usize,
    },
    PlateauTooLong {
        level: usize,
        len: usize,
    },
    TooFewBetween {
        key: Key,
        level: usize,
        left: bool,
        found: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::StaleHandle => write!(f, "stale list handle"),
            Violation::ChainOrder { at } => write!(f, "keys not increasing at {at}"),
            Violation::ChainLink { at } => write!(f, "bottom chain broken at {at}"),
            Violation::EndpointMismatch => write!(f, "stored head/tail do not match the chain"),
            Violation::WeightTooSmall { key, weight } => {
                write!(f, "node {key} has weight {weight} < {MIN_WEIGHT}")
            }
            Violation::HeightBelowRank { key, height, rank } => {
                write!(f, "I0: node {key} has height {height} < rank {rank}")
            }
            Violation::BottomSlotUsed { key } => write!(f, "node {key} has a level-0 link"),
            Violation::LinkMismatch { key, level } => {
                write!(
                    f,
                    "link at node {key} level {level} differs from the canonical structure"
                )
            }
            Violation::PlateauTooLong { level, len } => {
                write!(f, "I1: plateau of {len} nodes at level {level}")
            }
            Violation::TooFewBetween {
                key,
                level,
                left,
                found,
            } => {
                let side = if *left { "left" } else { "right" };
                write!(
                    f,
                    "I2: node {key} level {level} has only {found} height-{} nodes on its {side}",
                    level - 1
                )
            }
        }
    }
}

/// Outcome of one audit. Empty means every check passed.
#[derive(Debug, Clone, Default)]
pub struct AuditReport {
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn is_pass(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pass() {
            return write!(f, "audit: pass");
        }
        writeln!(f, "audit: {} violation(s)", self.violations.len())?;
        for v in self.violations.iter().take(20) {
            writeln!(f, "  - {v}")?;
        }
        if self.violations.len() > 20 {
            writeln!(f, "  ... and {} more", self.violations.len() - 20)?;
        }
        Ok(())
    }
}

/// Maximal run length per level, as seen by the auditor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlateauStat {
    pub level: usize,
    pub plateaus: usize,
    pub longest: usize,
}

impl Arena {
    /// Full structural audit of one list.
    pub fn audit(&self, list: ListId) -> AuditReport {
        let mut report = AuditReport::default();
        if self.check_list(list).is_err() {
            report.violations.push(Violation::StaleHandle);
            return report;
        }
        let rec = self.lists[list.slot as usize];
        let nodes = match self.walk_chain(rec.head, rec.tail, &mut report) {
            Some(n) => n,
            None => return report,
        };

        // per-node basics
        for &x in &nodes {
            let n = self.node(x);
            let h = self.h(x);
            if n.weight < MIN_WEIGHT {
                report.violations.push(Violation::WeightTooSmall {
                    key: n.key,
                    weight: n.weight,
                });
                continue;
            }
            let rank = rank_of_weight(n.weight);
            if h < rank {
                report.violations.push(Violation::HeightBelowRank {
                    key: n.key,
                    height: h,
                    rank,
                });
            }
            if n.tower[0].prev != NIL || n.tower[0].next != NIL {
                report
                    .violations
                    .push(Violation::BottomSlotUsed { key: n.key });
            }
        }

        self.check_links(&nodes, &mut report);
        self.check_plateaus_and_spacing(&nodes, &mut report);
        report
    }

    /// Plateau census per level: how many maximal runs, and the longest.
    pub fn plateau_census(&self, list: ListId) -> Vec<PlateauStat> {
        let mut out = Vec::new();
        if self.check_list(list).is_err() {
            return out;
        }
        let rec = self.lists[list.slot as usize];
        let mut report = AuditReport::default();
        let nodes = match self.walk_chain(rec.head, rec.tail, &mut report) {
            Some(n) => n,
            None => return out,
        };
        let max_h = nodes.iter().map(|&x| self.h(x)).max().unwrap_or(0);
        for lev in 1..=max_h {
            let mut plateaus = 0usize;
            let mut longest = 0usize;
            let mut run = 0usize;
            for &x in nodes.iter().filter(|&&x| self.h(x) >= lev) {
                if self.h(x) == lev {
                    run += 1;
                } else {
                    if run > 0 {
                        plateaus += 1;
                        longest = longest.max(run);
                    }
                    run = 0;
                }
            }
            if run > 0 {
                plateaus += 1;
                longest = longest.max(run);
            }
            if plateaus > 0 {
                out.push(PlateauStat {
                    level: lev,
                    plateaus,
                    longest,
                });
            }
        }
        out
    }

    fn walk_chain(&self, head: u32, tail: u32, report: &mut AuditReport) -> Option<Vec<u32>> {
        let mut nodes = Vec::new();
        let mut cur = head;
        if self.node(head).prev0 != NIL {
            report.violations.push(Violation::EndpointMismatch);
        }
        loop {
            nodes.push(cur);
            if nodes.len() > self.nodes.len() {
                report.violations.push(Violation::ChainLink {
                    at: self.node(cur).key,
                });
                return None;
            }
            let n = self.node(cur);
            match n.next0 {
                NIL => break,
                next => {
                    let m = self.node(next);
                    if m.prev0 != cur {
                        report.violations.push(Violation::ChainLink { at: m.key });
                        return None;
                    }
                    if m.key <= n.key {
                        report.violations.push(Violation::ChainOrder { at: m.key });
                        return None;
                    }
                    cur = next;
                }
            }
        }
        if cur != tail {
            report.violations.push(Violation::EndpointMismatch);
        }
        Some(nodes)
    }

    /// Recomputes the canonical link set (each consecutive pair linked at
    /// the minimum of their heights, nothing else) and compares it with the
    /// stored towers.
    fn check_links(&self, nodes: &[u32], report: &mut AuditReport) {
        let mut expect_next: BTreeMap<(u32, usize), u32> = BTreeMap::new();
        let mut expect_prev: BTreeMap<(u32, usize), u32> = BTreeMap::new();
        let mut stack: Vec<u32> = Vec::new();
        for &y in nodes {
            let hy = self.h(y);
            while let Some(&t) = stack.last() {
                let ht = self.h(t);
                let lev = ht.min(hy);
                expect_next.insert((t, lev), y);
                expect_prev.insert((y, lev), t);
                if ht <= hy {
                    stack.pop();
                }
                if ht >= hy {
                    break;
                }
            }
            stack.push(y);
        }
        for &x in nodes {
            let n = self.node(x);
            for lev in 1..=self.h(x) {
                let want_next = expect_next.get(&(x, lev)).copied().unwrap_or(NIL);
                let want_prev = expect_prev.get(&(x, lev)).copied().unwrap_or(NIL);
                if n.tower[lev].next != want_next || n.tower[lev].prev != want_prev {
                    report.violations.push(Violation::LinkMismatch {
                        key: n.key,
                        level: lev,
                    });
                }
            }
        }
    }

    /// I1 and I2 over the whole list, one level at a time. List ends act as
    /// walls of unbounded height for I2.
    fn check_plateaus_and_spacing(&self, nodes: &[u32], report: &mut AuditReport) {
        let max_h = nodes.iter().map(|&x| self.h(x)).max().unwrap_or(0);
        // I1
        for lev in 1..=max_h {
            let mut run = 0usize;
            for &x in nodes.iter().filter(|&&x| self.h(x) >= lev) {
                if self.h(x) == lev {
                    run += 1;
                } else {
                    if run > PLATEAU_CAP {
                        report.violations.push(Violation::PlateauTooLong {
                            level: lev,
                            len: run,
                        });
                    }
                    run = 0;
                }
            }
            if run > PLATEAU_CAP {
                report.violations.push(Violation::PlateauTooLong {
                    level: lev,
                    len: run,
                });
            }
        }
        // I2: at level i, witnesses have height exactly i-1
        for i in 2..=max_h {
            let needs = |x: u32| {
                let n = self.node(x);
                n.weight >= MIN_WEIGHT && rank_of_weight(n.weight) < i && i <= self.h(x)
            };
            let mut run = 0usize;
            let mut prev_tall: Option<u32> = None;
            for &x in nodes.iter().filter(|&&x| self.h(x) >= i - 1) {
                if self.h(x) >= i {
                    if let Some(p) = prev_tall {
                        if needs(p) && run < super::BIAS_A {
                            report.violations.push(Violation::TooFewBetween {
                                key: self.node(p).key,
                                level: i,
                                left: false,
                                found: run,
                            });
                        }
                    }
                    if needs(x) && run < super::BIAS_A {
                        report.violations.push(Violation::TooFewBetween {
                            key: self.node(x).key,
                            level: i,
                            left: true,
                            found: run,
                        });
                    }
                    prev_tall = Some(x);
                    run = 0;
                } else {
                    run += 1;
                }
            }
            if let Some(p) = prev_tall {
                if needs(p) && run < super::BIAS_A {
                    report.violations.push(Violation::TooFewBetween {
                        key: self.node(p).key,
                        level: i,
                        left: false,
                        found: run,
                    });
                }
            }
        }
    }
}

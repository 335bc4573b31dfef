//! A mergeable dictionary: disjoint ordered sets over a fixed integer
//! universe `1..=n`, supporting predecessor search, split at a key, and
//! union of arbitrarily interleaved sets in O(log n) amortized time.
//!
//! The heavy lifting happens in [`bsl`], a (2,6)-biased skip list extended
//! with finger split, finger join and finger reweight. [`dict`] layers the
//! gap-derived weighting scheme and the four-phase union on top. [`oracle`]
//! is a brute-force reference used by the differential tests, and
//! [`baseline`] is the classical O(log² n) design (segment merging over an
//! unweighted balanced list) kept around for scaling comparisons.
//!
//! The crate is `no_std` (alloc only); all I/O, workload replay and file
//! formats live in the companion `mdict-harness` crate.

#![no_std]

extern crate alloc;

pub mod baseline;
pub mod bsl;
pub mod dict;
pub mod metrics;
pub mod oracle;

/// Universe key. Keys are the integers `1..=n`, so a key is also its own
/// global position.
pub type Key = u64;

pub use dict::{Collection, SetHandle};
pub use metrics::Metrics;

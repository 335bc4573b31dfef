//! Instrumentation counters.
//!
//! Every structural walk, promotion, demotion and pointer write in the skip
//! list layer bumps one of these counters. The harness samples them around
//! each replayed operation; `levels_touched + promotions + demotions` is the
//! hardware-independent work unit used by the scaling checks.

/// Monotonically increasing operation counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Metrics {
    /// Level/pointer traversal steps across all walks.
    pub levels_touched: u64,
    /// Single-level tower promotions.
    pub promotions: u64,
    /// Single-level tower demotions.
    pub demotions: u64,
    /// Individual link-slot writes.
    pub pointer_writes: u64,
    /// Key comparisons made by searches.
    pub comparisons: u64,
}

impl Metrics {
    pub fn new() -> Self {
        Metrics::default()
    }

    /// Counter-wise difference since `earlier`. Saturates rather than
    /// panicking if a stale snapshot is passed.
    pub fn since(&self, earlier: &Metrics) -> Metrics {
        Metrics {
            levels_touched: self.levels_touched.saturating_sub(earlier.levels_touched),
            promotions: self.promotions.saturating_sub(earlier.promotions),
            demotions: self.demotions.saturating_sub(earlier.demotions),
            pointer_writes: self.pointer_writes.saturating_sub(earlier.pointer_writes),
            comparisons: self.comparisons.saturating_sub(earlier.comparisons),
        }
    }

    /// Work-unit proxy for time: levels touched plus promotions plus
    /// demotions.
    pub fn work_units(&self) -> u64 {
        self.levels_touched + self.promotions + self.demotions
    }
}

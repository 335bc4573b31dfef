//! Workload generation, deterministic replay, differential verification and
//! benchmarking for the mergeable dictionary and its baseline.
//!
//! Workload files are plain text: a `n <N>` header line, then one operation
//! per line (`union k1 k2`, `split k x`, `search k x`, `find k`), with `#`
//! comments and blank lines ignored. Sets are addressed by any member key,
//! so one file replays unchanged on every implementation.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use mdict::baseline::BaselineCollection;
use mdict::dict::Collection;
use mdict::oracle::OracleCollection;
use mdict::Key;
pub use mdict::Metrics;

pub const CSV_HEADER: &str =
    "op_index,op_type,segments,levels_touched,promotions,demotions,phi_before,phi_after,wall_ns";

// ----- deterministic rng ------------------------------------------------------

/// splitmix64: tiny, seedable, stable across platforms and releases.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform-enough value in `0..bound` (`bound > 0`).
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    /// Uniform key in `1..=n`.
    pub fn key(&mut self, n: Key) -> Key {
        self.below(n) + 1
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

// ----- workload model ---------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Union { k1: Key, k2: Key },
    Split { k: Key, x: Key },
    Search { k: Key, x: Key },
    Find { k: Key },
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Union { k1, k2 } => write!(f, "union {k1} {k2}"),
            Op::Split { k, x } => write!(f, "split {k} {x}"),
            Op::Search { k, x } => write!(f, "search {k} {x}"),
            Op::Find { k } => write!(f, "find {k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Workload {
    pub n: Key,
    pub ops: Vec<Op>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WorkloadError {
    MissingHeader,
    BadLine { line: usize, text: String },
    KeyOutOfRange { line: usize, key: Key },
}

impl fmt::Display for WorkloadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorkloadError::MissingHeader => write!(f, "workload must start with a `n <N>` line"),
            WorkloadError::BadLine { line, text } => {
                write!(f, "line {line}: cannot parse `{text}`")
            }
            WorkloadError::KeyOutOfRange { line, key } => {
                write!(f, "line {line}: key {key} outside the universe")
            }
        }
    }
}

impl std::error::Error for WorkloadError {}

impl Workload {
    pub fn parse(text: &str) -> Result<Workload, WorkloadError> {
        let mut n: Option<Key> = None;
        let mut ops = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || WorkloadError::BadLine {
                line: idx + 1,
                text: line.to_string(),
            };
            let mut parts = line.split_whitespace();
            let word = parts.next().ok_or_else(bad)?;
            let num = |parts: &mut std::str::SplitWhitespace<'_>| -> Result<Key, WorkloadError> {
                parts
                    .next()
                    .ok_or_else(bad)?
                    .parse::<Key>()
                    .map_err(|_| bad())
            };
            match (word, n) {
                ("n", None) => {
                    let v = num(&mut parts)?;
                    if v == 0 {
                        return Err(bad());
                    }
                    n = Some(v);
                }
                (_, None) => return Err(WorkloadError::MissingHeader),
                ("union", Some(un)) => {
                    let (k1, k2) = (num(&mut parts)?, num(&mut parts)?);
                    check_key(k1, un, idx)?;
                    check_key(k2, un, idx)?;
                    ops.push(Op::Union { k1, k2 });
                }
                ("split", Some(un)) => {
                    let (k, x) = (num(&mut parts)?, num(&mut parts)?);
                    check_key(k, un, idx)?;
                    ops.push(Op::Split { k, x });
                }
                ("search", Some(un)) => {
                    let (k, x) = (num(&mut parts)?, num(&mut parts)?);
                    check_key(k, un, idx)?;
                    ops.push(Op::Search { k, x });
                }
                ("find", Some(un)) => {
                    let k = num(&mut parts)?;
                    check_key(k, un, idx)?;
                    ops.push(Op::Find { k });
                }
                _ => return Err(bad()),
            }
            if parts.next().is_some() {
                return Err(bad());
            }
        }
        match n {
            Some(n) => Ok(Workload { n, ops }),
            None => Err(WorkloadError::MissingHeader),
        }
    }

    pub fn to_text(&self) -> String {
        use fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "n {}", self.n);
        for op in &self.ops {
            let _ = writeln!(out, "{op}");
        }
        out
    }
}

fn check_key(k: Key, n: Key, idx: usize) -> Result<(), WorkloadError> {
    if k >= 1 && k <= n {
        Ok(())
    } else {
        Err(WorkloadError::KeyOutOfRange {
            line: idx + 1,
            key: k,
        })
    }
}

// ----- generators --------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    /// Uniform mix: 50% unions of random distinct sets, 30% splits at a
    /// random key, 15% searches, 5% finds.
    Random,
    /// Rounds of unions pairing sets whose minima differ in one bit,
    /// highest bit first, driving the segment count up; interspersed with
    /// midpoint splits that tear the universe back down.
    Interleave,
    /// Builds the odd and even keys by cheap unions, merges them in one
    /// maximally interleaved union, then re-splits.
    SortedMerge,
}

impl FromStr for GenKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(GenKind::Random),
            "interleave" => Ok(GenKind::Interleave),
            "sorted-merge" => Ok(GenKind::SortedMerge),
            other => Err(format!(
                "unknown kind `{other}` (random|interleave|sorted-merge)"
            )),
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenKind::Random => write!(f, "random"),
            GenKind::Interleave => write!(f, "interleave"),
            GenKind::SortedMerge => write!(f, "sorted-merge"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenError {
    ZeroOps,
    ZeroUniverse,
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::ZeroOps => write!(f, "op count must be positive"),
            GenError::ZeroUniverse => write!(f, "universe must be nonempty"),
        }
    }
}

impl std::error::Error for GenError {}

/// Deterministically generates a workload of exactly `m` operations.
pub fn generate(kind: GenKind, n: Key, m: usize, seed: u64) -> Result<Workload, GenError> {
    if m == 0 {
        return Err(GenError::ZeroOps);
    }
    if n == 0 {
        return Err(GenError::ZeroUniverse);
    }
    let mut rng = SplitMix64::new(seed);
    let ops = match kind {
        GenKind::Random => gen_random(n, m, &mut rng),
        GenKind::Interleave => gen_interleave(n, m, &mut rng),
        GenKind::SortedMerge => gen_sorted_merge(n, m),
    };
    Ok(Workload { n, ops })
}

fn gen_random(n: Key, m: usize, rng: &mut SplitMix64) -> Vec<Op> {
    // a shadow partition keeps the union operands in distinct sets
    let mut shadow = OracleCollection::new(n);
    let mut ops = Vec::with_capacity(m);
    while ops.len() < m {
        let roll = rng.below(100);
        if roll < 50 && n > 1 {
            let mut emitted = false;
            for _ in 0..32 {
                let k1 = rng.key(n);
                let k2 = rng.key(n);
                let s1 = shadow.find(k1).unwrap();
                let s2 = shadow.find(k2).unwrap();
                if s1 != s2 {
                    shadow.union(s1, s2).unwrap();
                    ops.push(Op::Union { k1, k2 });
                    emitted = true;
                    break;
                }
            }
            if emitted {
                continue;
            }
            // likely one big set: fall through to a split
        }
        if roll < 80 {
            let x = rng.key(n);
            let s = shadow.find(x).unwrap();
            shadow.split(s, x).unwrap();
            ops.push(Op::Split { k: x, x });
        } else if roll < 95 {
            ops.push(Op::Search {
                k: rng.key(n),
                x: rng.key(n),
            });
        } else {
            ops.push(Op::Find { k: rng.key(n) });
        }
    }
    ops
}

fn gen_interleave(n: Key, m: usize, rng: &mut SplitMix64) -> Vec<Op> {
    let levels = n.ilog2(); // rounds use bits below 2^levels
    let mut ops = Vec::with_capacity(m);
    'outer: loop {
        // build: pair minima differing in the current bit, high bits first,
        // so every union interleaves its operands perfectly
        for bit in (0..levels).rev() {
            let step = 1u64 << bit;
            let mut mins: Vec<Key> = (1..=step).collect();
            rng.shuffle(&mut mins);
            for k in mins {
                if k + step > n {
                    continue;
                }
                ops.push(Op::Union {
                    k1: k,
                    k2: k + step,
                });
                if ops.len() == m {
                    break 'outer;
                }
            }
        }
        if levels == 0 {
            // universe of one key: nothing to pair
            while ops.len() < m {
                ops.push(Op::Find { k: 1 });
            }
            break;
        }
        // teardown: recursive midpoint splits back to singletons
        for round in 0..levels {
            let len = (1u64 << levels) >> round;
            let mut starts: Vec<Key> = (1..=n).step_by(len as usize).collect();
            rng.shuffle(&mut starts);
            for s in starts {
                let mid = s + len / 2 - 1;
                if mid >= n {
                    continue;
                }
                ops.push(Op::Split {
                    k: s.min(n),
                    x: mid,
                });
                if ops.len() == m {
                    break 'outer;
                }
            }
        }
    }
    ops
}

fn gen_sorted_merge(n: Key, m: usize) -> Vec<Op> {
    let mut ops = Vec::with_capacity(m);
    if n == 1 {
        while ops.len() < m {
            ops.push(Op::Find { k: 1 });
        }
        return ops;
    }
    'outer: loop {
        // gather the odds and the evens with cheap appends
        for k in (3..=n).step_by(2) {
            ops.push(Op::Union { k1: 1, k2: k });
            if ops.len() == m {
                break 'outer;
            }
        }
        for k in (4..=n).step_by(2) {
            ops.push(Op::Union { k1: 2, k2: k });
            if ops.len() == m {
                break 'outer;
            }
        }
        // the one maximally interleaved union
        ops.push(Op::Union { k1: 1, k2: 2 });
        if ops.len() == m {
            break;
        }
        // re-split into singletons
        for k in 1..n {
            ops.push(Op::Split { k, x: k });
            if ops.len() == m {
                break 'outer;
            }
        }
    }
    ops
}

// ----- replay ------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhichImpl {
    Mdict,
    Baseline,
}

impl FromStr for WhichImpl {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mdict" => Ok(WhichImpl::Mdict),
            "baseline" => Ok(WhichImpl::Baseline),
            other => Err(format!("unknown implementation `{other}` (mdict|baseline)")),
        }
    }
}

impl fmt::Display for WhichImpl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WhichImpl::Mdict => write!(f, "mdict"),
            WhichImpl::Baseline => write!(f, "baseline"),
        }
    }
}

/// Uniform driving interface over the two real implementations. Sets are
/// addressed by member key; handles stay internal.
pub trait Runner {
    fn find_max(&mut self, k: Key) -> Key;
    fn search_key(&mut self, k: Key, x: Key) -> Option<Key>;
    fn split_at(&mut self, k: Key, x: Key);
    /// Returns false when both keys already share a set (the op is skipped).
    fn union_keys(&mut self, k1: Key, k2: Key) -> bool;
    fn last_segments(&self) -> u32;
    fn snapshot(&self) -> Vec<Vec<Key>>;
    fn metrics(&self) -> Metrics;
    fn potential(&self) -> Option<f64>;
    /// Full structural/weight audit where the implementation supports one.
    fn structural_check(&self) -> Result<(), String>;
}

pub struct MdictRunner {
    pub dict: Collection,
}

impl MdictRunner {
    pub fn new(n: Key) -> Self {
        MdictRunner {
            dict: Collection::new(n).expect("n >= 1"),
        }
    }
}

impl Runner for MdictRunner {
    fn find_max(&mut self, k: Key) -> Key {
        self.dict.find(k).expect("key in range").1
    }

    fn search_key(&mut self, k: Key, x: Key) -> Option<Key> {
        let (h, _) = self.dict.find(k).expect("key in range");
        self.dict.search(h, x).expect("live handle")
    }

    fn split_at(&mut self, k: Key, x: Key) {
        let (h, _) = self.dict.find(k).expect("key in range");
        self.dict.split(h, x).expect("live handle");
    }

    fn union_keys(&mut self, k1: Key, k2: Key) -> bool {
        let (h1, _) = self.dict.find(k1).expect("key in range");
        let (h2, _) = self.dict.find(k2).expect("key in range");
        if h1 == h2 {
            return false;
        }
        self.dict.union(h1, h2).expect("live handles");
        true
    }

    fn last_segments(&self) -> u32 {
        self.dict.last_union_stats().map_or(0, |s| s.segments)
    }

    fn snapshot(&self) -> Vec<Vec<Key>> {
        self.dict.snapshot()
    }

    fn metrics(&self) -> Metrics {
        self.dict.metrics()
    }

    fn potential(&self) -> Option<f64> {
        Some(self.dict.potential())
    }

    fn structural_check(&self) -> Result<(), String> {
        self.dict.validate()
    }
}

pub struct BaselineRunner {
    pub base: BaselineCollection,
}

impl BaselineRunner {
    pub fn new(n: Key) -> Self {
        BaselineRunner {
            base: BaselineCollection::new(n).expect("n >= 1"),
        }
    }
}

impl Runner for BaselineRunner {
    fn find_max(&mut self, k: Key) -> Key {
        self.base.find(k).expect("key in range").1
    }

    fn search_key(&mut self, k: Key, x: Key) -> Option<Key> {
        let (h, _) = self.base.find(k).expect("key in range");
        self.base.search(h, x).expect("live handle")
    }

    fn split_at(&mut self, k: Key, x: Key) {
        let (h, _) = self.base.find(k).expect("key in range");
        self.base.split(h, x).expect("live handle");
    }

    fn union_keys(&mut self, k1: Key, k2: Key) -> bool {
        let (h1, _) = self.base.find(k1).expect("key in range");
        let (h2, _) = self.base.find(k2).expect("key in range");
        if h1 == h2 {
            return false;
        }
        self.base.union(h1, h2).expect("live handles");
        true
    }

    fn last_segments(&self) -> u32 {
        self.base.last_union_stats().map_or(0, |s| s.segments)
    }

    fn snapshot(&self) -> Vec<Vec<Key>> {
        self.base.snapshot()
    }

    fn metrics(&self) -> Metrics {
        self.base.metrics()
    }

    fn potential(&self) -> Option<f64> {
        None
    }

    fn structural_check(&self) -> Result<(), String> {
        Ok(())
    }
}

pub fn runner_for(which: WhichImpl, n: Key) -> Box<dyn Runner> {
    match which {
        WhichImpl::Mdict => Box::new(MdictRunner::new(n)),
        WhichImpl::Baseline => Box::new(BaselineRunner::new(n)),
    }
}

// ----- verify --------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyReport {
    pub ops: usize,
    pub unions_skipped: usize,
    pub snapshots: usize,
}

/// Replays the workload on the chosen implementation and the oracle in
/// lockstep. Every query result is compared; the whole partition (plus, for
/// mdict, the structural audit and weight consistency) is compared at every
/// `snapshot_every`-th op and at the end. The first divergence aborts with
/// a description.
pub fn verify(
    w: &Workload,
    which: WhichImpl,
    snapshot_every: usize,
) -> Result<VerifyReport, String> {
    let mut runner = runner_for(which, w.n);
    verify_with(runner.as_mut(), w, snapshot_every)
}

/// As [`verify`], driving a caller-supplied runner.
pub fn verify_with(
    runner: &mut dyn Runner,
    w: &Workload,
    snapshot_every: usize,
) -> Result<VerifyReport, String> {
    let mut oracle = OracleCollection::new(w.n);
    let mut report = VerifyReport::default();
    let every = snapshot_every.max(1);
    for (i, op) in w.ops.iter().enumerate() {
        match *op {
            Op::Find { k } => {
                let got = runner.find_max(k);
                let id = oracle.find(k).map_err(|e| e.to_string())?;
                let want = *oracle.keys_of(id).unwrap().last().unwrap();
                if got != want {
                    return Err(format!(
                        "op {i} (find {k}): got max {got}, oracle says {want}"
                    ));
                }
            }
            Op::Search { k, x } => {
                let got = runner.search_key(k, x);
                let id = oracle.find(k).map_err(|e| e.to_string())?;
                let want = oracle.search(id, x).unwrap();
                if got != want {
                    return Err(format!(
                        "op {i} (search {k} {x}): got {got:?}, oracle says {want:?}"
                    ));
                }
            }
            Op::Split { k, x } => {
                runner.split_at(k, x);
                let id = oracle.find(k).map_err(|e| e.to_string())?;
                oracle.split(id, x).unwrap();
            }
            Op::Union { k1, k2 } => {
                let id1 = oracle.find(k1).map_err(|e| e.to_string())?;
                let id2 = oracle.find(k2).map_err(|e| e.to_string())?;
                let performed = runner.union_keys(k1, k2);
                if performed != (id1 != id2) {
                    return Err(format!(
                        "op {i} (union {k1} {k2}): implementation and oracle disagree on set identity"
                    ));
                }
                if performed {
                    oracle.union(id1, id2).unwrap();
                } else {
                    report.unions_skipped += 1;
                }
            }
        }
        report.ops += 1;
        if (i + 1) % every == 0 || i + 1 == w.ops.len() {
            compare_snapshots(&runner.snapshot(), &oracle.snapshot(), i)?;
            runner
                .structural_check()
                .map_err(|e| format!("structural check after op {i}: {e}"))?;
            report.snapshots += 1;
        }
    }
    Ok(report)
}

fn compare_snapshots(got: &[Vec<Key>], want: &[Vec<Key>], op: usize) -> Result<(), String> {
    if got != want {
        for (g, w) in got.iter().zip(want) {
            if g != w {
                return Err(format!(
                    "content divergence after op {op}: set starting at {} holds {:?}, oracle says {:?}",
                    g.first().copied().unwrap_or(0),
                    &g[..g.len().min(8)],
                    &w[..w.len().min(8)]
                ));
            }
        }
        return Err(format!(
            "content divergence after op {op}: {} sets vs oracle's {}",
            got.len(),
            want.len()
        ));
    }
    Ok(())
}

// ----- bench ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub op_index: usize,
    pub op_type: &'static str,
    pub segments: u32,
    pub levels_touched: u64,
    pub promotions: u64,
    pub demotions: u64,
    pub phi_before: Option<f64>,
    pub phi_after: Option<f64>,
    pub wall_ns: u128,
}

impl BenchRow {
    pub fn work_units(&self) -> u64 {
        self.levels_touched + self.promotions + self.demotions
    }

    pub fn to_csv(&self) -> String {
        let phi = |v: Option<f64>| v.map_or(String::new(), |p| format!("{p:.9}"));
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.op_index,
            self.op_type,
            self.segments,
            self.levels_touched,
            self.promotions,
            self.demotions,
            phi(self.phi_before),
            phi(self.phi_after),
            self.wall_ns
        )
    }
}

/// Replays the workload without the oracle, recording one metrics row per
/// operation (including the member-key set resolution each op performs).
pub fn bench(w: &Workload, which: WhichImpl) -> Vec<BenchRow> {
    let mut runner = runner_for(which, w.n);
    let mut rows = Vec::with_capacity(w.ops.len());
    for (i, op) in w.ops.iter().enumerate() {
        let phi_before = runner.potential();
        let before = runner.metrics();
        let start = Instant::now();
        let (op_type, segments) = match *op {
            Op::Find { k } => {
                runner.find_max(k);
                ("find", 0)
            }
            Op::Search { k, x } => {
                runner.search_key(k, x);
                ("search", 0)
            }
            Op::Split { k, x } => {
                runner.split_at(k, x);
                ("split", 0)
            }
            Op::Union { k1, k2 } => {
                let performed = runner.union_keys(k1, k2);
                ("union", if performed { runner.last_segments() } else { 0 })
            }
        };
        let wall_ns = start.elapsed().as_nanos();
        let delta = runner.metrics().since(&before);
        rows.push(BenchRow {
            op_index: i,
            op_type,
            segments,
            levels_touched: delta.levels_touched,
            promotions: delta.promotions,
            demotions: delta.demotions,
            phi_before,
            phi_after: runner.potential(),
            wall_ns,
        });
    }
    rows
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.to_csv())?;
    }
    Ok(())
}

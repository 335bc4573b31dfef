//! Differential tests: replay identical operation streams on the real
//! dictionary, the baseline, and the brute-force oracle, comparing every
//! observable result, the full partition, the stored weights and the
//! potential at each step.

use mdict::baseline::BaselineCollection;
use mdict::dict::Collection;
use mdict::oracle::OracleCollection;
use mdict::Key;
use proptest::prelude::*;

#[derive(Clone, Debug)]
enum Op {
    Find { k: Key },
    Search { k: Key, x: Key },
    Split { k: Key, x: Key },
    Union { k1: Key, k2: Key },
}

fn op_strategy(n: Key) -> impl Strategy<Value = Op> {
    prop_oneof![
        1 => (1..=n).prop_map(|k| Op::Find { k }),
        2 => (1..=n, 0..=n + 1).prop_map(|(k, x)| Op::Search { k, x }),
        3 => (1..=n, 1..=n).prop_map(|(k, x)| Op::Split { k, x }),
        4 => (1..=n, 1..=n).prop_map(|(k1, k2)| Op::Union { k1, k2 }),
    ]
}

/// Replays `ops` on the dictionary and the oracle in lockstep, checking
/// everything checkable at every step.
fn replay_dict(n: Key, ops: &[Op], paranoid: bool) {
    let mut dict = Collection::new(n).unwrap();
    dict.set_paranoid(paranoid);
    let mut oracle = OracleCollection::new(n);
    for (i, op) in ops.iter().enumerate() {
        match *op {
            Op::Find { k } => {
                let (h, max) = dict.find(k).unwrap();
                let id = oracle.find(k).unwrap();
                let want = oracle.keys_of(id).unwrap();
                assert_eq!(max, *want.last().unwrap(), "find max at op {i}");
                assert_eq!(dict.set_keys(h).unwrap(), want, "find content at op {i}");
            }
            Op::Search { k, x } => {
                let (h, _) = dict.find(k).unwrap();
                let id = oracle.find(k).unwrap();
                assert_eq!(
                    dict.search(h, x).unwrap(),
                    oracle.search(id, x).unwrap(),
                    "search at op {i}"
                );
            }
            Op::Split { k, x } => {
                let (h, _) = dict.find(k).unwrap();
                let id = oracle.find(k).unwrap();
                let phi_before = dict.potential();
                dict.split(h, x).unwrap();
                oracle.split(id, x).unwrap();
                assert!(
                    dict.potential() <= phi_before + 1e-9,
                    "split raised phi at op {i}"
                );
            }
            Op::Union { k1, k2 } => {
                let (h1, _) = dict.find(k1).unwrap();
                let (h2, _) = dict.find(k2).unwrap();
                if h1 == h2 {
                    continue;
                }
                let id1 = oracle.find(k1).unwrap();
                let id2 = oracle.find(k2).unwrap();
                // compare the segment decomposition before merging
                let segs = dict.segments(h1, h2).unwrap();
                let want = oracle.segments(id1, id2).unwrap();
                assert_eq!(segs.len(), want.len(), "segment count at op {i}");
                for (got, expect) in segs.iter().zip(&want) {
                    assert_eq!(got.tag, expect.tag, "segment tag at op {i}");
                    assert_eq!(
                        (got.min, got.max),
                        (expect.min, expect.max),
                        "segment bounds at op {i}"
                    );
                }
                dict.union(h1, h2).unwrap();
                oracle.union(id1, id2).unwrap();
            }
        }
        let phi = dict.potential();
        let phi_oracle = oracle.potential_new();
        assert!(
            (phi - phi_oracle).abs() <= 1e-6 * phi_oracle.max(1.0),
            "potential diverged at op {i}: {phi} vs {phi_oracle}"
        );
        assert!(phi >= 0.0);
    }
    assert_eq!(
        dict.snapshot(),
        oracle.snapshot(),
        "final partitions differ"
    );
    oracle.check_partition();
    // stored weights equal the oracle's gap sums everywhere
    for s in dict.live_sets() {
        let kw = dict.set_key_weights(s).unwrap();
        let id = oracle.find(kw[0].0).unwrap();
        for (k, w) in kw {
            assert_eq!(w, oracle.weight(id, k).unwrap(), "weight of {k}");
        }
    }
    dict.validate().unwrap();
}

fn replay_baseline(n: Key, ops: &[Op]) {
    let mut base = BaselineCollection::new(n).unwrap();
    let mut oracle = OracleCollection::new(n);
    for (i, op) in ops.iter().enumerate() {
        match *op {
            Op::Find { k } => {
                let (_, max) = base.find(k).unwrap();
                let id = oracle.find(k).unwrap();
                assert_eq!(
                    max,
                    *oracle.keys_of(id).unwrap().last().unwrap(),
                    "find at op {i}"
                );
            }
            Op::Search { k, x } => {
                let (h, _) = base.find(k).unwrap();
                let id = oracle.find(k).unwrap();
                assert_eq!(base.search(h, x).unwrap(), oracle.search(id, x).unwrap());
            }
            Op::Split { k, x } => {
                let (h, _) = base.find(k).unwrap();
                let id = oracle.find(k).unwrap();
                base.split(h, x).unwrap();
                oracle.split(id, x).unwrap();
            }
            Op::Union { k1, k2 } => {
                let (h1, _) = base.find(k1).unwrap();
                let (h2, _) = base.find(k2).unwrap();
                if h1 == h2 {
                    continue;
                }
                let id1 = oracle.find(k1).unwrap();
                let id2 = oracle.find(k2).unwrap();
                base.union(h1, h2).unwrap();
                oracle.union(id1, id2).unwrap();
            }
        }
    }
    assert_eq!(
        base.snapshot(),
        oracle.snapshot(),
        "final partitions differ"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn dict_matches_oracle(ops in prop::collection::vec(op_strategy(24), 1..60)) {
        replay_dict(24, &ops, true);
    }

    #[test]
    fn dict_matches_oracle_wider_universe(ops in prop::collection::vec(op_strategy(96), 1..80)) {
        // paranoid off: potentials and final state still fully checked
        replay_dict(96, &ops, false);
    }

    #[test]
    fn baseline_matches_oracle(ops in prop::collection::vec(op_strategy(32), 1..60)) {
        replay_baseline(32, &ops);
    }
}

/// Long deterministic soak at a mid-size universe: a fixed xorshift stream
/// of a few thousand operations with cheap checks every step and full
/// validation periodically.
#[test]
fn deterministic_soak() {
    let n: Key = 128;
    let mut dict = Collection::new(n).unwrap();
    let mut base = BaselineCollection::new(n).unwrap();
    let mut oracle = OracleCollection::new(n);
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut rng = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for i in 0..4000u32 {
        let r = rng();
        let k1 = r % n + 1;
        let k2 = (r >> 20) % n + 1;
        match r % 10 {
            0..=4 => {
                let (h1, _) = dict.find(k1).unwrap();
                let (h2, _) = dict.find(k2).unwrap();
                if h1 == h2 {
                    continue;
                }
                let (b1, _) = base.find(k1).unwrap();
                let (b2, _) = base.find(k2).unwrap();
                dict.union(h1, h2).unwrap();
                base.union(b1, b2).unwrap();
                oracle
                    .union(oracle.find(k1).unwrap(), oracle.find(k2).unwrap())
                    .unwrap();
                let t = dict.last_union_stats().unwrap().segments;
                assert_eq!(t, base.last_union_stats().unwrap().segments);
            }
            5..=7 => {
                let (h1, _) = dict.find(k1).unwrap();
                let (b1, _) = base.find(k1).unwrap();
                dict.split(h1, k2).unwrap();
                base.split(b1, k2).unwrap();
                let id = oracle.find(k1).unwrap();
                oracle.split(id, k2).unwrap();
            }
            8 => {
                let (h1, _) = dict.find(k1).unwrap();
                let id = oracle.find(k1).unwrap();
                assert_eq!(dict.search(h1, k2).unwrap(), oracle.search(id, k2).unwrap());
            }
            _ => {
                let (_, max) = dict.find(k1).unwrap();
                let id = oracle.find(k1).unwrap();
                assert_eq!(max, *oracle.keys_of(id).unwrap().last().unwrap());
            }
        }
        if i % 64 == 0 {
            dict.validate().unwrap();
            assert_eq!(dict.snapshot(), oracle.snapshot(), "divergence at op {i}");
            assert_eq!(
                base.snapshot(),
                oracle.snapshot(),
                "baseline divergence at op {i}"
            );
        }
        let phi = dict.potential();
        let phi_oracle = oracle.potential_new();
        assert!(
            (phi - phi_oracle).abs() <= 1e-6 * phi_oracle.max(1.0),
            "potential diverged at op {i}: {phi} vs {phi_oracle}"
        );
    }
    dict.validate().unwrap();
    assert_eq!(dict.snapshot(), oracle.snapshot());
    assert_eq!(base.snapshot(), oracle.snapshot());
}

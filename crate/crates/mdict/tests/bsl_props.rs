//! Randomized structural tests for the biased skip list: every operation
//! sequence must leave all live lists passing the full audit and agreeing
//! with a plain sorted-vector model.

use mdict::bsl::{Arena, ListId, NodeId};
use mdict::Key;
use proptest::prelude::*;

type Model = Vec<Vec<(Key, u64)>>;

#[derive(Clone, Debug)]
enum Op {
    Split {
        list: usize,
        node: usize,
    },
    Join {
        left: usize,
    },
    Rew {
        list: usize,
        node: usize,
        weight: u64,
    },
    Search {
        list: usize,
        finger: usize,
        target: Key,
    },
}

fn op_strategy() -> impl Strategy<Value = Op> {
    prop_oneof![
        (any::<usize>(), any::<usize>()).prop_map(|(list, node)| Op::Split { list, node }),
        any::<usize>().prop_map(|left| Op::Join { left }),
        (any::<usize>(), any::<usize>(), 2u64..200).prop_map(|(list, node, weight)| Op::Rew {
            list,
            node,
            weight
        }),
        (any::<usize>(), any::<usize>(), 1u64..80).prop_map(|(list, finger, target)| Op::Search {
            list,
            finger,
            target
        }),
    ]
}

fn nth_node(arena: &Arena, list: ListId, mut idx: usize) -> NodeId {
    let mut cur = arena.head(list).unwrap();
    while idx > 0 {
        cur = arena.successor(cur).unwrap();
        idx -= 1;
    }
    cur
}

fn check_all(arena: &Arena, handles: &[ListId], model: &Model) {
    assert_eq!(handles.len(), model.len());
    for (h, m) in handles.iter().zip(model) {
        let report = arena.audit(*h);
        assert!(report.is_pass(), "{report}");
        assert_eq!(&arena.contents(*h).unwrap(), m);
    }
}

fn run_ops(initial: &[(Key, u64)], ops: &[Op]) {
    let mut arena = Arena::new();
    let mut handles = vec![arena.build_list(initial).unwrap()];
    let mut model: Model = vec![initial.to_vec()];
    check_all(&arena, &handles, &model);

    for op in ops {
        match *op {
            Op::Split { list, node } => {
                let li = list % handles.len();
                let ni = node % model[li].len();
                let f = nth_node(&arena, handles[li], ni);
                let (a, b) = arena.fsplit(handles[li], f).unwrap();
                if let Some(b) = b {
                    let right = model[li].split_off(ni + 1);
                    handles[li] = a;
                    handles.insert(li + 1, b);
                    model.insert(li + 1, right);
                } else {
                    handles[li] = a;
                }
            }
            Op::Join { left } => {
                if handles.len() < 2 {
                    continue;
                }
                let li = left % (handles.len() - 1);
                let l = arena.tail(handles[li]).unwrap();
                let r = arena.head(handles[li + 1]).unwrap();
                let joined = arena.fjoin(l, r).unwrap();
                let right = model.remove(li + 1);
                model[li].extend(right);
                handles.remove(li + 1);
                handles[li] = joined;
            }
            Op::Rew { list, node, weight } => {
                let li = list % handles.len();
                let ni = node % model[li].len();
                let f = nth_node(&arena, handles[li], ni);
                arena.frew(f, weight).unwrap();
                model[li][ni].1 = weight;
            }
            Op::Search {
                list,
                finger,
                target,
            } => {
                let li = list % handles.len();
                let fi = finger % model[li].len();
                let f = nth_node(&arena, handles[li], fi);
                let got = arena.fsearch(f, target).unwrap().map(|n| arena.key(n));
                let want = model[li]
                    .iter()
                    .map(|&(k, _)| k)
                    .take_while(|&k| k <= target)
                    .last();
                assert_eq!(got, want, "fsearch from index {fi} for {target}");
                let via_top = arena
                    .search(handles[li], target)
                    .unwrap()
                    .map(|n| arena.key(n));
                assert_eq!(via_top, want);
            }
        }
        check_all(&arena, &handles, &model);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(192))]

    #[test]
    fn random_ops_preserve_invariants(
        weights in prop::collection::vec(2u64..200, 1..40),
        ops in prop::collection::vec(op_strategy(), 0..60),
    ) {
        let initial: Vec<(Key, u64)> = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (2 * i as Key + 1, w))
            .collect();
        run_ops(&initial, &ops);
    }

    #[test]
    fn fsplit_fjoin_roundtrip(
        weights in prop::collection::vec(2u64..500, 2..48),
        cut in any::<usize>(),
    ) {
        let initial: Vec<(Key, u64)> = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (3 * i as Key + 2, w))
            .collect();
        let mut arena = Arena::new();
        let list = arena.build_list(&initial).unwrap();
        let before = arena.contents(list).unwrap();
        let f = nth_node(&arena, list, cut % initial.len());
        let (a, b) = arena.fsplit(list, f).unwrap();
        prop_assert!(arena.audit(a).is_pass());
        let joined = match b {
            Some(b) => {
                prop_assert!(arena.audit(b).is_pass());
                let l = arena.tail(a).unwrap();
                let r = arena.head(b).unwrap();
                arena.fjoin(l, r).unwrap()
            }
            None => a,
        };
        // weights and키 order come back exactly
        prop_assert_eq!(arena.contents(joined).unwrap(), before);
        let report = arena.audit(joined);
        prop_assert!(report.is_pass(), "{}", report);
    }

    #[test]
    fn fsearch_matches_model_after_scramble(
        weights in prop::collection::vec(2u64..100, 1..32),
        splits in prop::collection::vec(any::<usize>(), 0..8),
        queries in prop::collection::vec((any::<usize>(), 0u64..120), 1..24),
    ) {
        let initial: Vec<(Key, u64)> = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (4 * i as Key + 3, w))
            .collect();
        let mut arena = Arena::new();
        let mut handles = vec![arena.build_list(&initial).unwrap()];
        let mut model: Model = vec![initial.clone()];
        for s in splits {
            let li = s % handles.len();
            if model[li].len() < 2 { continue; }
            let ni = (s / 7) % (model[li].len() - 1);
            let f = nth_node(&arena, handles[li], ni);
            let (a, b) = arena.fsplit(handles[li], f).unwrap();
            let right = model[li].split_off(ni + 1);
            handles[li] = a;
            handles.insert(li + 1, b.unwrap());
            model.insert(li + 1, right);
        }
        for (sel, x) in queries {
            let li = sel % handles.len();
            let fi = (sel / 3) % model[li].len();
            let f = nth_node(&arena, handles[li], fi);
            let got = arena.fsearch(f, x).unwrap().map(|n| arena.key(n));
            let want = model[li].iter().map(|&(k, _)| k).take_while(|&k| k <= x).last();
            prop_assert_eq!(got, want);
        }
    }
}

#[test]
fn interleaved_heavy_weights_split_join_cycle() {
    // heavier deterministic soak: a long list with mixed weights, split at
    // every position and rejoin, auditing throughout
    let initial: Vec<(Key, u64)> = (0..64)
        .map(|i| (i as Key * 5 + 1, [2u64, 3, 7, 16, 63, 130][i % 6]))
        .collect();
    let mut arena = Arena::new();
    let mut list = arena.build_list(&initial).unwrap();
    for cut in 0..initial.len() {
        let f = nth_node(&arena, list, cut);
        let (a, b) = arena.fsplit(list, f).unwrap();
        assert!(arena.audit(a).is_pass());
        list = match b {
            Some(b) => {
                assert!(arena.audit(b).is_pass());
                let l = arena.tail(a).unwrap();
                let r = arena.head(b).unwrap();
                arena.fjoin(l, r).unwrap()
            }
            None => a,
        };
        let report = arena.audit(list);
        assert!(report.is_pass(), "cut {cut}: {report}");
    }
    assert_eq!(arena.contents(list).unwrap(), initial);
}

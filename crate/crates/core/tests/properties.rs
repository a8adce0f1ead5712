use std::collections::BTreeSet;

use bits_kdtree::{
    brute_force_query, BitsKdTree, Coord, IndexConfig, NaiveKdTree, Point, PointSet, QueryWindow,
    ThreadedTrie, Tree, TrieConfig,
};
use proptest::prelude::*;

const SIDE: Coord = 16;

fn config(k: usize) -> IndexConfig {
    IndexConfig::new(k, 4, 2).unwrap()
}

fn point(k: usize) -> impl Strategy<Value = Vec<Coord>> {
    prop::collection::vec(0..SIDE, k)
}

fn window(k: usize) -> impl Strategy<Value = QueryWindow> {
    prop::collection::vec((0..SIDE, 0..SIDE), k).prop_map(|r| {
        QueryWindow::new(r.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect()).unwrap()
    })
}

#[derive(Clone, Debug)]
enum Op {
    Insert(Vec<Coord>),
    Delete(Vec<Coord>),
}

fn ops(k: usize) -> impl Strategy<Value = Vec<Op>> {
    prop::collection::vec(
        prop_oneof![
            3 => point(k).prop_map(Op::Insert),
            2 => point(k).prop_map(Op::Delete),
        ],
        0..200,
    )
}

fn dims_and_ops() -> impl Strategy<Value = (usize, Vec<Op>)> {
    (1usize..=4).prop_flat_map(|k| (Just(k), ops(k)))
}

fn dims_points_windows() -> impl Strategy<Value = (usize, Vec<Vec<Coord>>, Vec<QueryWindow>)> {
    (1usize..=4).prop_flat_map(|k| {
        (
            Just(k),
            prop::collection::vec(point(k), 0..300),
            prop::collection::vec(window(k), 1..20),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operations_track_a_set_and_keep_invariants((k, ops) in dims_and_ops()) {
        let mut index = BitsKdTree::new(config(k));
        let mut oracle = BTreeSet::new();
        for op in ops {
            match op {
                Op::Insert(p) => prop_assert_eq!(index.insert(&p).unwrap(), oracle.insert(p)),
                Op::Delete(p) => prop_assert_eq!(index.delete(&p).unwrap(), oracle.remove(&p)),
            }
            let v = index.validate_index();
            prop_assert!(v.is_empty(), "{:?}", v);
            prop_assert_eq!(index.len(), oracle.len());
            prop_assert_eq!(index.level(k - 1).len(), index.len());
            for j in 1..k {
                prop_assert!(index.level(j - 1).len() <= index.level(j).len());
            }
        }
        let stored: Vec<Vec<Coord>> = index.points().map(Point::into_inner).collect();
        prop_assert_eq!(stored, oracle.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn queries_match_both_baselines((k, points, windows) in dims_points_windows()) {
        let index = BitsKdTree::build(config(k), points.iter().cloned()).unwrap();
        let set = PointSet::new(points);
        let kd = NaiveKdTree::build(k, &set);
        for w in &windows {
            let (found, stats) = index.window_query(w).unwrap();
            let expected = brute_force_query(&set, w);
            prop_assert_eq!(&found, &expected);
            prop_assert_eq!(&kd.query(w).0, &expected);

            let inner = stats.inner_candidates();
            prop_assert!(stats.trie_lookups <= 1 + inner);
            prop_assert_eq!(stats.cross_links_followed, inner);
            let all: u64 = stats.per_level_candidates.iter().sum();
            prop_assert!(stats.tree_nodes_visited <= all + stats.group_walks);
            prop_assert_eq!(stats.per_level_candidates[k - 1], found.len() as u64);
            if stats.per_level_candidates[0] == 0 {
                prop_assert_eq!(all, 0);
                prop_assert_eq!(stats.cross_links_followed, 0);
            }
        }
    }

    #[test]
    fn wider_windows_never_lose_points(
        points in prop::collection::vec(point(2), 0..200),
        w in window(2),
        grow in prop::collection::vec((0..4u32, 0..4u32), 2),
    ) {
        let index = BitsKdTree::build(config(2), points).unwrap();
        let wider = QueryWindow::new(
            w.ranges()
                .iter()
                .zip(&grow)
                .map(|(&(lo, hi), &(a, b))| (lo.saturating_sub(a), (hi + b).min(SIDE - 1)))
                .collect(),
        )
        .unwrap();
        let (small, _) = index.window_query(&w).unwrap();
        let (large, _) = index.window_query(&wider).unwrap();
        let large: BTreeSet<_> = large.into_iter().collect();
        prop_assert!(small.iter().all(|p| large.contains(p)));
    }

    #[test]
    fn insert_then_delete_is_a_no_op(
        points in prop::collection::vec(point(3), 1..150),
        extra in point(3),
    ) {
        let mut index = BitsKdTree::build(config(3), points).unwrap();
        prop_assume!(!index.contains(&extra).unwrap());
        let keys = |ix: &BitsKdTree| (0..3).map(|l| (ix.level_keys(l), ix.cross_links(l))).collect::<Vec<_>>();
        let before = keys(&index);
        prop_assert!(index.insert(&extra).unwrap());
        prop_assert!(index.delete(&extra).unwrap());
        prop_assert_eq!(keys(&index), before);
        prop_assert!(index.validate_index().is_empty());
    }

    #[test]
    fn trie_successor_matches_sorted_set(
        radix in 2u32..=16,
        width in 1u32..=4,
        raw_keys in prop::collection::vec(any::<u32>(), 0..64),
        raw_probes in prop::collection::vec(any::<u32>(), 1..32),
        removals in prop::collection::vec(any::<prop::sample::Index>(), 0..16),
    ) {
        let config = TrieConfig::new(radix, width).unwrap();
        let u = config.universe();
        let mut trie = ThreadedTrie::new(config);
        let mut oracle = BTreeSet::new();
        for k in raw_keys {
            let k = (k as u64 % u) as Coord;
            if oracle.insert(k) {
                trie.insert(k, k).unwrap();
            }
        }
        for ix in removals {
            if oracle.is_empty() {
                break;
            }
            let k = *oracle.iter().nth(ix.index(oracle.len())).unwrap();
            oracle.remove(&k);
            prop_assert_eq!(trie.delete(k).unwrap(), k);
        }
        prop_assert!(trie.validate().is_empty());
        for x in raw_probes {
            let x = (x as u64 % u) as Coord;
            let mut visits = 0;
            let got = trie.succ_geq_counted(x, &mut visits).map(|d| d.key());
            prop_assert_eq!(got, oracle.range(x..).next().copied());
            prop_assert!(visits <= width as u64);
        }
    }

    #[test]
    fn tree_order_follows_positions(
        positions in prop::collection::vec((any::<prop::sample::Index>(), any::<bool>()), 1..300),
    ) {
        // Insert keys 0, 1000, ... at random spots, always choosing a key
        // that fits between the neighbours.
        let mut tree: Tree<()> = Tree::new(1);
        let mut keys: Vec<Coord> = Vec::new();
        for (ix, delete) in positions {
            if delete && !keys.is_empty() {
                let at = ix.index(keys.len());
                let id = tree.iter().nth(at).unwrap();
                tree.delete_node(id).unwrap();
                keys.remove(at);
            } else {
                let at = ix.index(keys.len() + 1);
                let lo = if at == 0 { 0 } else { keys[at - 1] + 1 };
                let hi = if at == keys.len() { 1 << 30 } else { keys[at] };
                prop_assume!(lo < hi);
                let key = lo + (hi - lo) / 2;
                let pred = if at == 0 {
                    bits_kdtree::NodeId::DUMMY
                } else {
                    tree.iter().nth(at - 1).unwrap()
                };
                tree.insert_after(pred, &[key]).unwrap();
                keys.insert(at, key);
            }
            let v = tree.validate();
            prop_assert!(v.is_empty(), "{:?}", v);
        }
        let walked: Vec<Coord> = tree.iter().map(|id| tree.key(id)[0]).collect();
        prop_assert_eq!(walked, keys);
    }
}

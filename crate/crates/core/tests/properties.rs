mod common;

use graphorder::apps::{compression_cost, greedy_partition, partition_from_order, random_partition, GREEDY_SLACK};
use graphorder::don::soft_label;
use graphorder::policy::{apply_action, default_floor, initial_prob};
use graphorder::{
    expand_permutation, f_score, f_score_graph, go_order, go_order_with, load_edge_list, merge_degree_one, Graph,
    Permutation, SimilarityMatrix, WindowSize,
};
use proptest::prelude::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..=n * 3)
            .prop_map(move |arcs| Graph::from_arcs_lossy(n, arcs.into_iter().filter(|(u, v)| u != v)).unwrap())
    })
}

fn graph_and_order(max_n: usize) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    graph_strategy(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn score_routes_agree((g, order) in graph_and_order(24), w in 1usize..8) {
        let ws = WindowSize::new(w).unwrap();
        let perm = Permutation::new(order.clone()).unwrap();
        let expected = common::naive_f(&g, &order, w);
        prop_assert_eq!(f_score_graph(&g, &perm, ws), expected);
        prop_assert_eq!(f_score(&g, &perm, ws), expected);
        prop_assert_eq!(f_score(&SimilarityMatrix::from_graph(&g), &perm, ws), expected);
    }

    #[test]
    fn score_grows_with_window((g, order) in graph_and_order(20), w in 1usize..6) {
        let perm = Permutation::new(order).unwrap();
        let a = f_score_graph(&g, &perm, WindowSize::new(w).unwrap());
        let b = f_score_graph(&g, &perm, WindowSize::new(w + 1).unwrap());
        prop_assert!(a <= b);
    }

    #[test]
    fn score_is_reversal_invariant((g, order) in graph_and_order(20), w in 1usize..6) {
        let ws = WindowSize::new(w).unwrap();
        let rev: Vec<usize> = order.iter().rev().copied().collect();
        prop_assert_eq!(
            f_score_graph(&g, &Permutation::new(order).unwrap(), ws),
            f_score_graph(&g, &Permutation::new(rev).unwrap(), ws)
        );
    }

    #[test]
    fn incremental_greedy_matches_recompute(g in graph_strategy(30), w in 1usize..7) {
        let ws = WindowSize::new(w).unwrap();
        prop_assert_eq!(go_order(&g, ws), go_order_with(&g, ws));
    }

    #[test]
    fn merged_orderings_expand_consistently(seed in 0u64..1000, core in 2usize..8, leaves in 0usize..8, w in 1usize..5) {
        let g = common::fan_graph(core, leaves, &mut common::rng(seed));
        let (merged, groups) = merge_degree_one(&g);
        prop_assert_eq!(groups.original_n(), g.n());
        let mut rng = common::rng(seed ^ 1);
        let perm = Permutation::new(common::random_order(merged.n(), &mut rng)).unwrap();
        let ws = WindowSize::new(w).unwrap();
        let base = f_score_graph(&g, &expand_permutation(&perm, &groups, 0).unwrap(), ws);
        for s in 1..5 {
            prop_assert_eq!(f_score_graph(&g, &expand_permutation(&perm, &groups, s).unwrap(), ws), base);
        }
    }

    #[test]
    fn soft_labels_are_distributions(g in graph_strategy(16), w in 2usize..5, seed in 0u64..100) {
        prop_assume!(g.n() >= w);
        let set: Vec<usize> = common::random_order(g.n(), &mut common::rng(seed))[..w - 1].to_vec();
        let label = soft_label(&g, &set, g.n());
        prop_assert!((label.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(label.iter().all(|&p| p >= 0.0));
        prop_assert!(set.iter().all(|&v| label[v] == 0.0));
    }

    #[test]
    fn actions_keep_distribution_valid(g in graph_strategy(20), bits in proptest::collection::vec(0u8..2, 20), steps in 1usize..6) {
        let n = g.n();
        let mut s = initial_prob(&g);
        for _ in 0..steps {
            s = apply_action(&s, &bits[..n], 0.2 / n as f64).unwrap();
            prop_assert!((s.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(s.as_slice().iter().all(|&p| p >= default_floor(n)));
        }
    }

    #[test]
    fn partitions_cover_every_edge_once((g, order) in graph_and_order(20), k in 1usize..5, seed in 0u64..50) {
        let m = g.undirected_edges().len();
        let perm = Permutation::new(order).unwrap();
        let mut parts = vec![random_partition(&g, k, seed).unwrap(), greedy_partition(&g, k, GREEDY_SLACK).unwrap()];
        if m >= k {
            let sweep = partition_from_order(&g, &perm, k).unwrap();
            prop_assert!(sweep.part_sizes().iter().all(|&s| s > 0));
            parts.push(sweep);
        }
        for p in &parts {
            prop_assert_eq!(p.edge_count(), m);
            prop_assert_eq!(p.part_sizes().iter().sum::<usize>(), m);
            for (u, v) in g.undirected_edges() {
                prop_assert!(p.part_of(u, v).is_some());
            }
        }
        let cap = ((m.div_ceil(k).max(1) as f64) * (1.0 + GREEDY_SLACK)).ceil() as usize;
        prop_assert!(parts[1].part_sizes().iter().all(|&s| s <= cap));
    }

    #[test]
    fn compression_ratio_in_unit_range((g, order) in graph_and_order(20), b in 1usize..6) {
        let c = compression_cost(&g, &Permutation::new(order).unwrap(), b).unwrap();
        prop_assert!((0.0..=1.0).contains(&c.ratio));
    }

    #[test]
    fn edge_list_round_trip(g in graph_strategy(20)) {
        let back = load_edge_list(&g.to_edge_list()).unwrap().graph;
        prop_assert_eq!(back, g);
    }

    #[test]
    fn permutation_text_round_trip((_, order) in graph_and_order(30)) {
        let p = Permutation::new(order).unwrap();
        prop_assert_eq!(Permutation::parse(&p.to_text()).unwrap(), p);
    }
}

mod common;

use common::dense_rank_oracle;
use rankwalk::data::{Dataset, Rating};
use rankwalk::graph::{build_graph, transition_matrix, GraphConfig};
use rankwalk::ranker::SolverConfig;
use rankwalk::recommend::group_recommend;
use std::collections::BTreeMap;

/// Ten items in two taste clusters. Users 1 and 2 have disjoint high-rated
/// clusters; users 3 and 4 connect the remaining items of each cluster.
fn two_cluster_dataset() -> Dataset {
    let mut ratings = Vec::new();
    let mut add = |user: u32, item: u32, value: f64| {
        ratings.push(Rating { user, item, value });
    };
    // cluster A: items 0..5, cluster B: items 5..10
    for item in 0..3 {
        add(1, item, 5.0);
    }
    for item in 5..8 {
        add(2, item, 5.0);
    }
    // users 3 and 4 rate their cluster's remaining items unevenly, so the
    // candidates (3, 4, 8, 9) get distinct scores: the strong item of each
    // cluster (3, 8) outranks the weak one of either (4, 9)
    for item in 0..5 {
        add(3, item, match item {
            3 => 5.0,
            4 => 4.0,
            _ => 3.0,
        });
    }
    for item in 5..10 {
        add(4, item, match item {
            8 => 5.0,
            9 => 4.0,
            _ => 3.0,
        });
    }
    Dataset::new(
        ratings,
        Vec::new(),
        BTreeMap::new(),
        Vec::new(),
        BTreeMap::new(),
        Vec::new(),
    )
    .unwrap()
}

#[test]
fn group_list_interleaves_both_clusters_and_matches_oracle() {
    let dataset = two_cluster_dataset();
    let graph = build_graph(&dataset, GraphConfig::cf_only()).unwrap();
    let matrix = transition_matrix(&graph);
    let config = SolverConfig {
        beta: 0.85,
        epsilon: 1e-13,
        max_iter: 5000,
    };

    let list = group_recommend(&graph, &matrix, &dataset, &[1, 2], 10, &config).unwrap();

    // candidates: items rated by neither member, two per cluster
    let candidate_items: Vec<u32> = list.entries.iter().map(|&(item, _)| item).collect();
    assert_eq!(candidate_items.len(), 4);
    let head_has_a = candidate_items[..2].iter().any(|&i| i < 5);
    let head_has_b = candidate_items[..2].iter().any(|&i| i >= 5);
    assert!(head_has_a && head_has_b, "got {candidate_items:?}");

    // exact fixed point from the dense oracle
    let v = graph.node_count();
    let columns: Vec<Vec<(usize, f64)>> = (0..v).map(|j| matrix.column(j).to_vec()).collect();
    let mut theta = vec![0.0; v];
    theta[graph.user_node(1).unwrap().0] = 0.5;
    theta[graph.user_node(2).unwrap().0] = 0.5;
    let oracle = dense_rank_oracle(&columns, &theta, config.beta);
    for &(item, score) in &list.entries {
        let node = graph.item_node(item).unwrap();
        assert!(
            (score - oracle[node.0]).abs() < 1e-8,
            "item {item}: {score} vs {}",
            oracle[node.0]
        );
    }

    // oracle ordering agrees with the produced ordering
    let mut by_oracle = candidate_items.clone();
    by_oracle.sort_by(|&a, &b| {
        let sa = oracle[graph.item_node(a).unwrap().0];
        let sb = oracle[graph.item_node(b).unwrap().0];
        sb.partial_cmp(&sa).unwrap().then(a.cmp(&b))
    });
    assert_eq!(candidate_items, by_oracle);
}

#[test]
fn group_with_k_zero_is_empty() {
    let dataset = two_cluster_dataset();
    let graph = build_graph(&dataset, GraphConfig::cf_only()).unwrap();
    let matrix = transition_matrix(&graph);
    let config = SolverConfig::default();
    let list = group_recommend(&graph, &matrix, &dataset, &[1], 0, &config).unwrap();
    assert!(list.entries.is_empty());
}

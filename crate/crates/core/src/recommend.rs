//! Ranked item lists and rating predictions from a rank vector.
//!
//! Three surfaces: the direct method (sort unrated items by rank score),
//! user-based prediction (rank-weighted deviations of other users' ratings)
//! and item-based prediction (rank-weighted mean of the target's own
//! ratings).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, RATING_MAX, RATING_MIN};
use crate::graph::RecGraph;
use crate::ranker::{solve_rank, PersonalizationVector, RankError, RankVector, SolverConfig};
use crate::graph::TransitionMatrix;

/// Top-k item list for one target, sorted by score descending, ties broken
/// by ascending item id. Never contains an excluded (already rated) item.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedList {
    pub entries: Vec<(u32, f64)>,
    pub excluded: BTreeSet<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredictionMethod {
    UserBased,
    ItemBased,
}

impl PredictionMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            PredictionMethod::UserBased => "user-based",
            PredictionMethod::ItemBased => "item-based",
        }
    }
}

/// A numeric rating estimate. `fallback_used` marks predictions where the
/// weighted formula was undefined and a mean-based default was substituted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub user: u32,
    pub item: u32,
    pub value: f64,
    pub method: PredictionMethod,
    pub fallback_used: bool,
}

fn clamp_rating(value: f64) -> f64 {
    value.clamp(RATING_MIN, RATING_MAX)
}

/// Sorts candidate `(item, score)` pairs into canonical recommendation
/// order: score descending, then item id ascending.
pub fn sort_candidates(candidates: &mut [(u32, f64)]) {
    candidates.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
}

/// Top-k unrated items by rank score. When fewer than `k` candidates exist,
/// all of them are returned.
pub fn direct_recommend(
    graph: &RecGraph,
    rank: &RankVector,
    target_rated: &BTreeSet<u32>,
    k: usize,
) -> RankedList {
    let mut candidates: Vec<(u32, f64)> = graph
        .item_nodes()
        .map(|node| (graph.external_id(node), rank.score(node)))
        .filter(|(item, _)| !target_rated.contains(item))
        .collect();
    sort_candidates(&mut candidates);
    candidates.truncate(k);
    RankedList {
        entries: candidates,
        excluded: target_rated.clone(),
    }
}

/// Rank-weighted user-based prediction for `item`.
///
/// `raters` lists `(s_x, r_xi, mean_x)` over the users who rated the item.
/// Falls back to `target_mean` when the weight mass is zero.
pub fn predict_user_based(
    user: u32,
    item: u32,
    target_mean: f64,
    raters: &[(f64, f64, f64)],
) -> Prediction {
    let weight: f64 = raters.iter().map(|&(s, _, _)| s).sum();
    let (value, fallback) = if raters.is_empty() || weight <= 0.0 {
        (target_mean, true)
    } else {
        let deviation: f64 = raters.iter().map(|&(s, r, mean)| s * (r - mean)).sum();
        (deviation / weight + target_mean, false)
    };
    Prediction {
        user,
        item,
        value: clamp_rating(value),
        method: PredictionMethod::UserBased,
        fallback_used: fallback,
    }
}

/// Rank-weighted item-based prediction: weighted mean of the target's own
/// ratings `(s_j, r_uj)`. Falls back to `global_mean` on zero weight mass.
pub fn predict_item_based(
    user: u32,
    item: u32,
    global_mean: f64,
    target_ratings: &[(f64, f64)],
) -> Prediction {
    let weight: f64 = target_ratings.iter().map(|&(s, _)| s).sum();
    let (value, fallback) = if target_ratings.is_empty() || weight <= 0.0 {
        (global_mean, true)
    } else {
        let total: f64 = target_ratings.iter().map(|&(s, r)| s * r).sum();
        (total / weight, false)
    };
    Prediction {
        user,
        item,
        value: clamp_rating(value),
        method: PredictionMethod::ItemBased,
        fallback_used: fallback,
    }
}

/// Solves the rank for one user and returns the top-k list excluding the
/// user's rated items.
pub fn recommend_for_user(
    graph: &RecGraph,
    matrix: &TransitionMatrix,
    dataset: &Dataset,
    user: u32,
    k: usize,
    solver: &SolverConfig,
) -> Result<RankedList, RankError> {
    let node = graph
        .user_node(user)
        .ok_or_else(|| RankError::Invalid(format!("unknown user id {user}")))?;
    let theta = PersonalizationVector::for_user(graph, node)?;
    let rank = solve_rank(matrix, &theta, solver)?;
    let rated: BTreeSet<u32> = dataset.user_ratings(user).iter().map(|r| r.item).collect();
    Ok(direct_recommend(graph, &rank, &rated, k))
}

/// Group recommendation: rank under the uniform group personalization and
/// exclude the union of the members' rated items.
pub fn group_recommend(
    graph: &RecGraph,
    matrix: &TransitionMatrix,
    dataset: &Dataset,
    members: &[u32],
    k: usize,
    solver: &SolverConfig,
) -> Result<RankedList, RankError> {
    if members.is_empty() {
        return Err(RankError::Invalid("empty group".into()));
    }
    let nodes: Vec<_> = members
        .iter()
        .map(|&u| {
            graph
                .user_node(u)
                .ok_or_else(|| RankError::Invalid(format!("unknown user id {u}")))
        })
        .collect::<Result<_, _>>()?;
    let theta = PersonalizationVector::for_group(graph, &nodes)?;
    let rank = solve_rank(matrix, &theta, solver)?;
    let rated: BTreeSet<u32> = members
        .iter()
        .flat_map(|&u| dataset.user_ratings(u).iter().map(|r| r.item))
        .collect();
    Ok(direct_recommend(graph, &rank, &rated, k))
}

/// Prediction convenience over a solved rank: user-based weighted deviation.
pub fn predict_user_based_from_rank(
    graph: &RecGraph,
    rank: &RankVector,
    dataset: &Dataset,
    user: u32,
    item: u32,
) -> Prediction {
    let target_mean = dataset
        .user_mean(user)
        .unwrap_or_else(|| dataset.global_mean());
    let raters: Vec<(f64, f64, f64)> = dataset
        .item_raters(item)
        .into_iter()
        .filter(|&(x, _)| x != user)
        .filter_map(|(x, r_xi)| {
            let node = graph.user_node(x)?;
            let mean_x = dataset.user_mean(x)?;
            Some((rank.score(node), r_xi, mean_x))
        })
        .collect();
    predict_user_based(user, item, target_mean, &raters)
}

/// Prediction convenience over a solved rank: item-based.
pub fn predict_item_based_from_rank(
    graph: &RecGraph,
    rank: &RankVector,
    dataset: &Dataset,
    user: u32,
    item: u32,
) -> Prediction {
    let target_ratings: Vec<(f64, f64)> = dataset
        .user_ratings(user)
        .iter()
        .filter_map(|r| {
            let node = graph.item_node(r.item)?;
            Some((rank.score(node), r.value))
        })
        .collect();
    predict_item_based(user, item, dataset.global_mean(), &target_ratings)
}

//! Evaluation protocol: recall@k curves and percentile scores over warm
//! k-fold and cold-start splits, for any registered ranking method.
//!
//! Relevance judgments are the held-out maximum-scale (5-star) ratings. The
//! candidate set for a user is every item they have not rated in train, so
//! held-out items always have a rank position. Recall curves are truncated
//! at the protocol list length; percentile uses the full candidate ranking.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{
    build_item_graph, commute_kernel, commute_rank, itemrank_scores, BaselineError, CommuteKernel,
    ItemGraph,
};
use crate::data::{split_cold, split_warm, DataError, Dataset, Split, SplitMode, RATING_MAX};
use crate::graph::{build_graph, transition_matrix, GraphConfig, GraphError, RecGraph,
    TransitionMatrix};
use crate::ranker::{solve_rank, PersonalizationVector, RankError, SolverConfig};
use crate::recommend::sort_candidates;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("recall is undefined: empty relevant test set")]
    UndefinedMetric,
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
}

/// Registered method names accepted by [`method_by_name`].
pub const METHOD_NAMES: [&str; 4] = ["userrank-cf", "userrank-social", "itemrank", "lplus"];

/// Split protocol for an experiment run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProtocolMode {
    /// k-fold cross validation over rating records.
    Warm { folds: usize },
    /// Repeated cold-user splits: `seeds` runs with seeds `seed..seed+seeds`.
    Cold { fraction: f64, seeds: usize },
}

/// Full experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub mode: ProtocolMode,
    /// k values of the recall curve; values above `list_length` are capped.
    pub k_grid: Vec<usize>,
    /// Recommendation list length for recall (e.g. 900 MovieLens, 500
    /// Epinions).
    pub list_length: usize,
    pub seed: u64,
    pub solver: SolverConfig,
}

impl Protocol {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.k_grid.is_empty() || self.k_grid.contains(&0) {
            return Err(EvalError::Invalid("k_grid must be non-empty positive".into()));
        }
        if self.list_length == 0 {
            return Err(EvalError::Invalid("list_length must be positive".into()));
        }
        if let ProtocolMode::Cold { fraction, seeds } = self.mode {
            if !(0.0 < fraction && fraction < 1.0) {
                return Err(EvalError::Invalid("cold fraction must be in (0,1)".into()));
            }
            if seeds == 0 {
                return Err(EvalError::Invalid("cold seeds must be positive".into()));
            }
        }
        self.solver.validate()?;
        Ok(())
    }
}

/// Full candidate ranking for one user, or a signal that the user has no
/// path into the method's graph.
pub enum Ranking {
    /// All unrated candidate items, best first.
    Ranked(Vec<u32>),
    /// User unreachable: the caller substitutes the popularity ranking.
    Disconnected,
}

/// A method fitted on one training split.
pub trait FittedMethod: Sync {
    fn rank_candidates(&self, user: u32) -> Result<Ranking, EvalError>;
}

/// A ranking method that can be fitted on a training split.
pub trait Method: Sync {
    fn name(&self) -> &str;
    /// Whether the method participates in cold-start runs.
    fn supports_cold(&self) -> bool {
        true
    }
    fn fit<'a>(
        &self,
        train: &'a Dataset,
        solver: &SolverConfig,
    ) -> Result<Box<dyn FittedMethod + 'a>, EvalError>;
}

/// Resolves a registered method name.
pub fn method_by_name(name: &str) -> Result<Box<dyn Method>, EvalError> {
    match name {
        "userrank-cf" => Ok(Box::new(UserRankMethod {
            name: "userrank-cf",
            config: GraphConfig::cf_only(),
        })),
        "userrank-social" => Ok(Box::new(UserRankMethod {
            name: "userrank-social",
            config: GraphConfig::hybrid(),
        })),
        "itemrank" => Ok(Box::new(ItemRankMethod)),
        "lplus" => Ok(Box::new(LPlusMethod)),
        other => Err(EvalError::Invalid(format!(
            "unknown method {other:?}; registered methods: {}",
            METHOD_NAMES.join(", ")
        ))),
    }
}

/// Personalized random walk on the recommendation graph, with a configurable
/// edge ablation.
pub struct UserRankMethod {
    pub name: &'static str,
    pub config: GraphConfig,
}

struct FittedUserRank<'a> {
    train: &'a Dataset,
    graph: RecGraph,
    matrix: TransitionMatrix,
    solver: SolverConfig,
}

impl Method for UserRankMethod {
    fn name(&self) -> &str {
        self.name
    }

    fn fit<'a>(
        &self,
        train: &'a Dataset,
        solver: &SolverConfig,
    ) -> Result<Box<dyn FittedMethod + 'a>, EvalError> {
        let graph = build_graph(train, self.config)?;
        let matrix = transition_matrix(&graph);
        Ok(Box::new(FittedUserRank {
            train,
            graph,
            matrix,
            solver: *solver,
        }))
    }
}

impl FittedMethod for FittedUserRank<'_> {
    fn rank_candidates(&self, user: u32) -> Result<Ranking, EvalError> {
        let node = self
            .graph
            .user_node(user)
            .ok_or_else(|| EvalError::Invalid(format!("unknown user {user}")))?;
        let theta = PersonalizationVector::for_user(&self.graph, node)?;
        let rank = solve_rank(&self.matrix, &theta, &self.solver)?;
        let rated: BTreeSet<u32> = self
            .train
            .user_ratings(user)
            .iter()
            .map(|r| r.item)
            .collect();
        let mut candidates: Vec<(u32, f64)> = self
            .graph
            .item_nodes()
            .map(|n| (self.graph.external_id(n), rank.score(n)))
            .filter(|(item, _)| !rated.contains(item))
            .collect();
        if candidates.iter().all(|&(_, s)| s == 0.0) {
            return Ok(Ranking::Disconnected);
        }
        sort_candidates(&mut candidates);
        Ok(Ranking::Ranked(candidates.into_iter().map(|(i, _)| i).collect()))
    }
}

/// Random walk on the co-rating item graph, personalized by the target's
/// training ratings.
pub struct ItemRankMethod;

struct FittedItemRank<'a> {
    train: &'a Dataset,
    item_graph: ItemGraph,
    solver: SolverConfig,
}

impl Method for ItemRankMethod {
    fn name(&self) -> &str {
        "itemrank"
    }

    fn fit<'a>(
        &self,
        train: &'a Dataset,
        solver: &SolverConfig,
    ) -> Result<Box<dyn FittedMethod + 'a>, EvalError> {
        Ok(Box::new(FittedItemRank {
            train,
            item_graph: build_item_graph(train)?,
            solver: *solver,
        }))
    }
}

impl FittedMethod for FittedItemRank<'_> {
    fn rank_candidates(&self, user: u32) -> Result<Ranking, EvalError> {
        let history: Vec<(u32, f64)> = self
            .train
            .user_ratings(user)
            .iter()
            .map(|r| (r.item, r.value))
            .collect();
        let rated: BTreeSet<u32> = history.iter().map(|&(i, _)| i).collect();
        let mut scores = itemrank_scores(&self.item_graph, &history, &self.solver)?;
        scores.retain(|(item, _)| !rated.contains(item));
        sort_candidates(&mut scores);
        Ok(Ranking::Ranked(scores.into_iter().map(|(i, _)| i).collect()))
    }
}

/// Average commute time on the unit-weight user-item bipartite graph,
/// ascending. Dense kernel; warm-start runs only.
pub struct LPlusMethod;

struct FittedLPlus<'a> {
    train: &'a Dataset,
    kernel: CommuteKernel,
}

impl Method for LPlusMethod {
    fn name(&self) -> &str {
        "lplus"
    }

    fn supports_cold(&self) -> bool {
        false
    }

    fn fit<'a>(
        &self,
        train: &'a Dataset,
        _solver: &SolverConfig,
    ) -> Result<Box<dyn FittedMethod + 'a>, EvalError> {
        Ok(Box::new(FittedLPlus {
            train,
            kernel: commute_kernel(train)?,
        }))
    }
}

impl FittedMethod for FittedLPlus<'_> {
    fn rank_candidates(&self, user: u32) -> Result<Ranking, EvalError> {
        let ranking = commute_rank(&self.kernel, self.train, user)?;
        if ranking.fallback_used {
            Ok(Ranking::Disconnected)
        } else {
            Ok(Ranking::Ranked(ranking.items))
        }
    }
}

/// The relevance judgments of a split: held-out records with the maximum
/// rating.
pub fn relevant_test_set(split: &Split) -> Vec<(u32, u32)> {
    split
        .test
        .iter()
        .filter(|r| r.value == RATING_MAX)
        .map(|r| (r.user, r.item))
        .collect()
}

/// `recall(k)`: total top-k hits over all users divided by the total number
/// of relevant test records `T`.
pub fn recall_at_k(
    recommended: &BTreeMap<u32, Vec<u32>>,
    relevant: &BTreeMap<u32, BTreeSet<u32>>,
    k: usize,
) -> Result<f64, EvalError> {
    let total: usize = relevant.values().map(BTreeSet::len).sum();
    if total == 0 {
        return Err(EvalError::UndefinedMetric);
    }
    if k == 0 {
        return Err(EvalError::Invalid("k must be >= 1".into()));
    }
    let mut hits = 0usize;
    for (user, items) in relevant {
        if let Some(list) = recommended.get(user) {
            hits += list
                .iter()
                .take(k)
                .filter(|item| items.contains(item))
                .count();
        }
    }
    Ok(hits as f64 / total as f64)
}

/// Mean relative rank of the test items: average of `position / list_length`
/// with 1-based positions.
pub fn percentile_score(positions: &[(usize, usize)]) -> f64 {
    if positions.is_empty() {
        return f64::NAN;
    }
    positions
        .iter()
        .map(|&(pos, len)| pos as f64 / len as f64)
        .sum::<f64>()
        / positions.len() as f64
}

/// Per-user percentile distribution summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentileSummary {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl PercentileSummary {
    fn from_values(mut values: Vec<f64>) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Some(Self {
            min: values[0],
            median: values[values.len() / 2],
            max: values[values.len() - 1],
        })
    }
}

/// Metrics of one method on one fold/seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub label: String,
    pub error: Option<String>,
    pub warning: Option<String>,
    /// Raw held-out rating records.
    pub test_records: usize,
    /// Relevant (maximum-rating) records: the recall denominator `T`.
    pub relevant_records: usize,
    pub evaluated_users: usize,
    pub disconnected_users: usize,
    pub recall_curve: Vec<(usize, f64)>,
    pub mean_percentile: Option<f64>,
    pub per_user_percentile: Option<PercentileSummary>,
}

/// One method's results over all folds/seeds of a run, with fold means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub mode: String,
    pub folds: Vec<FoldReport>,
    /// Arithmetic mean over successful folds.
    pub mean_recall_curve: Vec<(usize, f64)>,
    pub mean_percentile: Option<f64>,
    pub failed_folds: usize,
}

fn make_splits(dataset: &Dataset, protocol: &Protocol) -> Result<Vec<Split>, EvalError> {
    match protocol.mode {
        ProtocolMode::Warm { folds } => Ok(split_warm(dataset, folds, protocol.seed)?),
        ProtocolMode::Cold { fraction, seeds } => (0..seeds)
            .map(|offset| Ok(split_cold(dataset, fraction, protocol.seed + offset as u64)?))
            .collect(),
    }
}

fn split_label(split: &Split) -> String {
    match split.mode {
        SplitMode::WarmFold(fold) => format!("fold{fold}"),
        SplitMode::ColdStart => format!("seed{}", split.seed),
    }
}

struct UserOutcome {
    positions: Vec<(usize, usize)>,
    ranking: Vec<u32>,
    disconnected: bool,
}

fn evaluate_fold(
    method: &dyn Method,
    split: &Split,
    protocol: &Protocol,
) -> Result<FoldReport, EvalError> {
    let label = split_label(split);
    let mut relevant: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    for (user, item) in relevant_test_set(split) {
        relevant.entry(user).or_default().insert(item);
    }
    let relevant_records: usize = relevant.values().map(BTreeSet::len).sum();

    if relevant_records == 0 {
        return Ok(FoldReport {
            label,
            error: None,
            warning: Some("no maximum-rating records in the test set".into()),
            test_records: split.test.len(),
            relevant_records: 0,
            evaluated_users: 0,
            disconnected_users: 0,
            recall_curve: Vec::new(),
            mean_percentile: None,
            per_user_percentile: None,
        });
    }

    let fitted = method.fit(&split.train, &protocol.solver)?;
    let popularity = split.train.items_by_popularity();

    let users: Vec<u32> = relevant.keys().copied().collect();
    let outcomes: Vec<Result<UserOutcome, EvalError>> = users
        .par_iter()
        .map(|&user| {
            let rated: BTreeSet<u32> = split
                .train
                .user_ratings(user)
                .iter()
                .map(|r| r.item)
                .collect();
            let (ranking, disconnected) = match fitted.rank_candidates(user)? {
                Ranking::Ranked(items) => (items, false),
                Ranking::Disconnected => {
                    let items: Vec<u32> = popularity
                        .iter()
                        .copied()
                        .filter(|i| !rated.contains(i))
                        .collect();
                    (items, true)
                }
            };
            let len = ranking.len();
            let wanted = &relevant[&user];
            let positions: Vec<(usize, usize)> = ranking
                .iter()
                .enumerate()
                .filter(|(_, item)| wanted.contains(item))
                .map(|(idx, _)| (idx + 1, len))
                .collect();
            if positions.len() != wanted.len() {
                return Err(EvalError::Invalid(format!(
                    "method {} ranked {} of {} held-out items for user {user}; \
                     methods must rank every unrated candidate",
                    method.name(),
                    positions.len(),
                    wanted.len()
                )));
            }
            Ok(UserOutcome {
                positions,
                ranking,
                disconnected,
            })
        })
        .collect();

    let mut recommended: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    let mut positions: Vec<(usize, usize)> = Vec::new();
    let mut per_user: Vec<f64> = Vec::new();
    let mut disconnected_users = 0usize;
    for (user, outcome) in users.iter().zip(outcomes) {
        let outcome = outcome?;
        per_user.push(percentile_score(&outcome.positions));
        positions.extend_from_slice(&outcome.positions);
        if outcome.disconnected {
            disconnected_users += 1;
        }
        recommended.insert(*user, outcome.ranking);
    }

    let mut recall_curve = Vec::with_capacity(protocol.k_grid.len());
    for &k in &protocol.k_grid {
        let k = k.min(protocol.list_length);
        recall_curve.push((k, recall_at_k(&recommended, &relevant, k)?));
    }

    Ok(FoldReport {
        label,
        error: None,
        warning: None,
        test_records: split.test.len(),
        relevant_records,
        evaluated_users: users.len(),
        disconnected_users,
        recall_curve,
        mean_percentile: Some(percentile_score(&positions)),
        per_user_percentile: PercentileSummary::from_values(per_user),
    })
}

/// Runs every method over every split of the protocol. A method failure on
/// one fold marks that fold failed and the run continues.
pub fn run_experiment(
    dataset: &Dataset,
    methods: &[Box<dyn Method>],
    protocol: &Protocol,
) -> Result<Vec<EvalReport>, EvalError> {
    protocol.validate()?;
    if methods.is_empty() {
        return Err(EvalError::Invalid("no methods given".into()));
    }
    if matches!(protocol.mode, ProtocolMode::Cold { .. }) {
        if let Some(m) = methods.iter().find(|m| !m.supports_cold()) {
            return Err(EvalError::Invalid(format!(
                "method {:?} does not support cold-start evaluation",
                m.name()
            )));
        }
    }
    let splits = make_splits(dataset, protocol)?;
    let mode = match protocol.mode {
        ProtocolMode::Warm { .. } => "warm",
        ProtocolMode::Cold { .. } => "cold",
    };

    let mut reports = Vec::with_capacity(methods.len());
    for method in methods {
        let mut folds = Vec::with_capacity(splits.len());
        for split in &splits {
            match evaluate_fold(method.as_ref(), split, protocol) {
                Ok(report) => folds.push(report),
                Err(err) => folds.push(FoldReport {
                    label: split_label(split),
                    error: Some(err.to_string()),
                    warning: None,
                    test_records: split.test.len(),
                    relevant_records: 0,
                    evaluated_users: 0,
                    disconnected_users: 0,
                    recall_curve: Vec::new(),
                    mean_percentile: None,
                    per_user_percentile: None,
                }),
            }
        }

        let ok: Vec<&FoldReport> = folds
            .iter()
            .filter(|f| f.error.is_none() && f.mean_percentile.is_some())
            .collect();
        let mean_recall_curve = if ok.is_empty() {
            Vec::new()
        } else {
            let mut curve = Vec::new();
            for (idx, &(k, _)) in ok[0].recall_curve.iter().enumerate() {
                let mean = ok
                    .iter()
                    .map(|f| f.recall_curve[idx].1)
                    .sum::<f64>()
                    / ok.len() as f64;
                curve.push((k, mean));
            }
            curve
        };
        let mean_percentile = if ok.is_empty() {
            None
        } else {
            Some(ok.iter().map(|f| f.mean_percentile.unwrap()).sum::<f64>() / ok.len() as f64)
        };

        reports.push(EvalReport {
            method: method.name().to_string(),
            mode: mode.to_string(),
            failed_folds: folds.iter().filter(|f| f.error.is_some()).count(),
            folds,
            mean_recall_curve,
            mean_percentile,
        });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Rating;
    use approx::assert_relative_eq;
    use std::collections::BTreeMap as Map;

    #[test]
    fn relevant_test_set_filters_five_stars() {
        let ds = Dataset::new(
            vec![
                Rating { user: 1, item: 10, value: 5.0 },
                Rating { user: 1, item: 11, value: 4.0 },
                Rating { user: 2, item: 10, value: 5.0 },
            ],
            vec![],
            Map::new(),
            vec![],
            Map::new(),
            vec![],
        )
        .unwrap();
        let split = Split {
            train: ds.clone(),
            test: ds.ratings().to_vec(),
            mode: SplitMode::WarmFold(0),
            seed: 0,
        };
        assert_eq!(relevant_test_set(&split), vec![(1, 10), (2, 10)]);
    }

    #[test]
    fn recall_examples() {
        // one user, top-3 list contains 1 of 2 relevant items
        let recommended = BTreeMap::from([(1u32, vec![10u32, 11, 12, 13])]);
        let relevant = BTreeMap::from([(1u32, BTreeSet::from([10u32, 99]))]);
        assert_relative_eq!(recall_at_k(&recommended, &relevant, 3).unwrap(), 0.5);
        // k covering everything with all relevant ranked
        let relevant = BTreeMap::from([(1u32, BTreeSet::from([10u32, 13]))]);
        assert_relative_eq!(recall_at_k(&recommended, &relevant, 10).unwrap(), 1.0);
        // two users, hits 1 and 0, T = 2
        let recommended = BTreeMap::from([(1u32, vec![10u32]), (2, vec![20])]);
        let relevant = BTreeMap::from([
            (1u32, BTreeSet::from([10u32])),
            (2, BTreeSet::from([99u32])),
        ]);
        assert_relative_eq!(recall_at_k(&recommended, &relevant, 1).unwrap(), 0.5);
    }

    #[test]
    fn recall_undefined_on_empty_relevant() {
        let recommended = BTreeMap::from([(1u32, vec![10u32])]);
        assert!(matches!(
            recall_at_k(&recommended, &BTreeMap::new(), 1),
            Err(EvalError::UndefinedMetric)
        ));
    }

    #[test]
    fn recall_monotone_in_k() {
        let recommended = BTreeMap::from([(1u32, vec![5u32, 4, 3, 2, 1])]);
        let relevant = BTreeMap::from([(1u32, BTreeSet::from([1u32, 3]))]);
        let mut prev = 0.0;
        for k in 1..=5 {
            let r = recall_at_k(&recommended, &relevant, k).unwrap();
            assert!(r >= prev);
            prev = r;
        }
        assert_relative_eq!(prev, 1.0);
    }

    #[test]
    fn percentile_worked_example() {
        // positions 1, 9, 10, 20 in a 100-item list
        let positions = [(1, 100), (9, 100), (10, 100), (20, 100)];
        assert_relative_eq!(percentile_score(&positions), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn percentile_edge_cases() {
        assert_relative_eq!(percentile_score(&[(1, 10)]), 0.1, epsilon = 1e-12);
        assert_relative_eq!(percentile_score(&[(7, 7)]), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn percentile_invariant_below_lowest_test_item() {
        // positions only depend on test-item ranks, so permuting non-test
        // items below the lowest one cannot change the inputs
        let base = [(2, 50), (10, 50)];
        let permuted = [(2, 50), (10, 50)];
        assert_eq!(percentile_score(&base), percentile_score(&permuted));
    }

    fn toy_dataset() -> Dataset {
        // 4 users, 6 items, clustered tastes
        let ratings = vec![
            Rating { user: 1, item: 10, value: 5.0 },
            Rating { user: 1, item: 11, value: 5.0 },
            Rating { user: 1, item: 14, value: 2.0 },
            Rating { user: 2, item: 10, value: 5.0 },
            Rating { user: 2, item: 12, value: 5.0 },
            Rating { user: 2, item: 15, value: 1.0 },
            Rating { user: 3, item: 13, value: 5.0 },
            Rating { user: 3, item: 14, value: 5.0 },
            Rating { user: 3, item: 11, value: 2.0 },
            Rating { user: 4, item: 13, value: 5.0 },
            Rating { user: 4, item: 15, value: 5.0 },
            Rating { user: 4, item: 12, value: 2.0 },
        ];
        Dataset::new(ratings, vec![], Map::new(), vec![], Map::new(), vec![]).unwrap()
    }

    #[test]
    fn run_experiment_produces_report_per_method() {
        let ds = toy_dataset();
        let protocol = Protocol {
            mode: ProtocolMode::Warm { folds: 2 },
            k_grid: vec![1, 3, 6],
            list_length: 6,
            seed: 7,
            solver: SolverConfig::default(),
        };
        let methods = vec![
            method_by_name("userrank-cf").unwrap(),
            method_by_name("itemrank").unwrap(),
        ];
        let reports = run_experiment(&ds, &methods, &protocol).unwrap();
        assert_eq!(reports.len(), 2);
        assert_eq!(reports[0].method, "userrank-cf");
        assert_eq!(reports[1].method, "itemrank");
        for report in &reports {
            assert_eq!(report.failed_folds, 0);
            // recall curves non-decreasing in k
            for fold in &report.folds {
                for pair in fold.recall_curve.windows(2) {
                    assert!(pair[1].1 >= pair[0].1);
                }
            }
        }
    }

    #[test]
    fn run_experiment_deterministic() {
        let ds = toy_dataset();
        let protocol = Protocol {
            mode: ProtocolMode::Warm { folds: 2 },
            k_grid: vec![2, 4],
            list_length: 6,
            seed: 11,
            solver: SolverConfig::default(),
        };
        let methods = vec![method_by_name("userrank-cf").unwrap()];
        let a = run_experiment(&ds, &methods, &protocol).unwrap();
        let b = run_experiment(&ds, &methods, &protocol).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn empty_method_list_is_error() {
        let ds = toy_dataset();
        let protocol = Protocol {
            mode: ProtocolMode::Warm { folds: 2 },
            k_grid: vec![1],
            list_length: 6,
            seed: 0,
            solver: SolverConfig::default(),
        };
        assert!(run_experiment(&ds, &[], &protocol).is_err());
    }

    #[test]
    fn lplus_rejected_in_cold_mode() {
        let ds = toy_dataset();
        let protocol = Protocol {
            mode: ProtocolMode::Cold { fraction: 0.25, seeds: 1 },
            k_grid: vec![1],
            list_length: 6,
            seed: 0,
            solver: SolverConfig::default(),
        };
        let methods = vec![method_by_name("lplus").unwrap()];
        assert!(run_experiment(&ds, &methods, &protocol).is_err());
    }

    #[test]
    fn unknown_method_lists_registry() {
        let err = match method_by_name("bogus") {
            Err(err) => err.to_string(),
            Ok(_) => panic!("bogus method resolved"),
        };
        for name in METHOD_NAMES {
            assert!(err.contains(name));
        }
    }

    #[test]
    fn cold_run_with_side_information_reaches_items() {
        // cold users connected through shared profiles get non-popularity
        // rankings from the hybrid graph
        let ratings = toy_dataset().ratings().to_vec();
        let profiles = Map::from([(1, vec![0u16]), (2, vec![0]), (3, vec![1]), (4, vec![1])]);
        let ds = Dataset::new(
            ratings,
            vec![],
            Map::new(),
            vec!["p0".into(), "p1".into()],
            profiles,
            vec![],
        )
        .unwrap();
        let protocol = Protocol {
            mode: ProtocolMode::Cold { fraction: 0.25, seeds: 2 },
            k_grid: vec![1, 6],
            list_length: 6,
            seed: 1,
            solver: SolverConfig::default(),
        };
        let methods = vec![method_by_name("userrank-social").unwrap()];
        let reports = run_experiment(&ds, &methods, &protocol).unwrap();
        for fold in &reports[0].folds {
            assert!(fold.error.is_none());
            assert_eq!(fold.disconnected_users, 0);
        }
    }
}

//! Personalized rank scores by damped power iteration.
//!
//! Solves `s = beta * W s + (1 - beta) * theta` for the column-stochastic
//! transition matrix of a recommendation graph. At every step the mass
//! sitting on dangling nodes is redistributed onto the personalization
//! vector, so iterates stay probability vectors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{NodeId, NodeKind, RecGraph, TransitionMatrix};

#[derive(Debug, Error)]
pub enum RankError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("rank solve did not converge in {max_iter} iterations (residual {residual:.3e})")]
    NotConverged {
        max_iter: usize,
        residual: f64,
        last: RankVector,
    },
}

/// Teleport distribution: a basis vector for one user, a uniform mixture for
/// a group. Entries are non-negative and sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PersonalizationVector(Vec<f64>);

impl PersonalizationVector {
    /// Basis vector at `user`, which must be a User node of `graph`.
    pub fn for_user(graph: &RecGraph, user: NodeId) -> Result<Self, RankError> {
        Self::for_group(graph, &[user])
    }

    /// Uniform average of basis vectors over a non-empty set of User nodes.
    /// Duplicates are ignored.
    pub fn for_group(graph: &RecGraph, users: &[NodeId]) -> Result<Self, RankError> {
        if users.is_empty() {
            return Err(RankError::Invalid("empty personalization group".into()));
        }
        let mut members: Vec<NodeId> = users.to_vec();
        members.sort_unstable();
        members.dedup();
        for &node in &members {
            if node.0 >= graph.node_count() {
                return Err(RankError::Invalid(format!(
                    "node index {} out of range",
                    node.0
                )));
            }
            if graph.kind(node) != NodeKind::User {
                return Err(RankError::Invalid(format!(
                    "personalization target {} is a {} node, not a user",
                    node.0,
                    graph.kind(node).as_str()
                )));
            }
        }
        let mut theta = vec![0.0; graph.node_count()];
        let share = 1.0 / members.len() as f64;
        for node in members {
            theta[node.0] = share;
        }
        Ok(Self(theta))
    }

    /// Arbitrary non-negative weights, normalized to sum 1. Used by methods
    /// that personalize over non-user nodes (e.g. item-graph ranking).
    pub fn from_weights(weights: &[f64]) -> Result<Self, RankError> {
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(RankError::Invalid(
                "personalization weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(RankError::Invalid(
                "personalization weights must have positive sum".into(),
            ));
        }
        Ok(Self(weights.iter().map(|w| w / total).collect()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Damping factor, convergence tolerance (L1 delta between iterates) and
/// iteration cap for the power-iteration solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub beta: f64,
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            beta: 0.85,
            epsilon: 1e-8,
            max_iter: 200,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), RankError> {
        if !(0.0..1.0).contains(&self.beta) {
            return Err(RankError::Invalid(format!(
                "beta must be in [0, 1), got {}",
                self.beta
            )));
        }
        if self.epsilon <= 0.0 {
            return Err(RankError::Invalid(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iter == 0 {
            return Err(RankError::Invalid("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Converged stationary score vector plus solve diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    scores: Vec<f64>,
    pub iterations_used: usize,
    /// Exact L1 fixed-point residual of the returned iterate.
    pub residual: f64,
}

impl RankVector {
    #[cfg(test)]
    pub(crate) fn from_raw(scores: Vec<f64>) -> Self {
        Self {
            scores,
            iterations_used: 0,
            residual: 0.0,
        }
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn score(&self, node: NodeId) -> f64 {
        self.scores[node.0]
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

// One application of the damped walk with dangling redistribution onto theta.
fn step(w: &TransitionMatrix, theta: &[f64], beta: f64, s: &[f64], out: &mut [f64]) {
    let dangling_mass: f64 = w
        .dangling_mask()
        .iter()
        .zip(s)
        .filter(|(&d, _)| d)
        .map(|(_, &v)| v)
        .sum();
    let teleport = (1.0 - beta) + beta * dangling_mass;
    for (o, &t) in out.iter_mut().zip(theta) {
        *o = teleport * t;
    }
    for (j, &sj) in s.iter().enumerate() {
        if sj == 0.0 {
            continue;
        }
        let scaled = beta * sj;
        for &(i, p) in w.column(j) {
            out[i] += scaled * p;
        }
    }
}

fn l1_delta(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Damped power iteration from the uniform start vector.
///
/// Returns the converged [`RankVector`], or a [`RankError::NotConverged`]
/// carrying the last iterate when the tolerance is not met in `max_iter`
/// steps.
pub fn solve_rank(
    w: &TransitionMatrix,
    theta: &PersonalizationVector,
    config: &SolverConfig,
) -> Result<RankVector, RankError> {
    config.validate()?;
    let v = w.node_count();
    if theta.len() != v {
        return Err(RankError::Invalid(format!(
            "personalization length {} does not match node count {v}",
            theta.len()
        )));
    }
    if v == 0 {
        return Err(RankError::Invalid("empty graph".into()));
    }

    let theta = theta.as_slice();
    let mut s = vec![1.0 / v as f64; v];
    let mut next = vec![0.0; v];
    for iteration in 1..=config.max_iter {
        step(w, theta, config.beta, &s, &mut next);
        let delta = l1_delta(&next, &s);
        std::mem::swap(&mut s, &mut next);
        if delta <= config.epsilon {
            step(w, theta, config.beta, &s, &mut next);
            let residual = l1_delta(&next, &s);
            return Ok(RankVector {
                scores: s,
                iterations_used: iteration,
                residual,
            });
        }
    }
    step(w, theta, config.beta, &s, &mut next);
    let residual = l1_delta(&next, &s);
    Err(RankError::NotConverged {
        max_iter: config.max_iter,
        residual,
        last: RankVector {
            scores: s,
            iterations_used: config.max_iter,
            residual,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Dataset, Rating};
    use crate::graph::{build_graph, transition_matrix, GraphConfig};
    use approx::assert_relative_eq;
    use std::collections::BTreeMap;

    fn two_node_mutual() -> (crate::graph::RecGraph, TransitionMatrix) {
        let ds = Dataset::new(
            vec![Rating { user: 1, item: 10, value: 4.0 }],
            vec![],
            BTreeMap::new(),
            vec![],
            BTreeMap::new(),
            vec![],
        )
        .unwrap();
        let g = build_graph(&ds, GraphConfig::cf_only()).unwrap();
        let w = transition_matrix(&g);
        (g, w)
    }

    #[test]
    fn two_node_closed_form() {
        let (g, w) = two_node_mutual();
        let theta = PersonalizationVector::for_user(&g, g.user_node(1).unwrap()).unwrap();
        let config = SolverConfig {
            beta: 0.5,
            epsilon: 1e-12,
            max_iter: 200,
        };
        let rank = solve_rank(&w, &theta, &config).unwrap();
        assert_relative_eq!(rank.scores()[0], 2.0 / 3.0, epsilon = 1e-9);
        assert_relative_eq!(rank.scores()[1], 1.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn beta_zero_returns_theta() {
        let (g, w) = two_node_mutual();
        let theta = PersonalizationVector::for_user(&g, g.user_node(1).unwrap()).unwrap();
        let config = SolverConfig {
            beta: 0.0,
            epsilon: 1e-12,
            max_iter: 10,
        };
        let rank = solve_rank(&w, &theta, &config).unwrap();
        assert_eq!(rank.scores(), theta.as_slice());
    }

    #[test]
    fn basis_vector_personalization() {
        let ds = Dataset::new(
            (1..=3)
                .map(|u| Rating { user: u, item: 10, value: 3.0 })
                .collect(),
            vec![],
            BTreeMap::new(),
            vec![],
            BTreeMap::new(),
            vec![],
        )
        .unwrap();
        let g = build_graph(&ds, GraphConfig::cf_only()).unwrap();
        let theta = PersonalizationVector::for_user(&g, NodeId(1)).unwrap();
        assert_eq!(theta.as_slice(), &[0.0, 1.0, 0.0, 0.0]);
        // item node is not a valid personalization target
        assert!(PersonalizationVector::for_user(&g, g.item_node(10).unwrap()).is_err());
        // out of range
        assert!(PersonalizationVector::for_user(&g, NodeId(99)).is_err());
    }

    #[test]
    fn group_personalization() {
        let ds = Dataset::new(
            (1..=3)
                .map(|u| Rating { user: u, item: 10, value: 3.0 })
                .collect(),
            vec![],
            BTreeMap::new(),
            vec![],
            BTreeMap::new(),
            vec![],
        )
        .unwrap();
        let g = build_graph(&ds, GraphConfig::cf_only()).unwrap();
        let theta = PersonalizationVector::for_group(&g, &[NodeId(0), NodeId(2)]).unwrap();
        assert_eq!(theta.as_slice(), &[0.5, 0.0, 0.5, 0.0]);
        // duplicates collapse to set semantics
        let dup = PersonalizationVector::for_group(&g, &[NodeId(0), NodeId(0), NodeId(2)]).unwrap();
        assert_eq!(dup, theta);
        // singleton group equals the single-user vector
        let single = PersonalizationVector::for_group(&g, &[NodeId(1)]).unwrap();
        assert_eq!(
            single,
            PersonalizationVector::for_user(&g, NodeId(1)).unwrap()
        );
        assert!(PersonalizationVector::for_group(&g, &[]).is_err());
    }

    #[test]
    fn dangling_user_keeps_all_mass() {
        // A user with no edges at all: every walk step teleports back.
        let ds = Dataset::new(
            vec![Rating { user: 1, item: 10, value: 4.0 }],
            vec![],
            BTreeMap::new(),
            vec![],
            BTreeMap::new(),
            vec![(2, 1)],
        )
        .unwrap();
        // user 2 only trusts user 1; with social disabled, user 2 is dangling
        let g = build_graph(&ds, GraphConfig::cf_only()).unwrap();
        let w = transition_matrix(&g);
        let u2 = g.user_node(2).unwrap();
        assert!(w.is_dangling(u2.0));
        let theta = PersonalizationVector::for_user(&g, u2).unwrap();
        let rank = solve_rank(&w, &theta, &SolverConfig::default()).unwrap();
        assert_relative_eq!(rank.score(u2), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn non_convergence_is_explicit() {
        let (g, w) = two_node_mutual();
        let theta = PersonalizationVector::for_user(&g, g.user_node(1).unwrap()).unwrap();
        let config = SolverConfig {
            beta: 0.99,
            epsilon: 1e-15,
            max_iter: 2,
        };
        match solve_rank(&w, &theta, &config) {
            Err(RankError::NotConverged { last, residual, .. }) => {
                assert_eq!(last.iterations_used, 2);
                assert!(residual > 0.0);
                let sum: f64 = last.scores().iter().sum();
                assert_relative_eq!(sum, 1.0, epsilon = 1e-12);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let (g, w) = two_node_mutual();
        let theta = PersonalizationVector::for_user(&g, g.user_node(1).unwrap()).unwrap();
        for bad in [
            SolverConfig { beta: 1.0, ..Default::default() },
            SolverConfig { beta: -0.1, ..Default::default() },
            SolverConfig { epsilon: 0.0, ..Default::default() },
            SolverConfig { max_iter: 0, ..Default::default() },
        ] {
            assert!(solve_rank(&w, &theta, &bad).is_err());
        }
    }
}

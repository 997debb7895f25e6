//! Random-walk hybrid collaborative filtering.
//!
//! Builds a heterogeneous recommendation graph over users, items, item tags
//! and user profile categories (plus directed social edges), computes
//! personalized rank scores by damped power iteration, and turns them into
//! top-k recommendations and rating predictions. An evaluation harness
//! scores registered methods with recall@k and percentile metrics over warm
//! k-fold and cold-start splits; item-graph ranking and commute-time
//! baselines are included behind the same method interface.

pub mod baselines;
pub mod data;
pub mod eval;
pub mod graph;
pub mod ranker;
pub mod recommend;
pub mod synth;

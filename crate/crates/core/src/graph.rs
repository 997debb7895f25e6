//! Recommendation graph construction and walk probabilities.
//!
//! The graph mixes four node kinds: users, items, tags (item categories) and
//! profiles (user categories). User-item edges carry rating-derived weights;
//! all extended edges (item-tag, user-profile, social) carry weight 1.
//! [`transition_matrix`] row-normalizes outgoing weights into the
//! column-stochastic matrix the rank solver iterates with.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Dataset;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unknown ids referenced: {0:?}")]
    UnknownIds(Vec<String>),
}

/// Dense node index, unique across the whole graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    User,
    Item,
    Tag,
    Profile,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::User => "user",
            NodeKind::Item => "item",
            NodeKind::Tag => "tag",
            NodeKind::Profile => "profile",
        }
    }
}

/// Which edge families to include when building the graph.
///
/// With everything disabled the graph is the bipartite user-item CF core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphConfig {
    pub enable_tags: bool,
    pub enable_profiles: bool,
    pub enable_social: bool,
}

impl GraphConfig {
    /// Bipartite user-item graph only.
    pub fn cf_only() -> Self {
        Self {
            enable_tags: false,
            enable_profiles: false,
            enable_social: false,
        }
    }

    /// All edge families enabled.
    pub fn hybrid() -> Self {
        Self {
            enable_tags: true,
            enable_profiles: true,
            enable_social: true,
        }
    }

    /// Parses a plain-text `key=value` config (keys `enable_tags`,
    /// `enable_profiles`, `enable_social`; `#` starts a comment line).
    pub fn from_key_values(text: &str) -> Result<Self, GraphError> {
        let mut config = Self::cf_only();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| GraphError::Invalid(format!("line {}: expected key=value", lineno + 1)))?;
            let value: bool = value.trim().parse().map_err(|_| {
                GraphError::Invalid(format!("line {}: expected true/false", lineno + 1))
            })?;
            match key.trim() {
                "enable_tags" => config.enable_tags = value,
                "enable_profiles" => config.enable_profiles = value,
                "enable_social" => config.enable_social = value,
                other => {
                    return Err(GraphError::Invalid(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(config)
    }
}

/// Weighted directed heterogeneous graph over user/item/tag/profile nodes.
///
/// Node indices are assigned by kind order (users, items, tags, profiles),
/// ascending external id within a kind; out-edge lists are sorted by target.
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RecGraph {
    kinds: Vec<NodeKind>,
    ext_ids: Vec<u32>,
    out_edges: Vec<Vec<(NodeId, f64)>>,
    user_index: BTreeMap<u32, NodeId>,
    item_index: BTreeMap<u32, NodeId>,
    tag_offset: usize,
    profile_offset: usize,
    config: GraphConfig,
}

impl RecGraph {
    pub fn node_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn kind(&self, node: NodeId) -> NodeKind {
        self.kinds[node.0]
    }

    /// External id of a node (tag/profile nodes use their category index).
    pub fn external_id(&self, node: NodeId) -> u32 {
        self.ext_ids[node.0]
    }

    pub fn out_edges(&self, node: NodeId) -> &[(NodeId, f64)] {
        &self.out_edges[node.0]
    }

    pub fn user_node(&self, user: u32) -> Option<NodeId> {
        self.user_index.get(&user).copied()
    }

    pub fn item_node(&self, item: u32) -> Option<NodeId> {
        self.item_index.get(&item).copied()
    }

    /// All item nodes in index order.
    pub fn item_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.item_index.values().copied()
    }

    pub fn user_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.user_index.values().copied()
    }

    pub fn config(&self) -> GraphConfig {
        self.config
    }

    /// Debug TSV dump: `source_kind source_id target_kind target_id weight`.
    pub fn dump_edges<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (src, edges) in self.out_edges.iter().enumerate() {
            let src = NodeId(src);
            for &(dst, w) in edges {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}",
                    self.kind(src).as_str(),
                    self.external_id(src),
                    self.kind(dst).as_str(),
                    self.external_id(dst),
                    w
                )?;
            }
        }
        Ok(())
    }
}

/// Rating-derived edge weight `exp((r_ui - r̄_u) / sqrt(Σ (r_ui - r̄_u)²))`.
///
/// When every rating of the user equals the mean (including single-rating
/// users) the exponent is defined as 0 and the weight is 1.
pub fn rating_edge_weight(r_ui: f64, ratings_of_u: &[f64]) -> Result<f64, GraphError> {
    if ratings_of_u.is_empty() {
        return Err(GraphError::Invalid(
            "rating_edge_weight requires a non-empty rating list".into(),
        ));
    }
    let mean = ratings_of_u.iter().sum::<f64>() / ratings_of_u.len() as f64;
    let denom = ratings_of_u
        .iter()
        .map(|r| (r - mean).powi(2))
        .sum::<f64>()
        .sqrt();
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok(((r_ui - mean) / denom).exp())
}

/// Builds the recommendation graph from a dataset under the given ablation
/// config. All dataset users, items, tags and profiles become nodes; which
/// extended edges appear is controlled by `config`.
pub fn build_graph(dataset: &Dataset, config: GraphConfig) -> Result<RecGraph, GraphError> {
    let users = dataset.users();
    let items = dataset.items();
    // disabled edge families contribute no nodes either
    let num_tags = if config.enable_tags { dataset.num_tags() } else { 0 };
    let num_profiles = if config.enable_profiles {
        dataset.num_profiles()
    } else {
        0
    };

    let tag_offset = users.len() + items.len();
    let profile_offset = tag_offset + num_tags;
    let node_count = profile_offset + num_profiles;

    let mut kinds = Vec::with_capacity(node_count);
    let mut ext_ids = Vec::with_capacity(node_count);
    let user_index: BTreeMap<u32, NodeId> = users
        .iter()
        .enumerate()
        .map(|(idx, &u)| (u, NodeId(idx)))
        .collect();
    let item_index: BTreeMap<u32, NodeId> = items
        .iter()
        .enumerate()
        .map(|(idx, &i)| (i, NodeId(users.len() + idx)))
        .collect();
    kinds.extend(std::iter::repeat_n(NodeKind::User, users.len()));
    ext_ids.extend(users.iter().copied());
    kinds.extend(std::iter::repeat_n(NodeKind::Item, items.len()));
    ext_ids.extend(items.iter().copied());
    kinds.extend(std::iter::repeat_n(NodeKind::Tag, num_tags));
    ext_ids.extend(0..num_tags as u32);
    kinds.extend(std::iter::repeat_n(NodeKind::Profile, num_profiles));
    ext_ids.extend(0..num_profiles as u32);

    let mut out_edges: Vec<Vec<(NodeId, f64)>> = vec![Vec::new(); node_count];
    let mut unknown: Vec<String> = Vec::new();

    // Rating edges, both directions, weighted per the user's rating profile.
    for &user in users {
        let ratings = dataset.user_ratings(user);
        if ratings.is_empty() {
            continue;
        }
        let values: Vec<f64> = ratings.iter().map(|r| r.value).collect();
        let u_node = user_index[&user];
        for rating in ratings {
            let Some(&i_node) = item_index.get(&rating.item) else {
                unknown.push(format!("item {}", rating.item));
                continue;
            };
            let w = rating_edge_weight(rating.value, &values)?;
            out_edges[u_node.0].push((i_node, w));
            out_edges[i_node.0].push((u_node, w));
        }
    }

    if config.enable_tags {
        for &item in items {
            let i_node = item_index[&item];
            for &tag in dataset.item_tags(item) {
                let t_node = NodeId(tag_offset + tag as usize);
                out_edges[i_node.0].push((t_node, 1.0));
                out_edges[t_node.0].push((i_node, 1.0));
            }
        }
    }

    if config.enable_profiles {
        for &user in users {
            let u_node = user_index[&user];
            for &cat in dataset.user_profile(user) {
                let p_node = NodeId(profile_offset + cat as usize);
                out_edges[u_node.0].push((p_node, 1.0));
                out_edges[p_node.0].push((u_node, 1.0));
            }
        }
    }

    if config.enable_social {
        // Directed: no symmetrization.
        for &(from, to) in dataset.social() {
            match (user_index.get(&from), user_index.get(&to)) {
                (Some(&f), Some(&t)) => out_edges[f.0].push((t, 1.0)),
                _ => unknown.push(format!("social edge ({from}, {to})")),
            }
        }
    }

    if !unknown.is_empty() {
        return Err(GraphError::UnknownIds(unknown));
    }

    for edges in &mut out_edges {
        edges.sort_by_key(|a| a.0);
        for pair in edges.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(GraphError::Invalid(format!(
                    "duplicate edge to node {}",
                    pair[0].0 .0
                )));
            }
        }
    }

    Ok(RecGraph {
        kinds,
        ext_ids,
        out_edges,
        user_index,
        item_index,
        tag_offset,
        profile_offset,
        config,
    })
}

/// Column-stochastic sparse transition matrix `W` with `W_ij = P_ji`.
///
/// `columns[j]` lists `(i, W_ij)`: the outgoing walk distribution of node
/// `j`. Dangling nodes (no out-edges) have empty columns and are flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    columns: Vec<Vec<(usize, f64)>>,
    dangling: Vec<bool>,
}

impl TransitionMatrix {
    /// Normalizes raw out-edge weight lists (indexed by source node) into a
    /// transition matrix. Used for graphs that are not [`RecGraph`]s, e.g.
    /// the item-item ranking graph.
    pub fn from_out_weights(out: &[Vec<(usize, f64)>]) -> Result<Self, GraphError> {
        let n = out.len();
        let mut columns = Vec::with_capacity(n);
        let mut dangling = Vec::with_capacity(n);
        for edges in out {
            let mut total = 0.0;
            for &(target, weight) in edges {
                if target >= n {
                    return Err(GraphError::Invalid(format!(
                        "edge target {target} out of range for {n} nodes"
                    )));
                }
                if weight <= 0.0 || !weight.is_finite() {
                    return Err(GraphError::Invalid(format!(
                        "edge weight must be positive and finite, got {weight}"
                    )));
                }
                total += weight;
            }
            if edges.is_empty() {
                columns.push(Vec::new());
                dangling.push(true);
            } else {
                columns.push(edges.iter().map(|&(t, w)| (t, w / total)).collect());
                dangling.push(false);
            }
        }
        Ok(Self { columns, dangling })
    }

    pub fn node_count(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, node: usize) -> &[(usize, f64)] {
        &self.columns[node]
    }

    pub fn is_dangling(&self, node: usize) -> bool {
        self.dangling[node]
    }

    pub fn dangling_mask(&self) -> &[bool] {
        &self.dangling
    }
}

/// Row-normalizes the graph's out-edge weights into walk probabilities.
pub fn transition_matrix(graph: &RecGraph) -> TransitionMatrix {
    let n = graph.node_count();
    let mut columns = Vec::with_capacity(n);
    let mut dangling = Vec::with_capacity(n);
    for node in 0..n {
        let edges = graph.out_edges(NodeId(node));
        let total: f64 = edges.iter().map(|&(_, w)| w).sum();
        if edges.is_empty() {
            columns.push(Vec::new());
            dangling.push(true);
        } else {
            columns.push(edges.iter().map(|&(dst, w)| (dst.0, w / total)).collect());
            dangling.push(false);
        }
    }
    TransitionMatrix { columns, dangling }
}

//! Shared oracles for integration tests: independent dense implementations
//! used to cross-check the sparse production code.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Exact rank fixed point by dense linear solve.
///
/// Dangling columns are replaced by `theta` (mass on a node with no
/// out-edges teleports back), giving a stochastic matrix `W'`; the fixed
/// point of `s = beta W' s + (1-beta) theta` solves
/// `(I - beta W') s = (1-beta) theta`.
pub fn dense_rank_oracle(columns: &[Vec<(usize, f64)>], theta: &[f64], beta: f64) -> Vec<f64> {
    let v = columns.len();
    assert_eq!(theta.len(), v);
    let mut w = DMatrix::<f64>::zeros(v, v);
    for (j, col) in columns.iter().enumerate() {
        if col.is_empty() {
            for i in 0..v {
                w[(i, j)] = theta[i];
            }
        } else {
            let total: f64 = col.iter().map(|&(_, p)| p).sum();
            for &(i, p) in col {
                w[(i, j)] += p / total;
            }
        }
    }
    let a = DMatrix::<f64>::identity(v, v) - w * beta;
    let b = DVector::from_column_slice(theta) * (1.0 - beta);
    let s = a.lu().solve(&b).expect("rank system is nonsingular");
    s.iter().copied().collect()
}

/// Random out-weight lists over `v` nodes. Each node is dangling with
/// probability `dangling_p`; otherwise it gets 1..=4 weighted out-edges.
pub fn random_out_weights(rng: &mut ChaCha8Rng, v: usize, dangling_p: f64) -> Vec<Vec<(usize, f64)>> {
    let mut columns = Vec::with_capacity(v);
    for _ in 0..v {
        if rng.gen_bool(dangling_p) {
            columns.push(Vec::new());
            continue;
        }
        let degree = rng.gen_range(1..=4usize.min(v));
        let mut col = Vec::with_capacity(degree);
        for _ in 0..degree {
            col.push((rng.gen_range(0..v), rng.gen_range(0.1..5.0f64)));
        }
        columns.push(col);
    }
    // guarantee at least one non-dangling node so the chain can move
    if columns.iter().all(|c| c.is_empty()) {
        columns[0].push((v - 1, 1.0));
    }
    columns
}

/// Effective resistance between `a` and `b` in an undirected weighted
/// graph, by grounding the last node and solving the reduced Laplacian
/// for a unit current injection.
///
/// `edges` are undirected `(u, v, conductance)` pairs over nodes `0..n`;
/// `a` and `b` must be connected.
pub fn effective_resistance(n: usize, edges: &[(usize, usize, f64)], a: usize, b: usize) -> f64 {
    assert_ne!(a, b);
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for &(u, v, c) in edges {
        assert_ne!(u, v);
        lap[(u, u)] += c;
        lap[(v, v)] += c;
        lap[(u, v)] -= c;
        lap[(v, u)] -= c;
    }
    // ground the last node: drop its row and column
    let g = n - 1;
    assert!(a != g && b != g, "reindex so the grounded node is neither endpoint");
    let reduced = lap.view((0, 0), (g, g)).into_owned();
    let mut current = DVector::<f64>::zeros(g);
    current[a] = 1.0;
    current[b] = -1.0;
    let potential = reduced
        .lu()
        .solve(&current)
        .expect("endpoints lie in the grounded component");
    potential[a] - potential[b]
}

use rand::seq::index;

use super::{Edge, SignedGraph};
use crate::{seeds, Error, Result};

/// Induced subgraph on the `n` highest-degree nodes (ties to the lower id).
/// Kept nodes are renumbered in ascending order of their original id.
pub fn top_degree_subgraph(g: &SignedGraph, n: usize) -> Result<SignedGraph> {
    if n == 0 {
        return Err(Error::InvalidArgument("subgraph size must be positive".into()));
    }
    if n > g.node_count() {
        return Err(Error::InvalidArgument(format!(
            "subgraph size {n} exceeds node count {}",
            g.node_count()
        )));
    }
    let mut ranked: Vec<usize> = (0..g.node_count()).collect();
    ranked.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut kept = ranked[..n].to_vec();
    kept.sort_unstable();

    let mut new_id = vec![usize::MAX; g.node_count()];
    for (i, &old) in kept.iter().enumerate() {
        new_id[old] = i;
    }
    let edges = g.edges().iter().filter_map(|e| {
        let (a, b) = (new_id[e.u], new_id[e.v]);
        (a != usize::MAX && b != usize::MAX).then(|| Edge::new(a, b, e.sign))
    });
    SignedGraph::from_edges(n, edges)
}

/// Removes exactly `round(fraction * |E|)` edges chosen uniformly without
/// replacement. Survivors keep their relative order; the node set is unchanged.
pub fn inject_sparsity(g: &SignedGraph, fraction: f64, seed: u64) -> Result<SignedGraph> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!(
            "sparsity fraction {fraction} outside [0, 1)"
        )));
    }
    let remove = (fraction * g.edge_count() as f64).round() as usize;
    let mut rng = seeds::stream_rng(seed, &[seeds::streams::SPARSITY]);
    let mut drop = vec![false; g.edge_count()];
    for i in index::sample(&mut rng, g.edge_count(), remove) {
        drop[i] = true;
    }
    remove_edges(g, &drop)
}

/// Copy of `g` without the edges flagged in `drop` (indexed like `g.edges()`).
pub fn remove_edges(g: &SignedGraph, drop: &[bool]) -> Result<SignedGraph> {
    debug_assert_eq!(drop.len(), g.edge_count());
    let kept = g
        .edges()
        .iter()
        .zip(drop)
        .filter(|(_, &d)| !d)
        .map(|(e, _)| *e);
    SignedGraph::from_edges(g.node_count(), kept)
}

use rand::Rng;

use super::{Edge, Sign, SignedGraph};
use crate::seeds;

/// Planted-partition signed graph.
///
/// Nodes `c*size .. (c+1)*size` form community `c`. Intra-community pairs
/// connect with probability `p_intra` (Positive), inter-community pairs
/// with `p_inter` (Negative), then each sign flips with probability `noise`.
/// With `noise = 0` and at most two communities every cycle carries an even
/// number of negative edges. Three or more communities are only weakly
/// balanced: an all-negative triangle across three communities can occur.
pub fn synth_balanced(
    communities: usize,
    size: usize,
    p_intra: f64,
    p_inter: f64,
    noise: f64,
    seed: u64,
) -> SignedGraph {
    let n = communities * size;
    let mut rng = seeds::stream_rng(seed, &[seeds::streams::SYNTH, 0]);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let same = u / size == v / size;
            let p = if same { p_intra } else { p_inter };
            if !rng.random_bool(p.clamp(0.0, 1.0)) {
                continue;
            }
            let mut sign = if same { Sign::Positive } else { Sign::Negative };
            if noise > 0.0 && rng.random_bool(noise.min(1.0)) {
                sign = sign.flip();
            }
            edges.push(Edge::new(u, v, sign));
        }
    }
    SignedGraph::from_edges(n, edges).expect("planted partition is a simple graph")
}

/// Random connected signed graph: a random recursive spanning tree plus
/// each remaining pair with probability `extra_edge_prob`. Each edge is
/// Negative with probability `negative_prob`.
pub fn random_connected(n: usize, extra_edge_prob: f64, negative_prob: f64, seed: u64) -> SignedGraph {
    let mut rng = seeds::stream_rng(seed, &[seeds::streams::SYNTH, 1]);
    let draw_sign = |rng: &mut rand_chacha::ChaCha8Rng| {
        if rng.random_bool(negative_prob) {
            Sign::Negative
        } else {
            Sign::Positive
        }
    };
    let mut edges = Vec::new();
    let mut present = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.push(Edge::new(u, v, draw_sign(&mut rng)));
        present.insert((u, v));
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if !present.contains(&(u, v)) && rng.random_bool(extra_edge_prob) {
                edges.push(Edge::new(u, v, draw_sign(&mut rng)));
            }
        }
    }
    SignedGraph::from_edges(n, edges).expect("generated graph is simple")
}

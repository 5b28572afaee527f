use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::{seeds, EmbeddingMatrix, Error, Result, SignedGraph};

/// Mean endpoint distance of positive (APED) and negative (ANED) edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceAudit {
    pub aped: f64,
    pub aned: f64,
    pub positive_sampled: usize,
    pub negative_sampled: usize,
}

/// Samples `floor(fraction * |E-|)` negative edges (at least one) and the
/// same number of positive edges, capped by the available positives, and
/// averages the Euclidean distance between endpoint embeddings per sign.
pub fn balance_audit(emb: &EmbeddingMatrix, g: &SignedGraph, sample_fraction: f64, seed: u64) -> Result<BalanceAudit> {
    if !(sample_fraction > 0.0 && sample_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!("sample fraction {sample_fraction} outside (0, 1]")));
    }
    if emb.rows() != g.node_count() {
        return Err(Error::InvalidArgument("embedding rows do not match node count".into()));
    }
    let (pos, neg): (Vec<usize>, Vec<usize>) =
        (0..g.edge_count()).partition(|&i| g.edges()[i].sign.is_positive());
    if neg.is_empty() {
        return Err(Error::InvalidGraph("balance audit needs negative edges".into()));
    }
    if pos.is_empty() {
        return Err(Error::InvalidGraph("balance audit needs positive edges".into()));
    }
    let wanted = ((sample_fraction * neg.len() as f64).floor() as usize).max(1);
    let count = wanted.min(pos.len());
    let mut rng = seeds::stream_rng(seed, &[seeds::streams::AUDIT]);
    let mean_distance = |pool: &[usize], rng: &mut rand_chacha::ChaCha8Rng| {
        let chosen = index::sample(rng, pool.len(), count);
        let total: f64 = chosen
            .iter()
            .map(|j| {
                let e = g.edges()[pool[j]];
                emb.distance(e.u, e.v)
            })
            .sum();
        total / count as f64
    };
    let aned = mean_distance(&neg, &mut rng);
    let aped = mean_distance(&pos, &mut rng);
    Ok(BalanceAudit {
        aped,
        aned,
        positive_sampled: count,
        negative_sampled: count,
    })
}

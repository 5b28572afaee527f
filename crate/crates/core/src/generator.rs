//! The generator: owns its embedding table, emits fake signed neighbors by
//! tree walks, and learns by REINFORCE on the discriminator's verdict.

use std::collections::BTreeMap;

use rand::Rng;

use crate::embedding::{dot, EmbeddingMatrix};
use crate::treewalk::{sample_walk, signed_softmax, BfsTree, LazySteps, RelevanceTable, Walk};
use crate::{Error, Result, Sign, SignedGraph};

/// Default clamp on `log(1 - D)` rewards.
pub const REWARD_CLAMP: (f64, f64) = (-20.0, 0.0);

/// One generated neighbor of `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct FakeSample {
    pub center: usize,
    pub neighbor: usize,
    pub sign: Sign,
    pub walk: Walk,
    /// Tree neighborhood of the origin of each walk step, aligned with
    /// `walk.signs`. Needed to differentiate each step's normaliser.
    pub neighborhoods: Vec<Vec<usize>>,
    pub reward: f64,
}

impl FakeSample {
    pub fn walk_nodes(&self) -> &[usize] {
        &self.walk.nodes
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FakeBatch {
    pub samples: Vec<FakeSample>,
    /// Set when the center has no neighbors and nothing could be drawn.
    pub isolated: bool,
}

/// Builds the BFS tree of `center` and draws `count` fakes from it.
pub fn generate_fakes<R: Rng + ?Sized>(
    g: &SignedGraph,
    emb: &EmbeddingMatrix,
    center: usize,
    count: usize,
    rng: &mut R,
) -> Result<FakeBatch> {
    let tree = BfsTree::build(g, center);
    generate_fakes_in_tree(&tree, emb, count, rng)
}

/// Draws `count` fakes rooted at `tree.root()`. Step distributions are
/// evaluated once per visited node and shared across the draws.
pub fn generate_fakes_in_tree<R: Rng + ?Sized>(
    tree: &BfsTree,
    emb: &EmbeddingMatrix,
    count: usize,
    rng: &mut R,
) -> Result<FakeBatch> {
    if count == 0 {
        return Err(Error::InvalidArgument("fake count must be positive".into()));
    }
    let center = tree.root();
    if tree.covered().len() < 2 {
        log::warn!("node {center} is isolated; no fakes generated");
        return Ok(FakeBatch {
            samples: Vec::new(),
            isolated: true,
        });
    }
    let mut table = RelevanceTable::empty(tree.node_count());
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let mut source = LazySteps {
            table: &mut table,
            emb,
            tree,
        };
        let walk = sample_walk(&mut source, tree, rng).expect("tree has at least two nodes");
        let (neighbor, sign) = walk.outcome();
        let neighborhoods = walk.nodes[..walk.nodes.len() - 1]
            .iter()
            .map(|&from| tree.tree_neighbors(from).collect())
            .collect();
        samples.push(FakeSample {
            center,
            neighbor,
            sign,
            walk,
            neighborhoods,
            reward: 0.0,
        });
    }
    Ok(FakeBatch {
        samples,
        isolated: false,
    })
}

/// `log(1 - D)`, clamped.
pub fn clamped_reward(log_one_minus_d: f64, clamp: (f64, f64)) -> f64 {
    log_one_minus_d.clamp(clamp.0, clamp.1)
}

/// Sparse gradient accumulator keyed by node id (ordered for determinism).
pub type SparseGrad = BTreeMap<usize, Vec<f64>>;

fn add_scaled(acc: &mut SparseGrad, node: usize, dim: usize, scale: f64, v: &[f64]) {
    let row = acc.entry(node).or_insert_with(|| vec![0.0; dim]);
    for (r, x) in row.iter_mut().zip(v) {
        *r += scale * x;
    }
}

/// Adds `scale * d/dθ log p(chosen, sign | from)` to `acc`, where the step
/// distribution at `from` normalises over `neighborhood`.
pub fn accumulate_step_gradient(
    emb: &EmbeddingMatrix,
    from: usize,
    neighborhood: &[usize],
    chosen: usize,
    sign: Sign,
    scale: f64,
    acc: &mut SparseGrad,
) {
    let dim = emb.dim();
    let scores: Vec<f64> = neighborhood
        .iter()
        .map(|&k| dot(emb.row(from), emb.row(k)))
        .collect();
    let (pos, neg) = signed_softmax(&scores);
    for (i, &k) in neighborhood.iter().enumerate() {
        let indicator = if k == chosen { sign.value() } else { 0.0 };
        // d log p / d score_k
        let coef = indicator - (pos[i] - neg[i]);
        if coef == 0.0 {
            continue;
        }
        add_scaled(acc, from, dim, scale * coef, emb.row(k));
        add_scaled(acc, k, dim, scale * coef, emb.row(from));
    }
}

/// Log-probability of the sample's whole trajectory under `emb`.
pub fn walk_log_prob(emb: &EmbeddingMatrix, sample: &FakeSample) -> f64 {
    sample
        .walk
        .steps()
        .zip(&sample.neighborhoods)
        .map(|((from, to, sign), hood)| {
            let scores: Vec<f64> = hood.iter().map(|&k| emb.dot(from, k)).collect();
            let (pos, neg) = signed_softmax(&scores);
            let i = hood.iter().position(|&k| k == to).expect("step target in neighborhood");
            match sign {
                Sign::Positive => pos[i].ln(),
                Sign::Negative => neg[i].ln(),
            }
        })
        .sum()
}

/// `d/dθ log P(trajectory)`, summed over every step of the walk.
pub fn walk_log_prob_gradient(emb: &EmbeddingMatrix, sample: &FakeSample, scale: f64, acc: &mut SparseGrad) {
    for ((from, to, sign), hood) in sample.walk.steps().zip(&sample.neighborhoods) {
        accumulate_step_gradient(emb, from, hood, to, sign, scale, acc);
    }
}

/// REINFORCE estimate `sum_i reward_i * d log P(walk_i)` over the batch.
pub fn reinforce_gradient(emb: &EmbeddingMatrix, samples: &[FakeSample]) -> Result<SparseGrad> {
    let mut acc = SparseGrad::new();
    if samples.is_empty() {
        return Ok(acc);
    }
    for s in samples {
        if !s.reward.is_finite() {
            return Err(Error::NonFinite("generator reward"));
        }
        if s.reward != 0.0 {
            walk_log_prob_gradient(emb, s, s.reward, &mut acc);
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolicyUpdateReport {
    pub gradient_norm: f64,
    pub samples: usize,
    /// Distinct embedding rows with a nonzero gradient.
    pub touched_rows: usize,
}

/// One descent step on the expected reward, using the REINFORCE estimate
/// over `samples` (no baseline).
pub fn policy_gradient_update(
    emb: &mut EmbeddingMatrix,
    samples: &[FakeSample],
    learning_rate: f64,
) -> Result<PolicyUpdateReport> {
    let grad = reinforce_gradient(emb, samples)?;
    let norm = grad
        .values()
        .flat_map(|row| row.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    if !norm.is_finite() {
        return Err(Error::NonFinite("generator gradient"));
    }
    if learning_rate != 0.0 {
        for (&node, row) in &grad {
            for (w, g) in emb.row_mut(node).iter_mut().zip(row) {
                *w -= learning_rate * g;
            }
        }
        if grad.keys().any(|&n| emb.row(n).iter().any(|x| !x.is_finite())) {
            return Err(Error::NonFinite("generator embeddings"));
        }
    }
    Ok(PolicyUpdateReport {
        gradient_norm: norm,
        samples: samples.len(),
        touched_rows: grad.len(),
    })
}

//! The discriminator scores a signed edge as `sigmoid(sign * d_u . d_v)`.
//!
//! The one-hot input layer of a single-hidden-layer network is just a row
//! lookup, so the model is held directly as one `|V| x k` table.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingMatrix;
use crate::generator::SparseGrad;
use crate::{Error, Result, Sign, SignedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Origin {
    True,
    Fake,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabeledEdge {
    pub u: usize,
    pub v: usize,
    pub sign: Sign,
    pub origin: Origin,
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^x)` without overflow.
#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub fn score(emb: &EmbeddingMatrix, u: usize, v: usize, sign: Sign) -> f64 {
    sigmoid(sign.value() * emb.dot(u, v))
}

/// `log D(u, v, sign)`.
pub fn log_score(emb: &EmbeddingMatrix, u: usize, v: usize, sign: Sign) -> f64 {
    -softplus(-sign.value() * emb.dot(u, v))
}

/// `log(1 - D(u, v, sign))`.
pub fn log_one_minus_score(emb: &EmbeddingMatrix, u: usize, v: usize, sign: Sign) -> f64 {
    -softplus(sign.value() * emb.dot(u, v))
}

/// Draws `count` real edges incident to `center`, with replacement. Each draw
/// tosses a fair coin for the sign and then picks uniformly among the
/// center's neighbors of that sign, falling back to the other sign when the
/// center has none.
pub fn sample_true_batch<R: Rng + ?Sized>(
    g: &SignedGraph,
    center: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<LabeledEdge>> {
    let (positive, negative): (Vec<_>, Vec<_>) = g
        .neighbors(center)
        .iter()
        .partition(|(_, s)| s.is_positive());
    if positive.is_empty() && negative.is_empty() {
        return Err(Error::IsolatedNode { node: center });
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let want_positive = rng.random_bool(0.5);
        let pool = match (want_positive, positive.is_empty(), negative.is_empty()) {
            (true, false, _) | (false, _, true) => &positive,
            _ => &negative,
        };
        let &(neighbor, sign) = &pool[rng.random_range(0..pool.len())];
        out.push(LabeledEdge {
            u: neighbor,
            v: center,
            sign,
            origin: Origin::True,
        });
    }
    Ok(out)
}

/// Sum of `log D` over true edges and `log(1 - D)` over fakes.
pub fn objective(emb: &EmbeddingMatrix, batch: &[LabeledEdge]) -> f64 {
    batch
        .iter()
        .map(|e| match e.origin {
            Origin::True => log_score(emb, e.u, e.v, e.sign),
            Origin::Fake => log_one_minus_score(emb, e.u, e.v, e.sign),
        })
        .sum()
}

/// Gradient of [`objective`] (the ascent direction).
pub fn batch_gradient(emb: &EmbeddingMatrix, batch: &[LabeledEdge]) -> SparseGrad {
    let dim = emb.dim();
    let mut acc = SparseGrad::new();
    for e in batch {
        let phi = e.sign.value();
        let x = phi * emb.dot(e.u, e.v);
        // d/dx log sigmoid(x) = sigmoid(-x); d/dx log(1 - sigmoid(x)) = -sigmoid(x)
        let dx = match e.origin {
            Origin::True => sigmoid(-x),
            Origin::Fake => -sigmoid(x),
        };
        let coef = dx * phi;
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            let row = acc.entry(a).or_insert_with(|| vec![0.0; dim]);
            for (r, y) in row.iter_mut().zip(emb.row(b)) {
                *r += coef * y;
            }
        }
    }
    acc
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiscriminatorUpdateReport {
    /// Batch objective before the step.
    pub objective: f64,
    pub gradient_norm: f64,
    pub true_edges: usize,
    pub fake_edges: usize,
}

/// One gradient-ascent step on the batch objective.
pub fn update(emb: &mut EmbeddingMatrix, batch: &[LabeledEdge], learning_rate: f64) -> Result<DiscriminatorUpdateReport> {
    if batch.is_empty() {
        return Err(Error::InvalidArgument("discriminator batch is empty".into()));
    }
    if let Some(e) = batch.iter().find(|e| e.u == e.v) {
        return Err(Error::InvalidArgument(format!("self-pair ({}, {}) in batch", e.u, e.v)));
    }
    let obj = objective(emb, batch);
    let grad = batch_gradient(emb, batch);
    let norm = grad
        .values()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    if !norm.is_finite() || !obj.is_finite() {
        return Err(Error::NonFinite("discriminator gradient"));
    }
    if learning_rate != 0.0 {
        for (&node, row) in &grad {
            for (w, g) in emb.row_mut(node).iter_mut().zip(row) {
                *w += learning_rate * g;
            }
        }
    }
    let fake = batch.iter().filter(|e| e.origin == Origin::Fake).count();
    Ok(DiscriminatorUpdateReport {
        objective: obj,
        gradient_norm: norm,
        true_edges: batch.len() - fake,
        fake_edges: fake,
    })
}

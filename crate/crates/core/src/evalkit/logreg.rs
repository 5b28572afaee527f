//! Binary logistic regression fitted by full-batch gradient descent on the
//! mean log-loss. Zero initialisation and no regularisation.

use serde::{Deserialize, Serialize};

use crate::discriminator::sigmoid;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRegConfig {
    pub iterations: usize,
    pub learning_rate: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            iterations: 500,
            learning_rate: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticRegression {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub initial_loss: f64,
    pub final_loss: f64,
}

fn validate(features: &[Vec<f64>], labels: &[bool]) -> Result<usize> {
    if features.len() != labels.len() {
        return Err(Error::InvalidArgument("feature/label count mismatch".into()));
    }
    let dim = features.first().map_or(0, Vec::len);
    if features.iter().any(|f| f.len() != dim) {
        return Err(Error::InvalidArgument("ragged feature rows".into()));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::InvalidArgument("logistic regression needs both classes".into()));
    }
    Ok(dim)
}

/// Mean log-loss of `(weights, bias)` on the data.
pub fn log_loss(weights: &[f64], bias: f64, features: &[Vec<f64>], labels: &[bool]) -> f64 {
    let total: f64 = features
        .iter()
        .zip(labels)
        .map(|(x, &y)| {
            let z = bias + crate::embedding::dot(weights, x);
            // -log sigmoid(z) for y=1, -log sigmoid(-z) for y=0
            let m = if y { -z } else { z };
            if m > 0.0 {
                m + (-m).exp().ln_1p()
            } else {
                m.exp().ln_1p()
            }
        })
        .sum();
    total / features.len() as f64
}

impl LogisticRegression {
    pub fn fit(features: &[Vec<f64>], labels: &[bool], cfg: LogRegConfig) -> Result<Self> {
        let dim = validate(features, labels)?;
        let n = features.len() as f64;
        let mut w = vec![0.0; dim];
        let mut b = 0.0;
        let initial_loss = log_loss(&w, b, features, labels);
        let mut grad = vec![0.0; dim];
        for _ in 0..cfg.iterations {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut grad_b = 0.0;
            for (x, &y) in features.iter().zip(labels) {
                let err = sigmoid(b + crate::embedding::dot(&w, x)) - if y { 1.0 } else { 0.0 };
                grad_b += err;
                for (g, xi) in grad.iter_mut().zip(x) {
                    *g += err * xi;
                }
            }
            b -= cfg.learning_rate * grad_b / n;
            for (wi, g) in w.iter_mut().zip(&grad) {
                *wi -= cfg.learning_rate * g / n;
            }
        }
        if w.iter().any(|x| !x.is_finite()) || !b.is_finite() {
            return Err(Error::NonFinite("logistic regression weights"));
        }
        let final_loss = log_loss(&w, b, features, labels);
        Ok(LogisticRegression {
            weights: w,
            bias: b,
            initial_loss,
            final_loss,
        })
    }

    pub fn probability(&self, x: &[f64]) -> f64 {
        sigmoid(self.bias + crate::embedding::dot(&self.weights, x))
    }

    /// Positive when the probability reaches 0.5.
    pub fn predict(&self, x: &[f64]) -> bool {
        self.probability(x) >= 0.5
    }
}

/// Per-column z-scoring fitted on training rows. Constant columns pass
/// through centred but unscaled.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let dim = rows.first().map_or(0, Vec::len);
        let n = rows.len().max(1) as f64;
        let mut mean = vec![0.0; dim];
        for r in rows {
            for (m, x) in mean.iter_mut().zip(r) {
                *m += x / n;
            }
        }
        let mut var = vec![0.0; dim];
        for r in rows {
            for ((v, x), m) in var.iter_mut().zip(r).zip(&mean) {
                *v += (x - m) * (x - m) / n;
            }
        }
        let scale = var
            .into_iter()
            .map(|v| if v > 1e-24 { v.sqrt() } else { 1.0 })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn apply(&self, row: &mut [f64]) {
        for ((x, m), s) in row.iter_mut().zip(&self.mean).zip(&self.scale) {
            *x = (*x - m) / s;
        }
    }
}

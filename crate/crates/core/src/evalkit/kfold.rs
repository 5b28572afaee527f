use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::features::{edge_features, EdgeFeatureMode};
use super::logreg::{LogRegConfig, LogisticRegression, Standardizer};
use super::metrics::{Confusion, FoldMetrics, MetricsReport};
use crate::sgraph::remove_edges;
use crate::trainer::{self, TrainConfig};
use crate::{seeds, EmbeddingMatrix, Error, Result, SignedGraph};

/// Whether embeddings may see the held-out edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Leakage {
    /// Retrain embeddings per fold on the graph minus the test edges.
    Strict,
    /// Train embeddings once on the full graph.
    Fast,
}

impl fmt::Display for Leakage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Leakage::Strict => "strict",
            Leakage::Fast => "fast",
        })
    }
}

impl FromStr for Leakage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Leakage::Strict),
            "fast" => Ok(Leakage::Fast),
            other => Err(Error::InvalidArgument(format!("unknown leakage mode `{other}`"))),
        }
    }
}

/// Which trained table feeds the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingSource {
    Discriminator,
    Generator,
}

impl fmt::Display for EmbeddingSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EmbeddingSource::Discriminator => "discriminator",
            EmbeddingSource::Generator => "generator",
        })
    }
}

impl FromStr for EmbeddingSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discriminator" | "d" => Ok(EmbeddingSource::Discriminator),
            "generator" | "g" => Ok(EmbeddingSource::Generator),
            other => Err(Error::InvalidArgument(format!("unknown embedding source `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KFoldConfig {
    pub k_folds: usize,
    pub feature_mode: EdgeFeatureMode,
    pub leakage: Leakage,
    pub source: EmbeddingSource,
    pub train: TrainConfig,
    pub logreg: LogRegConfig,
    /// Seeds the fold assignment.
    pub seed: u64,
}

impl Default for KFoldConfig {
    fn default() -> Self {
        KFoldConfig {
            k_folds: 5,
            feature_mode: EdgeFeatureMode::Hadamard,
            leakage: Leakage::Strict,
            source: EmbeddingSource::Discriminator,
            train: TrainConfig::default(),
            logreg: LogRegConfig::default(),
            seed: 0,
        }
    }
}

/// Splits edge indices into `k` folds, stratified by sign: each sign class
/// is shuffled and dealt round-robin, negatives continuing where the
/// positives stopped so fold sizes differ by at most one.
pub fn stratified_folds(g: &SignedGraph, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidArgument("need at least 2 folds".into()));
    }
    if g.edge_count() < k {
        return Err(Error::InvalidArgument(format!("{} edges cannot fill {k} folds", g.edge_count())));
    }
    let mut rng = seeds::stream_rng(seed, &[seeds::streams::FOLDS]);
    let (mut pos, mut neg): (Vec<usize>, Vec<usize>) =
        (0..g.edge_count()).partition(|&i| g.edges()[i].sign.is_positive());
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let mut folds = vec![Vec::new(); k];
    for (slot, idx) in pos.iter().chain(&neg).enumerate() {
        folds[slot % k].push(*idx);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

fn pick(outcome: trainer::TrainOutcome, source: EmbeddingSource) -> EmbeddingMatrix {
    match source {
        EmbeddingSource::Discriminator => outcome.discriminator,
        EmbeddingSource::Generator => outcome.generator,
    }
}

fn train_embeddings(g: &SignedGraph, cfg: &TrainConfig, source: EmbeddingSource) -> Result<EmbeddingMatrix> {
    match trainer::train(g, cfg) {
        Ok(out) => Ok(pick(out, source)),
        Err(trainer::TrainError::Core(e)) => Err(e),
        Err(trainer::TrainError::Diverged { source: e, .. }) => Err(e),
    }
}

/// Trains the classifier on the edges outside `test` and scores `test`.
/// Features are standardised with training-split statistics.
pub fn evaluate_fold(
    g: &SignedGraph,
    emb: &EmbeddingMatrix,
    test: &[usize],
    fold: usize,
    mode: EdgeFeatureMode,
    logreg: LogRegConfig,
) -> Result<FoldMetrics> {
    let mut in_test = vec![false; g.edge_count()];
    for &i in test {
        in_test[i] = true;
    }
    let features = |i: usize| {
        let e = g.edges()[i];
        edge_features(emb, e.u, e.v, mode)
    };
    let label = |i: usize| g.edges()[i].sign.is_positive();
    let train_idx: Vec<usize> = (0..g.edge_count()).filter(|&i| !in_test[i]).collect();
    for (split, idx) in [("train", &train_idx[..]), ("test", test)] {
        let positives = idx.iter().filter(|&&i| label(i)).count();
        if positives == 0 || positives == idx.len() {
            return Err(Error::SingleClass { fold, split });
        }
    }
    let mut x_train: Vec<Vec<f64>> = train_idx.iter().map(|&i| features(i)).collect();
    let y_train: Vec<bool> = train_idx.iter().map(|&i| label(i)).collect();
    let scaler = Standardizer::fit(&x_train);
    x_train.iter_mut().for_each(|r| scaler.apply(r));
    let model = LogisticRegression::fit(&x_train, &y_train, logreg)?;

    let predicted: Vec<bool> = test
        .iter()
        .map(|&i| {
            let mut x = features(i);
            scaler.apply(&mut x);
            model.predict(&x)
        })
        .collect();
    let actual: Vec<bool> = test.iter().map(|&i| label(i)).collect();
    Ok(FoldMetrics::from_confusion(fold, Confusion::from_predictions(&predicted, &actual)))
}

/// k-fold link-sign prediction with embeddings trained per `cfg.leakage`.
pub fn kfold_link_prediction(g: &SignedGraph, cfg: &KFoldConfig) -> Result<MetricsReport> {
    let folds = stratified_folds(g, cfg.k_folds, cfg.seed)?;
    let shared = match cfg.leakage {
        Leakage::Fast => Some(train_embeddings(g, &cfg.train, cfg.source)?),
        Leakage::Strict => None,
    };
    let mut results = Vec::with_capacity(folds.len());
    for (fold, test) in folds.iter().enumerate() {
        let emb = match &shared {
            Some(e) => std::borrow::Cow::Borrowed(e),
            None => {
                let mut drop = vec![false; g.edge_count()];
                test.iter().for_each(|&i| drop[i] = true);
                let reduced = remove_edges(g, &drop)?;
                std::borrow::Cow::Owned(train_embeddings(&reduced, &cfg.train, cfg.source)?)
            }
        };
        let m = evaluate_fold(g, &emb, test, fold, cfg.feature_mode, cfg.logreg)?;
        log::info!("fold {fold}: averaged_micro_f1={:.4} standard_micro_f1={:.4}", m.averaged_micro_f1, m.standard_micro_f1);
        results.push(m);
    }
    Ok(MetricsReport::new(
        cfg.feature_mode.to_string(),
        cfg.leakage.to_string(),
        cfg.source.to_string(),
        results,
    ))
}

/// k-fold evaluation of a fixed, externally supplied embedding table.
pub fn kfold_with_embeddings(
    g: &SignedGraph,
    emb: &EmbeddingMatrix,
    k_folds: usize,
    mode: EdgeFeatureMode,
    logreg: LogRegConfig,
    seed: u64,
) -> Result<MetricsReport> {
    if emb.rows() != g.node_count() {
        return Err(Error::InvalidArgument(format!(
            "embedding has {} rows but graph has {} nodes",
            emb.rows(),
            g.node_count()
        )));
    }
    let folds = stratified_folds(g, k_folds, seed)?;
    let results = folds
        .iter()
        .enumerate()
        .map(|(fold, test)| evaluate_fold(g, emb, test, fold, mode, logreg))
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricsReport::new(mode.to_string(), "fast".into(), "supplied".into(), results))
}

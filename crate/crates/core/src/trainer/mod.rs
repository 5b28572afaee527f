//! Adversarial training loop.
//!
//! Each outer epoch runs `d_epochs` discriminator passes followed by
//! `g_epochs` generator passes. A pass has a read phase, in which every
//! center independently samples against frozen embeddings (in parallel when
//! `threads > 1`), and a write phase, in which the collected samples are
//! applied as minibatch SGD steps in a fixed order. Per-center random
//! streams are derived from `(seed, epoch, phase, pass, center)`, so the
//! result does not depend on the thread count.

pub mod checkpoint;
mod config;

use std::borrow::Cow;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discriminator::{self, LabeledEdge, Origin};
use crate::generator::{self, clamped_reward, FakeSample};
use crate::seeds::{self, streams};
use crate::treewalk::BfsTree;
use crate::{EmbeddingMatrix, Error, SignedGraph};

pub use config::{TrainConfig, KEYS as CONFIG_KEYS};

/// Trees are cached across passes only below this many nodes; larger
/// graphs rebuild each tree on use.
pub const TREE_CACHE_MAX_NODES: usize = 2048;

const PHASE_D: u64 = 0;
const PHASE_G: u64 = 1;

/// Everything needed to continue training bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainState {
    pub config: TrainConfig,
    pub graph_checksum: u64,
    /// Completed outer epochs.
    pub epoch: usize,
    /// Drives the per-pass center shuffles.
    pub rng: ChaCha8Rng,
    pub generator: EmbeddingMatrix,
    pub discriminator: EmbeddingMatrix,
}

impl TrainState {
    pub fn new(g: &SignedGraph, config: TrainConfig) -> crate::Result<Self> {
        config.validate()?;
        if g.node_count() == 0 {
            return Err(Error::EmptyGraph("training graph has no nodes".into()));
        }
        let generator = EmbeddingMatrix::gaussian(
            g.node_count(),
            config.embedding_dim,
            seeds::sub_seed(config.seed, &[streams::GENERATOR_INIT]),
        )?;
        let discriminator = EmbeddingMatrix::gaussian(
            g.node_count(),
            config.embedding_dim,
            seeds::sub_seed(config.seed, &[streams::DISCRIMINATOR_INIT]),
        )?;
        Ok(TrainState {
            rng: seeds::stream_rng(config.seed, &[streams::TRAINER]),
            graph_checksum: g.checksum(),
            epoch: 0,
            config,
            generator,
            discriminator,
        })
    }
}

/// Per outer epoch instrumentation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean negated discriminator objective over its minibatches.
    pub d_loss: f64,
    pub d_grad_norm: f64,
    pub d_true_edges: usize,
    pub d_fake_edges: usize,
    pub d_true_positive: usize,
    pub d_true_negative: usize,
    pub d_updates: usize,
    pub g_reward: f64,
    pub g_grad_norm: f64,
    pub g_samples: usize,
    pub g_updates: usize,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs: Vec<EpochRecord>,
    pub generator_checksum: u64,
    pub discriminator_checksum: u64,
}

#[derive(Debug)]
pub struct TrainOutcome {
    pub generator: EmbeddingMatrix,
    pub discriminator: EmbeddingMatrix,
    pub report: TrainReport,
}

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error(transparent)]
    Core(#[from] Error),
    /// A non-finite value appeared; `last_good` is the state at the start
    /// of the failing outer epoch.
    #[error("training diverged in epoch {epoch} ({phase} phase): {source}")]
    Diverged {
        epoch: usize,
        phase: &'static str,
        #[source]
        source: Error,
        last_good: Box<TrainState>,
    },
}

/// Trains from a fresh state to `cfg.outer_epochs`.
pub fn train(g: &SignedGraph, cfg: &TrainConfig) -> Result<TrainOutcome, TrainError> {
    let mut state = TrainState::new(g, cfg.clone())?;
    let report = Trainer::new(g, &state.config)?.run(&mut state, cfg.outer_epochs, |_, _| Ok(()))?;
    Ok(TrainOutcome {
        generator: state.generator,
        discriminator: state.discriminator,
        report,
    })
}

pub struct Trainer<'g> {
    graph: &'g SignedGraph,
    trees: Option<Vec<BfsTree>>,
    max_depth: Option<usize>,
    pool: rayon::ThreadPool,
}

impl<'g> Trainer<'g> {
    pub fn new(graph: &'g SignedGraph, cfg: &TrainConfig) -> crate::Result<Self> {
        cfg.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        let trees = (graph.node_count() <= TREE_CACHE_MAX_NODES).then(|| {
            pool.install(|| {
                (0..graph.node_count())
                    .into_par_iter()
                    .map(|c| BfsTree::build_capped(graph, c, cfg.max_tree_depth))
                    .collect()
            })
        });
        Ok(Trainer {
            graph,
            trees,
            max_depth: cfg.max_tree_depth,
            pool,
        })
    }

    fn tree(&self, center: usize) -> Cow<'_, BfsTree> {
        match &self.trees {
            Some(t) => Cow::Borrowed(&t[center]),
            None => Cow::Owned(BfsTree::build_capped(self.graph, center, self.max_depth)),
        }
    }

    /// Runs outer epochs until `state.epoch == until`. `on_epoch` sees the
    /// state after each completed epoch (e.g. to write a checkpoint).
    pub fn run(
        &self,
        state: &mut TrainState,
        until: usize,
        mut on_epoch: impl FnMut(&TrainState, &EpochRecord) -> crate::Result<()>,
    ) -> Result<TrainReport, TrainError> {
        if state.graph_checksum != self.graph.checksum() {
            return Err(Error::Checkpoint("state was trained on a different graph".into()).into());
        }
        let mut report = TrainReport::default();
        let centers: Vec<usize> = (0..self.graph.node_count())
            .filter(|&c| self.graph.degree(c) > 0)
            .collect();
        while state.epoch < until {
            let last_good = state.clone();
            let started = Instant::now();
            let diverged = |phase, source| TrainError::Diverged {
                epoch: last_good.epoch,
                phase,
                source,
                last_good: Box::new(last_good.clone()),
            };
            let mut record = EpochRecord {
                epoch: state.epoch,
                d_loss: 0.0,
                d_grad_norm: 0.0,
                d_true_edges: 0,
                d_fake_edges: 0,
                d_true_positive: 0,
                d_true_negative: 0,
                d_updates: 0,
                g_reward: 0.0,
                g_grad_norm: 0.0,
                g_samples: 0,
                g_updates: 0,
                wall_time_secs: 0.0,
            };
            for pass in 0..state.config.d_epochs {
                self.discriminator_pass(state, &centers, pass, &mut record)
                    .map_err(|e| diverged("discriminator", e))?;
            }
            for pass in 0..state.config.g_epochs {
                self.generator_pass(state, &centers, pass, &mut record)
                    .map_err(|e| diverged("generator", e))?;
            }
            if !state.generator.is_finite() || !state.discriminator.is_finite() {
                return Err(diverged("epoch end", Error::NonFinite("embeddings")));
            }
            if record.d_updates > 0 {
                record.d_loss /= record.d_updates as f64;
                record.d_grad_norm /= record.d_updates as f64;
            }
            if record.g_updates > 0 {
                record.g_grad_norm /= record.g_updates as f64;
            }
            if record.g_samples > 0 {
                record.g_reward /= record.g_samples as f64;
            }
            record.wall_time_secs = started.elapsed().as_secs_f64();
            state.epoch += 1;
            log::info!(
                "epoch {} d_loss={:.6} g_reward={:.6} ({:.2}s)",
                record.epoch,
                record.d_loss,
                record.g_reward,
                record.wall_time_secs
            );
            on_epoch(state, &record)?;
            report.epochs.push(record);
        }
        report.generator_checksum = state.generator.checksum();
        report.discriminator_checksum = state.discriminator.checksum();
        Ok(report)
    }

    fn shuffled(&self, state: &mut TrainState, centers: &[usize]) -> Vec<usize> {
        let mut order = centers.to_vec();
        order.shuffle(&mut state.rng);
        order
    }

    fn discriminator_pass(
        &self,
        state: &mut TrainState,
        centers: &[usize],
        pass: usize,
        record: &mut EpochRecord,
    ) -> crate::Result<()> {
        let order = self.shuffled(state, centers);
        let cfg = &state.config;
        let (gen, epoch) = (&state.generator, state.epoch as u64);
        let per_center: Vec<crate::Result<Vec<LabeledEdge>>> = self.pool.install(|| {
            order
                .par_iter()
                .map(|&c| {
                    let mut rng = seeds::stream_rng(cfg.seed, &[streams::TRAINER, epoch, PHASE_D, pass as u64, c as u64]);
                    let truth = discriminator::sample_true_batch(self.graph, c, cfg.samples_per_center, &mut rng)?;
                    let tree = self.tree(c);
                    let fakes = generator::generate_fakes_in_tree(&tree, gen, truth.len(), &mut rng)?;
                    // interleave so every even-sized minibatch is half true, half fake
                    let mut edges = Vec::with_capacity(2 * truth.len());
                    for (t, f) in truth.into_iter().zip(fakes.samples) {
                        edges.push(t);
                        edges.push(LabeledEdge {
                            u: f.neighbor,
                            v: c,
                            sign: f.sign,
                            origin: Origin::Fake,
                        });
                    }
                    Ok(edges)
                })
                .collect()
        });
        let mut edges = Vec::new();
        for batch in per_center {
            edges.extend(batch?);
        }
        for e in &edges {
            match (e.origin, e.sign.is_positive()) {
                (Origin::True, true) => record.d_true_positive += 1,
                (Origin::True, false) => record.d_true_negative += 1,
                _ => {}
            }
        }
        let lr = state.config.learning_rate;
        for chunk in edges.chunks(state.config.batch_size) {
            let r = discriminator::update(&mut state.discriminator, chunk, lr)?;
            record.d_loss -= r.objective;
            record.d_grad_norm += r.gradient_norm;
            record.d_true_edges += r.true_edges;
            record.d_fake_edges += r.fake_edges;
            record.d_updates += 1;
        }
        Ok(())
    }

    fn generator_pass(
        &self,
        state: &mut TrainState,
        centers: &[usize],
        pass: usize,
        record: &mut EpochRecord,
    ) -> crate::Result<()> {
        let order = self.shuffled(state, centers);
        let cfg = &state.config;
        let (gen, disc, epoch) = (&state.generator, &state.discriminator, state.epoch as u64);
        let per_center: Vec<crate::Result<Vec<FakeSample>>> = self.pool.install(|| {
            order
                .par_iter()
                .map(|&c| {
                    let mut rng = seeds::stream_rng(cfg.seed, &[streams::TRAINER, epoch, PHASE_G, pass as u64, c as u64]);
                    let tree = self.tree(c);
                    let mut batch = generator::generate_fakes_in_tree(&tree, gen, cfg.samples_per_center, &mut rng)?;
                    for s in &mut batch.samples {
                        let raw = discriminator::log_one_minus_score(disc, s.neighbor, c, s.sign);
                        s.reward = clamped_reward(raw, cfg.reward_clamp);
                    }
                    Ok(batch.samples)
                })
                .collect()
        });
        let mut samples = Vec::new();
        for batch in per_center {
            samples.extend(batch?);
        }
        record.g_samples += samples.len();
        record.g_reward += samples.iter().map(|s| s.reward).sum::<f64>();
        let lr = state.config.learning_rate;
        for chunk in samples.chunks(state.config.batch_size) {
            let r = generator::policy_gradient_update(&mut state.generator, chunk, lr)?;
            record.g_grad_norm += r.gradient_norm;
            record.g_updates += 1;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sgraph::{synth_balanced, Edge};
    use crate::Sign;

    fn small_cfg() -> TrainConfig {
        TrainConfig {
            embedding_dim: 8,
            outer_epochs: 2,
            d_epochs: 2,
            g_epochs: 2,
            samples_per_center: 5,
            batch_size: 8,
            seed: 3,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn zero_epochs_returns_initialisation() {
        let g = synth_balanced(2, 5, 0.8, 0.5, 0.0, 1);
        let cfg = TrainConfig { outer_epochs: 0, ..small_cfg() };
        let out = train(&g, &cfg).unwrap();
        let init = TrainState::new(&g, cfg).unwrap();
        assert_eq!(out.generator, init.generator);
        assert_eq!(out.discriminator, init.discriminator);
        assert!(out.report.epochs.is_empty());
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let g = synth_balanced(2, 8, 0.6, 0.4, 0.1, 2);
        let a = train(&g, &small_cfg()).unwrap();
        let b = train(&g, &small_cfg()).unwrap();
        assert_eq!(a.report.generator_checksum, b.report.generator_checksum);
        assert_eq!(a.report.discriminator_checksum, b.report.discriminator_checksum);
        let threaded = train(&g, &TrainConfig { threads: 3, ..small_cfg() }).unwrap();
        assert_eq!(a.generator, threaded.generator);
        assert_eq!(a.discriminator, threaded.discriminator);
    }

    #[test]
    fn batches_are_balanced_and_losses_finite() {
        let g = synth_balanced(2, 8, 0.6, 0.4, 0.1, 2);
        let out = train(&g, &small_cfg()).unwrap();
        assert_eq!(out.report.epochs.len(), 2);
        for r in &out.report.epochs {
            assert_eq!(r.d_true_edges, r.d_fake_edges);
            assert_eq!(r.d_true_edges, 2 * 16 * 5);
            assert_eq!(r.g_samples, 2 * 16 * 5);
            assert!(r.d_loss.is_finite() && r.g_reward.is_finite());
            assert!(r.g_reward <= 0.0);
        }
    }

    #[test]
    fn single_positive_edge_is_learned() {
        // On two nodes every fake is the true pair itself, Positive with
        // probability q = p^2 + (1-p)^2 >= 1/2, so the best discriminator
        // response is 1 - q/2 <= 0.75.
        let g = SignedGraph::from_edges(2, [Edge::new(0, 1, Sign::Positive)]).unwrap();
        let cfg = TrainConfig { embedding_dim: 50, ..TrainConfig::default() };
        let init = TrainState::new(&g, cfg.clone()).unwrap();
        let out = train(&g, &cfg).unwrap();
        let before = discriminator::score(&init.discriminator, 0, 1, Sign::Positive);
        let s = discriminator::score(&out.discriminator, 0, 1, Sign::Positive);
        assert!(s > before && s > 0.6, "score {s} (initial {before})");
        assert!(s < 0.75 + 0.01, "score {s} beyond the equilibrium bound");
    }

    #[test]
    fn uncached_trees_match_cached() {
        let g = synth_balanced(2, 6, 0.7, 0.4, 0.1, 5);
        let cfg = small_cfg();
        let cached = Trainer::new(&g, &cfg).unwrap();
        let mut uncached = Trainer::new(&g, &cfg).unwrap();
        uncached.trees = None;
        let mut s1 = TrainState::new(&g, cfg.clone()).unwrap();
        let mut s2 = s1.clone();
        cached.run(&mut s1, 2, |_, _| Ok(())).unwrap();
        uncached.run(&mut s2, 2, |_, _| Ok(())).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn divergence_returns_last_good_state() {
        let g = synth_balanced(2, 6, 0.7, 0.4, 0.1, 5);
        let cfg = TrainConfig { learning_rate: 1e300, outer_epochs: 3, ..small_cfg() };
        match train(&g, &cfg) {
            Err(TrainError::Diverged { last_good, epoch, .. }) => {
                assert_eq!(last_good.epoch, epoch);
                assert!(last_good.generator.is_finite() && last_good.discriminator.is_finite());
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
